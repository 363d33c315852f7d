from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass

from ..dataset import ClassTaxonomy
from .core import METRIC_NAMES, MetricValues

# Column order used by the formatted text table.
TABLE_COLUMNS = ("iou", "se", "sp", "bac", "ppv")
TABLE_HEADERS = {"iou": "IoU", "se": "SE", "sp": "SP", "bac": "BAC", "ppv": "PPV"}

OVERALL_LABEL = "all"


@dataclass(frozen=True)
class MetricStat:
    """Mean/std over the defined samples of one metric; n counts them."""

    mean: float | None
    std: float | None
    n: int

    @property
    def defined(self) -> bool:
        return self.n > 0


@dataclass(frozen=True)
class AggregateReport:
    per_class: dict[int, dict[str, MetricStat]]
    overall: dict[str, MetricStat]


def _stat(values: list[float]) -> MetricStat:
    if not values:
        return MetricStat(mean=None, std=None, n=0)
    return MetricStat(mean=statistics.fmean(values),
                      std=statistics.pstdev(values), n=len(values))


def aggregate(samples: list[tuple[int, MetricValues]]) -> AggregateReport:
    """Pool per-(image, class) metric samples into per-class and overall stats.

    Undefined values are excluded, not coerced; n records how many samples
    actually contributed to each mean. Std is the population form, so a
    single sample reports 0.0 rather than blowing up.
    """
    by_class: dict[int, dict[str, list[float]]] = {}
    pooled: dict[str, list[float]] = {name: [] for name in METRIC_NAMES}
    for class_id, values in samples:
        bucket = by_class.setdefault(class_id, {name: [] for name in METRIC_NAMES})
        for name in METRIC_NAMES:
            v = values.get(name)
            if v is not None:
                bucket[name].append(v)
                pooled[name].append(v)

    per_class = {
        class_id: {name: _stat(vals) for name, vals in buckets.items()}
        for class_id, buckets in sorted(by_class.items())
    }
    overall = {name: _stat(vals) for name, vals in pooled.items()}
    return AggregateReport(per_class=per_class, overall=overall)


def format_std(std: float) -> str:
    """One significant digit, plain decimal: 0.213→'0.2', 0.024→'0.02', 0→'0.0'."""
    if std == 0:
        return "0.0"
    exponent = math.floor(math.log10(abs(std)))
    rounded = round(std, -exponent)
    if rounded >= 10 ** (exponent + 1):
        exponent += 1
    decimals = max(-exponent, 1)
    return f"{rounded:.{decimals}f}"


def format_mean_std(stat: MetricStat) -> str:
    if not stat.defined:
        return "—"
    return f"{stat.mean:.2f}({format_std(stat.std)})"


def report_csv(report: AggregateReport, model: str,
               taxonomy: ClassTaxonomy | None = None) -> str:
    """Serialize a report as `model,class,metric,mean,std,n` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "class", "metric", "mean", "std", "n"])

    def class_label(class_id: int) -> str:
        return taxonomy.name_of(class_id) if taxonomy else str(class_id)

    empty = {name: MetricStat(mean=None, std=None, n=0) for name in METRIC_NAMES}
    class_ids = taxonomy.food_ids if taxonomy else sorted(report.per_class)
    for class_id in class_ids:
        stats = report.per_class.get(class_id, empty)
        for name in METRIC_NAMES:
            stat = stats[name]
            writer.writerow([
                model, class_label(class_id), name,
                "" if stat.mean is None else f"{stat.mean:.6f}",
                "" if stat.std is None else f"{stat.std:.6f}",
                stat.n,
            ])
    for name in METRIC_NAMES:
        stat = report.overall[name]
        writer.writerow([
            model, OVERALL_LABEL, name,
            "" if stat.mean is None else f"{stat.mean:.6f}",
            "" if stat.std is None else f"{stat.std:.6f}",
            stat.n,
        ])
    return buf.getvalue()


def format_table(reports: dict[str, AggregateReport]) -> str:
    """Fixed-width text table: one row per model, mean(std) per metric column."""
    headers = ["Model"] + [TABLE_HEADERS[c] for c in TABLE_COLUMNS]
    rows = [[model] + [format_mean_std(report.overall[c]) for c in TABLE_COLUMNS]
            for model, report in reports.items()]

    widths = [max(len(str(cell)) for cell in col)
              for col in zip(headers, *rows)] if rows else [len(h) for h in headers]
    lines = []
    sep = "  "
    lines.append(sep.join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    lines.append(sep.join("-" * w for w in widths))
    for row in rows:
        lines.append(sep.join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
