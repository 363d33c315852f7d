from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from ..dataset import DatasetIndex, load_image, load_mask
from ..errors import ValidationError
from ..metrics import (METRIC_NAMES, AggregateReport, MetricStat, MetricValues,
                       aggregate, evaluate_image, format_table, report_csv)
from ..modelhub import PredictorHandle, predict
from .grading import DEFAULT_MIN_OVERLAP, grade_prediction
from .overlay import render_overlay

PER_IMAGE_FILE = "per_image.csv"
REPORT_CSV_FILE = "report.csv"
REPORT_TXT_FILE = "report.txt"
PER_CLASS_FILE = "per_class.csv"
GRADES_FILE = "grades.csv"
EXCEPTIONS_FILE = "exceptions.csv"
OVERLAYS_DIR = "overlays"


@dataclass
class ExperimentSpec:
    predictor: PredictorHandle
    split: str
    dataset: DatasetIndex
    output_path: str
    seed: int = 0
    min_overlap: float = DEFAULT_MIN_OVERLAP
    write_overlays: bool = True


@dataclass
class ExperimentResult:
    report: AggregateReport
    samples: list[tuple[str, int, MetricValues]] = field(default_factory=list)
    exceptions: list[tuple[str, str]] = field(default_factory=list)


def per_class_breakdown(samples: list[tuple[int, MetricValues]],
                        taxonomy=None) -> dict[int, MetricStat]:
    """Per-class mean IoU over defined samples; absent classes are no-data."""
    values: dict[int, list[float]] = {}
    for class_id, mv in samples:
        if mv.iou is not None:
            values.setdefault(class_id, []).append(mv.iou)
    class_ids = list(taxonomy.food_ids) if taxonomy is not None else sorted(values)
    out: dict[int, MetricStat] = {}
    for cid in class_ids:
        vals = values.get(cid, [])
        if vals:
            mean = sum(vals) / len(vals)
            std = (sum((v - mean) ** 2 for v in vals) / len(vals)) ** 0.5
            out[cid] = MetricStat(mean=mean, std=std, n=len(vals))
        else:
            out[cid] = MetricStat(mean=None, std=None, n=0)
    return out


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Evaluate one predictor over one split and persist the report files.

    Images are processed in image_id order and every float is written with a
    fixed format, so a rerun of the same spec reproduces the output directory
    byte for byte. An image whose mask is missing is recorded under
    exceptions and skipped; the run continues.
    """
    records = sorted(spec.dataset.split_records(spec.split), key=lambda r: r.image_id)
    if not records:
        raise ValidationError(f"split {spec.split!r} has no records")
    if spec.dataset.root is None:
        raise ValidationError("dataset index has no root directory")

    out_dir = Path(spec.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    if spec.write_overlays:
        (out_dir / OVERLAYS_DIR).mkdir(exist_ok=True)

    taxonomy = spec.dataset.taxonomy
    samples: list[tuple[str, int, MetricValues]] = []
    grades: list[tuple[str, int, int, str]] = []
    exceptions: list[tuple[str, str]] = []

    for record in records:
        try:
            gt = load_mask(spec.dataset.root, record.image_id)
        except FileNotFoundError as exc:
            exceptions.append((record.image_id, str(exc)))
            continue
        image = load_image(spec.dataset.root, record)
        output = predict(spec.predictor, image)
        for class_id, mv in evaluate_image(output.label_mask, gt, taxonomy).items():
            samples.append((record.image_id, class_id, mv))
        if record.regions:
            g = grade_prediction(output, record.regions, spec.min_overlap)
            grades.append((record.image_id, g.detected, g.total, g.value))
        if spec.write_overlays:
            overlay = render_overlay(image, output, taxonomy)
            Image.fromarray(overlay).save(out_dir / OVERLAYS_DIR / f"{record.image_id}.png")

    report = aggregate([(cid, mv) for _, cid, mv in samples])

    _write_per_image(out_dir / PER_IMAGE_FILE, samples, taxonomy)
    (out_dir / REPORT_CSV_FILE).write_text(
        report_csv(report, spec.predictor.name, taxonomy))
    _write_per_class(out_dir / PER_CLASS_FILE,
                     per_class_breakdown([(cid, mv) for _, cid, mv in samples],
                                         taxonomy), taxonomy)
    _write_grades(out_dir / GRADES_FILE, grades)
    _write_exceptions(out_dir / EXCEPTIONS_FILE, exceptions)
    (out_dir / REPORT_TXT_FILE).write_text(
        _report_text(spec.predictor.name, report, exceptions))

    return ExperimentResult(report=report, samples=samples, exceptions=exceptions)


def _report_text(model: str, report: AggregateReport,
                 exceptions: list[tuple[str, str]]) -> str:
    text = format_table({model: report})
    if exceptions:
        buf = io.StringIO()
        buf.write(text)
        buf.write("\nExceptions (excluded from the report):\n")
        for image_id, problem in exceptions:
            buf.write(f"  {image_id}: {problem}\n")
        return buf.getvalue()
    return text


def _write_per_image(path: Path, samples: list[tuple[str, int, MetricValues]],
                     taxonomy) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "class"] + list(METRIC_NAMES))
        for image_id, class_id, mv in samples:
            writer.writerow([image_id, taxonomy.name_of(class_id)] +
                            [_fmt(mv.get(name)) for name in METRIC_NAMES])


def _write_per_class(path: Path, breakdown: dict[int, MetricStat], taxonomy) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "iou_mean", "iou_std", "n"])
        for class_id, stat in breakdown.items():
            writer.writerow([taxonomy.name_of(class_id),
                             _fmt(stat.mean), _fmt(stat.std), stat.n])


def _write_grades(path: Path, grades: list[tuple[str, int, int, str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "detected", "total", "grade"])
        for row in grades:
            writer.writerow(row)


def _write_exceptions(path: Path, exceptions: list[tuple[str, str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "problem"])
        for row in exceptions:
            writer.writerow(row)
