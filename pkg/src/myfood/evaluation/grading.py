from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from ..dataset import RegionAnnotation, polygon_mask
from ..errors import ValidationError
from ..modelhub import PredictionOutput

GRADES = ("bad", "good", "great")

DEFAULT_MIN_OVERLAP = 0.1


def _grade_value(detected: int, total: int) -> str:
    if detected == total:
        return "great"
    if detected / total < 0.5:
        return "bad"
    return "good"


@dataclass(frozen=True)
class Grade:
    value: str
    detected: int
    total: int

    def __post_init__(self):
        if self.total < 1:
            raise ValidationError(f"total must be >= 1, got {self.total}")
        if not (0 <= self.detected <= self.total):
            raise ValidationError(
                f"detected must be in [0, total], got {self.detected}/{self.total}")
        expected = _grade_value(self.detected, self.total)
        if self.value != expected:
            raise ValidationError(
                f"grade {self.value!r} inconsistent with {self.detected}/{self.total} "
                f"(expected {expected!r})")

    @classmethod
    def from_counts(cls, detected: int, total: int) -> "Grade":
        return cls(value=_grade_value(detected, total), detected=detected, total=total)


def grade_prediction(pred: PredictionOutput, gt_regions: list[RegionAnnotation],
                     min_overlap: float = DEFAULT_MIN_OVERLAP) -> Grade:
    """Three-level detection grade for one image.

    A ground-truth food counts as detected when the predicted mask for its
    class overlaps that region's raster with IoU >= min_overlap. The grade is
    "bad" below half detected, "great" only when everything was found, and
    "good" in between — an exact half counts as good.
    """
    if not gt_regions:
        raise ValidationError("cannot grade an image with zero ground-truth foods")
    if not (0.0 < min_overlap <= 1.0):
        raise ValidationError(f"min_overlap must be in (0,1], got {min_overlap}")

    values = pred.label_mask.values
    height, width = values.shape
    detected = 0
    for region in gt_regions:
        region_mask = polygon_mask(region.polygon, width, height)
        pred_mask = values == region.class_id
        union = int(np.count_nonzero(region_mask | pred_mask))
        if union == 0:
            continue
        inter = int(np.count_nonzero(region_mask & pred_mask))
        if inter / union >= min_overlap:
            detected += 1
    return Grade.from_counts(detected, len(gt_regions))


def comparison_table(grades: dict[str, list[Grade]],
                     image_ids: list[str] | None = None) -> str:
    """Rows = images, columns = systems, plus a per-system grade tally."""
    if not grades:
        raise ValidationError("no systems to compare")
    systems = list(grades)
    lengths = {len(v) for v in grades.values()}
    if len(lengths) != 1:
        raise ValidationError(
            f"all systems must grade the same images; got lengths "
            f"{ {s: len(v) for s, v in grades.items()} }")
    n = lengths.pop()
    if image_ids is None:
        image_ids = [f"image {i + 1}" for i in range(n)]
    if len(image_ids) != n:
        raise ValidationError(f"{len(image_ids)} image ids for {n} grades")

    headers = ["Image"] + systems
    rows = [[image_ids[i]] + [grades[s][i].value for s in systems] for i in range(n)]
    tally_rows = []
    for grade_name in GRADES:
        tally_rows.append([f"# {grade_name}"] +
                          [str(sum(1 for g in grades[s] if g.value == grade_name))
                           for s in systems])

    widths = [max(len(str(c)) for c in col)
              for col in zip(headers, *rows, *tally_rows)]
    out = io.StringIO()
    sep = "  "
    out.write(sep.join(h.ljust(w) for h, w in zip(headers, widths)).rstrip() + "\n")
    out.write(sep.join("-" * w for w in widths) + "\n")
    for row in rows:
        out.write(sep.join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    out.write(sep.join("-" * w for w in widths) + "\n")
    for row in tally_rows:
        out.write(sep.join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return out.getvalue()
