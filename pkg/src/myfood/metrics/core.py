from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..dataset import ClassTaxonomy, LabelMask
from ..errors import ValidationError

METRIC_NAMES = ("iou", "ppv", "se", "sp", "bac")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v < 0:
                raise ValidationError(f"{f.name} must be non-negative, got {v}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(pred: LabelMask, gt: LabelMask, class_id: int) -> ConfusionCounts:
    """Binary per-class confusion counts over all pixels of a mask pair."""
    if (pred.height, pred.width) != (gt.height, gt.width):
        raise ValidationError(
            f"mask dimensions disagree: pred {(pred.height, pred.width)} "
            f"vs gt {(gt.height, gt.width)}")
    p = pred.values == class_id
    g = gt.values == class_id
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = p.size - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def iou(c: ConfusionCounts) -> float | None:
    """Intersection over union; None when the union is empty."""
    denom = c.tp + c.fn + c.fp
    return c.tp / denom if denom else None


def ppv(c: ConfusionCounts) -> float | None:
    """Positive predictive value; None when nothing was predicted positive."""
    denom = c.tp + c.fp
    return c.tp / denom if denom else None


def sensitivity(c: ConfusionCounts) -> float | None:
    """Recall over ground-truth positives; None when the class is absent from GT."""
    denom = c.tp + c.fn
    return c.tp / denom if denom else None


def specificity(c: ConfusionCounts) -> float | None:
    """Recall over ground-truth negatives; None when there are none."""
    denom = c.tn + c.fp
    return c.tn / denom if denom else None


def balanced_accuracy(se: float | None, sp: float | None) -> float | None:
    """Mean of sensitivity and specificity; None when either is undefined."""
    if se is None or sp is None:
        return None
    return (se + sp) / 2.0


@dataclass(frozen=True)
class MetricValues:
    """The five per-class scores; None marks an undefined (zero-denominator) value."""

    iou: float | None
    ppv: float | None
    se: float | None
    sp: float | None
    bac: float | None

    def __post_init__(self):
        for name in METRIC_NAMES:
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name}={v} outside [0,1]")

    def get(self, name: str) -> float | None:
        if name not in METRIC_NAMES:
            raise KeyError(name)
        return getattr(self, name)


UNDEFINED_METRICS = MetricValues(iou=None, ppv=None, se=None, sp=None, bac=None)


def metric_values(c: ConfusionCounts) -> MetricValues:
    se = sensitivity(c)
    sp = specificity(c)
    return MetricValues(iou=iou(c), ppv=ppv(c), se=se, sp=sp,
                        bac=balanced_accuracy(se, sp))


def evaluate_image(pred: LabelMask, gt: LabelMask,
                   taxonomy: ClassTaxonomy) -> dict[int, MetricValues]:
    """Score every food class of a prediction against the ground truth.

    A class that appears in neither mask carries no signal for this image, so
    its entry is fully undefined rather than reporting the trivially perfect
    specificity — otherwise absent classes would inflate aggregate means.
    """
    pred.validate_against(taxonomy)
    gt.validate_against(taxonomy)
    present = set(np.unique(pred.values)) | set(np.unique(gt.values))
    out: dict[int, MetricValues] = {}
    for class_id in taxonomy.food_ids:
        if class_id not in present:
            out[class_id] = UNDEFINED_METRICS
        else:
            out[class_id] = metric_values(confusion(pred, gt, class_id))
    return out
