from __future__ import annotations

import numpy as np

from ..dataset import LabelMask
from ..errors import ValidationError


def _runs_of(flat: np.ndarray, class_id: int) -> list[int]:
    hits = np.flatnonzero(flat == class_id)
    if hits.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(hits) != 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [hits.size - 1]))
    runs: list[int] = []
    for s, e in zip(starts, ends):
        runs.append(int(hits[s]))
        runs.append(int(hits[e] - hits[s] + 1))
    return runs


def encode_mask(mask: LabelMask) -> dict:
    """Per-class run-length encoding over row-major pixel order.

    Runs are 0-based [start, length, start, length, ...] pairs into the
    flattened raster; background is implicit (anything not covered by a run).
    """
    flat = mask.values.ravel()
    classes: dict[str, list[int]] = {}
    for class_id in np.unique(flat):
        if class_id == 0:
            continue
        classes[str(int(class_id))] = _runs_of(flat, int(class_id))
    return {"width": mask.width, "height": mask.height, "classes": classes}


def decode_mask(doc: dict) -> LabelMask:
    """Inverse of encode_mask; rejects malformed or out-of-range runs."""
    try:
        width = int(doc["width"])
        height = int(doc["height"])
        classes = doc["classes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed mask document: {exc}") from None
    if width <= 0 or height <= 0:
        raise ValidationError(f"bad mask dimensions {width}x{height}")

    flat = np.zeros(width * height, dtype=np.uint8)
    for key, runs in classes.items():
        class_id = int(key)
        if not (0 < class_id < 256):
            raise ValidationError(f"class id {class_id} out of range")
        if len(runs) % 2 != 0:
            raise ValidationError(f"class {class_id}: odd run list length")
        for i in range(0, len(runs), 2):
            start, length = int(runs[i]), int(runs[i + 1])
            if length <= 0 or start < 0 or start + length > flat.size:
                raise ValidationError(
                    f"class {class_id}: run ({start},{length}) outside raster")
            flat[start:start + length] = class_id
    return LabelMask(flat.reshape(height, width))
