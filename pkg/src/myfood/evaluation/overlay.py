from __future__ import annotations

import colorsys

import numpy as np
from PIL import Image, ImageDraw

from ..dataset import ClassTaxonomy
from ..errors import ValidationError
from ..modelhub import PredictionOutput

DEFAULT_ALPHA = 0.45


def class_color(class_id: int) -> tuple[int, int, int]:
    """Deterministic, well-spread RGB color for a class id."""
    hue = (class_id * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.78, 0.95)
    return int(r * 255), int(g * 255), int(b * 255)


def render_overlay(image: np.ndarray, pred: PredictionOutput,
                   taxonomy: ClassTaxonomy, *, alpha: float = DEFAULT_ALPHA,
                   legend: bool = True) -> np.ndarray:
    """Tint predicted regions with per-class colors and add a legend.

    Background pixels pass through untouched, so a prediction with no
    foreground returns the input image unchanged.
    """
    image = np.asarray(image)
    values = pred.label_mask.values
    if image.shape[:2] != values.shape:
        raise ValidationError(
            f"image {image.shape[:2]} and prediction {values.shape} disagree")

    present = [cid for cid in sorted(np.unique(values)) if cid != taxonomy.background_id]
    if not present:
        return image.copy()

    out = image.astype(np.float64)
    for cid in present:
        mask = values == cid
        color = np.array(class_color(int(cid)), dtype=np.float64)
        out[mask] = (1.0 - alpha) * out[mask] + alpha * color
    out = np.clip(out, 0, 255).astype(np.uint8)

    if legend:
        pil = Image.fromarray(out)
        draw = ImageDraw.Draw(pil)
        for i, cid in enumerate(present):
            y = 3 + i * 12
            draw.rectangle([3, y, 11, y + 8], fill=class_color(int(cid)),
                           outline=(0, 0, 0))
            draw.text((14, y - 2), taxonomy.name_of(int(cid)), fill=(255, 255, 255))
        out = np.asarray(pil)
    return out
