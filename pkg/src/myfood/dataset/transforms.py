from __future__ import annotations

import numpy as np
from PIL import Image

from ..errors import ValidationError
from .index import LabelMask


def resize_pair(image: np.ndarray, mask: LabelMask, side: int) -> tuple[np.ndarray, LabelMask]:
    """Resize an image and its label mask together to side x side.

    The image is resampled bilinearly; the mask uses nearest-neighbor so the
    output can only contain class ids that were already present.
    """
    if side <= 0:
        raise ValidationError(f"target side must be positive, got {side}")
    image = np.asarray(image)
    if image.shape[:2] != (mask.height, mask.width):
        raise ValidationError(
            f"image {image.shape[:2]} and mask {(mask.height, mask.width)} disagree")
    if image.shape[:2] == (side, side):
        return image, mask

    pil_img = Image.fromarray(image)
    out_img = np.asarray(pil_img.resize((side, side), Image.BILINEAR))
    pil_mask = Image.fromarray(mask.values)
    out_mask = np.asarray(pil_mask.resize((side, side), Image.NEAREST))
    return out_img, LabelMask(out_mask)
