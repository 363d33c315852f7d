from __future__ import annotations

import warnings

import numpy as np

from .index import LabelMask, Polygon, RegionAnnotation

# Containment is evaluated at pixel centers: pixel (row, col) is tested at
# (col + 0.5, row + 0.5). The vectorized fill below and point_in_polygon use
# the same crossing-number expression so they agree bit for bit.


def point_in_polygon(px: float, py: float, polygon: Polygon) -> bool:
    """Crossing-number test: true when (px, py) falls inside the polygon.

    A crossing is counted for edge (i, j) when the edge straddles the
    horizontal line through py and the intersection lies strictly to the
    right of px. Points exactly on a horizontal edge are resolved by the
    half-open vertical rule.
    """
    pts = polygon.points
    inside = False
    j = len(pts) - 1
    for i in range(len(pts)):
        xi, yi = pts[i]
        xj, yj = pts[j]
        if (yi > py) != (yj > py) and px < (xj - xi) * (py - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def polygon_mask(polygon: Polygon, width: int, height: int) -> np.ndarray:
    """Boolean (height, width) array of pixels whose centers the polygon covers."""
    cols = np.arange(width, dtype=np.float64) + 0.5
    rows = np.arange(height, dtype=np.float64) + 0.5
    px = cols[np.newaxis, :]
    py = rows[:, np.newaxis]

    inside = np.zeros((height, width), dtype=bool)
    pts = polygon.points
    j = len(pts) - 1
    for i in range(len(pts)):
        xi, yi = pts[i]
        xj, yj = pts[j]
        straddles = (yi > py) != (yj > py)
        if np.any(straddles):
            with np.errstate(divide="ignore", invalid="ignore"):
                crossing = px < (xj - xi) * (py - yi) / (yj - yi) + xi
            inside ^= straddles & crossing
        j = i
    return inside


def rasterize(regions: list[RegionAnnotation], width: int, height: int) -> LabelMask:
    """Paint regions into a label mask in order; later regions overwrite earlier.

    Regions whose polygon covers no pixel center are skipped with a warning
    instead of silently vanishing into the mask.
    """
    values = np.zeros((height, width), dtype=np.uint8)
    for region in regions:
        covered = polygon_mask(region.polygon, width, height)
        if not covered.any():
            warnings.warn(
                f"region of class {region.class_id} covers no pixel centers; skipped",
                stacklevel=2,
            )
            continue
        values[covered] = region.class_id
    return LabelMask(values)
