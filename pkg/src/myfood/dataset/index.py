from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import MyfoodError, ValidationError
from .taxonomy import ClassTaxonomy


class AnnotationError(MyfoodError):
    """An annotation violates its structural invariants."""


SPLITS = ("train", "validation", "test")
UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class Polygon:
    """Closed polygon given as (x, y) vertices in pixel coordinates."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) < 3:
            raise AnnotationError(f"polygon needs at least 3 points, got {len(self.points)}")
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise AnnotationError("polygon coordinates must be finite")
            if x < 0 or y < 0:
                raise AnnotationError("polygon coordinates must be non-negative")

    def clipped(self, width: float, height: float) -> "Polygon":
        pts = tuple((min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height)))
                    for x, y in self.points)
        return Polygon(points=pts)

    def area(self) -> float:
        """Shoelace area; zero for degenerate polygons."""
        total = 0.0
        pts = self.points
        for i in range(len(pts)):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % len(pts)]
            total += x1 * y2 - x2 * y1
        return abs(total) / 2.0


@dataclass(frozen=True)
class RegionAnnotation:
    polygon: Polygon
    class_id: int

    def validate(self, taxonomy: ClassTaxonomy) -> None:
        if self.class_id not in taxonomy:
            raise AnnotationError(f"class id {self.class_id} not in taxonomy")
        if self.class_id == taxonomy.background_id:
            raise AnnotationError("regions may not be labeled background")


@dataclass
class ImageRecord:
    image_id: str
    file_path: str
    width: int
    height: int
    regions: list[RegionAnnotation] = field(default_factory=list)
    split: str = UNASSIGNED

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"image {self.image_id}: dimensions must be positive")
        if self.split not in SPLITS and self.split != UNASSIGNED:
            raise ValidationError(f"image {self.image_id}: unknown split {self.split!r}")
        # Keep every polygon point within [0,width]x[0,height].
        self.regions = [
            RegionAnnotation(polygon=r.polygon.clipped(self.width, self.height),
                             class_id=r.class_id)
            for r in self.regions
        ]

    @property
    def region_class_ids(self) -> set[int]:
        return {r.class_id for r in self.regions}


class LabelMask:
    """Per-pixel class-id raster, shape (height, width), one byte per pixel."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values)
        if values.ndim != 2:
            raise ValidationError(f"label mask must be 2-D, got shape {values.shape}")
        self.values = values.astype(np.uint8, copy=False)

    @classmethod
    def background(cls, width: int, height: int) -> "LabelMask":
        return cls(np.zeros((height, width), dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def class_ids(self) -> list[int]:
        return sorted(int(v) for v in np.unique(self.values))

    def pixel_area(self, class_id: int) -> int:
        return int(np.count_nonzero(self.values == class_id))

    def validate_against(self, taxonomy: ClassTaxonomy) -> None:
        bad = [cid for cid in self.class_ids() if cid not in taxonomy]
        if bad:
            raise ValidationError(f"mask contains ids outside the taxonomy: {bad}")

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelMask) and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"LabelMask({self.height}x{self.width}, classes={self.class_ids()})"


@dataclass
class DatasetIndex:
    taxonomy: ClassTaxonomy
    records: list[ImageRecord]
    split_seed: int | None = None
    root: str | None = None

    def __post_init__(self):
        ids = [r.image_id for r in self.records]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate image ids: {dupes}")

    def record(self, image_id: str) -> ImageRecord:
        for r in self.records:
            if r.image_id == image_id:
                return r
        raise KeyError(image_id)

    def split_records(self, split: str) -> list[ImageRecord]:
        return [r for r in self.records if r.split == split]


def _split_rank(image_id: str, seed: int) -> str:
    return hashlib.sha256(f"{seed}:{image_id}".encode("utf-8")).hexdigest()


def _apportion(n: int, ratios: tuple[float, float, float]) -> list[int]:
    """Largest-remainder apportionment; each count within 1 of n*ratio."""
    targets = [n * r for r in ratios]
    counts = [int(math.floor(t)) for t in targets]
    remainder = n - sum(counts)
    order = sorted(range(3), key=lambda i: (-(targets[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def split_dataset(index: DatasetIndex, ratios: tuple[float, float, float],
                  seed: int) -> DatasetIndex:
    """Assign every record to train/validation/test.

    Records are ranked by a hash of (seed, image_id) and the ranked order is
    cut at the ratio boundaries, so the assignment depends only on the image
    id set, the ratios, and the seed. Growing the dataset leaves most
    existing assignments in place.
    """
    if len(ratios) != 3:
        raise ValidationError(f"expected 3 split ratios, got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise ValidationError(f"split ratios must be positive, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationError(f"split ratios must sum to 1, got sum {sum(ratios)}")

    ranked = sorted(index.records, key=lambda r: (_split_rank(r.image_id, seed), r.image_id))
    counts = _apportion(len(ranked), tuple(ratios))
    assignment: dict[str, str] = {}
    cursor = 0
    for split, count in zip(SPLITS, counts):
        for record in ranked[cursor:cursor + count]:
            assignment[record.image_id] = split
        cursor += count

    new_records = [replace_split(r, assignment[r.image_id]) for r in index.records]
    return DatasetIndex(taxonomy=index.taxonomy, records=new_records,
                        split_seed=seed, root=index.root)


def replace_split(record: ImageRecord, split: str) -> ImageRecord:
    return ImageRecord(image_id=record.image_id, file_path=record.file_path,
                       width=record.width, height=record.height,
                       regions=record.regions, split=split)


@dataclass(frozen=True)
class DatasetStats:
    total_images: int
    per_class_images: dict[int, int]
    per_split: dict[str, int]


def dataset_stats(index: DatasetIndex) -> DatasetStats:
    """Count images per class (at least one region of it) and per split."""
    per_class = {cid: 0 for cid in index.taxonomy.food_ids}
    per_split = {split: 0 for split in SPLITS + (UNASSIGNED,)}
    for record in index.records:
        per_split[record.split] += 1
        for cid in record.region_class_ids:
            per_class[cid] += 1
    return DatasetStats(total_images=len(index.records),
                        per_class_images=per_class, per_split=per_split)
