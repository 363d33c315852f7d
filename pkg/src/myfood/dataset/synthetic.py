from __future__ import annotations

import colorsys
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .index import DatasetIndex, ImageRecord, Polygon, RegionAnnotation, split_dataset
from .raster import polygon_mask
from .store import save_dataset
from .taxonomy import ClassTaxonomy, default_taxonomy

MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class FixtureSpec:
    """Parameters for the generated shape-on-noise fixture set."""

    n_images: int = 30
    side: int = 64
    max_regions: int = 3
    seed: int = 42
    color_jitter: float = 5.0
    pixel_noise: float = 2.0
    min_region_area: int = 60


def _food_color(class_id: int, n_foods: int) -> np.ndarray:
    """Well-separated hue-wheel color for a food class, as float RGB 0-255."""
    hue = (class_id - 1) / float(n_foods)
    r, g, b = colorsys.hsv_to_rgb(hue, 0.85, 0.95)
    return np.array([r * 255.0, g * 255.0, b * 255.0])


def _random_region_polygon(rng: np.random.Generator, side: int) -> Polygon:
    """Star-shaped polygon around a random center, clipped to the canvas."""
    cx, cy = rng.uniform(10, side - 10, 2)
    rx, ry = rng.uniform(7, side / 4, 2)
    n_vertices = int(rng.integers(5, 9))
    base = np.linspace(0.0, 2.0 * math.pi, n_vertices, endpoint=False)
    angles = base + rng.uniform(-0.25, 0.25, n_vertices)
    scales = rng.uniform(0.75, 1.0, n_vertices)
    points = []
    for angle, scale in zip(angles, scales):
        x = min(max(cx + rx * scale * math.cos(angle), 0.0), float(side))
        y = min(max(cy + ry * scale * math.sin(angle), 0.0), float(side))
        points.append((x, y))
    return Polygon(points=tuple(points))


def generate_image(rng: np.random.Generator, spec: FixtureSpec,
                   taxonomy: ClassTaxonomy) -> tuple[np.ndarray, list[RegionAnnotation]]:
    """One image: 1..max_regions non-overlapping colored shapes on dim noise."""
    side = spec.side
    img = np.empty((side, side, 3), np.float64)
    img[:] = rng.uniform(25, 60)
    occupied = np.zeros((side, side), dtype=bool)

    food_ids = np.array(taxonomy.food_ids)
    n = int(rng.integers(1, spec.max_regions + 1))
    classes = rng.choice(food_ids, size=n, replace=False)

    regions: list[RegionAnnotation] = []
    for cid in classes:
        for _ in range(20):
            polygon = _random_region_polygon(rng, side)
            covered = polygon_mask(polygon, side, side)
            if covered.sum() >= spec.min_region_area and not (occupied & covered).any():
                color = _food_color(int(cid), len(food_ids))
                img[covered] = color + rng.normal(0, spec.color_jitter, 3)
                occupied |= covered
                regions.append(RegionAnnotation(polygon=polygon, class_id=int(cid)))
                break

    img += rng.normal(0, spec.pixel_noise, img.shape)
    return np.clip(img, 0, 255).astype(np.uint8), regions


def generate_fixture(spec: FixtureSpec, out_dir: str | Path, *,
                     taxonomy: ClassTaxonomy | None = None,
                     split: str | None = None) -> DatasetIndex:
    """Generate a fixture dataset directory (images, masks, annotations).

    Shapes are stored as polygon regions, so the persisted masks go through
    the same rasterization path as any annotated dataset. With `split` given,
    every record is tagged with it; otherwise a standard 60/20/20 split is
    applied using the fixture seed. The generation parameters are written to
    manifest.json in the output directory.
    """
    taxonomy = taxonomy or default_taxonomy()
    rng = np.random.default_rng(spec.seed)

    records: list[ImageRecord] = []
    images: dict[str, np.ndarray] = {}
    for i in range(spec.n_images):
        img, regions = generate_image(rng, spec, taxonomy)
        image_id = f"synth_{i:04d}"
        records.append(ImageRecord(
            image_id=image_id, file_path=f"{image_id}.png",
            width=spec.side, height=spec.side, regions=regions,
            split=split or "unassigned"))
        images[image_id] = img

    index = DatasetIndex(taxonomy=taxonomy, records=records, root=str(out_dir))
    if split is None:
        index = split_dataset(index, (0.6, 0.2, 0.2), spec.seed)
    save_dataset(index, out_dir, images=images)

    manifest = {"format": 1, "kind": "synthetic-shapes", **asdict(spec)}
    with open(Path(out_dir) / MANIFEST_FILE, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    index.root = str(out_dir)
    return index


def load_fixture_spec(path: str | Path) -> FixtureSpec:
    """Read a manifest written by generate_fixture (extra keys ignored)."""
    with open(path) as fh:
        doc = json.load(fh)
    fields = {k: doc[k] for k in FixtureSpec.__dataclass_fields__ if k in doc}
    return FixtureSpec(**fields)
