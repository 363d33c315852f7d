from __future__ import annotations

import csv
import json
import shutil
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ValidationError
from .index import (SPLITS, UNASSIGNED,DatasetIndex, ImageRecord, LabelMask,
                    Polygon, RegionAnnotation)
from .raster import rasterize
from .taxonomy import ClassTaxonomy, read_taxonomy, write_taxonomy
from .via import parse_via

IMAGES_DIR = "images"
MASKS_DIR = "masks"
TAXONOMY_FILE = "taxonomy.txt"
SPLITS_FILE = "splits.csv"
ANNOTATIONS_FILE = "annotations.json"

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _mask_path(root: Path, image_id: str) -> Path:
    return root / MASKS_DIR / f"{image_id}.png"


def image_path(root: str | Path, record: ImageRecord) -> Path:
    return Path(root) / IMAGES_DIR / Path(record.file_path).name


def load_image(root: str | Path, record: ImageRecord) -> np.ndarray:
    with Image.open(image_path(root, record)) as img:
        return np.asarray(img.convert("RGB"))


def load_mask(root: str | Path, image_id: str) -> LabelMask:
    path = _mask_path(Path(root), image_id)
    if not path.exists():
        raise FileNotFoundError(f"no mask for image {image_id!r} at {path}")
    with Image.open(path) as img:
        if img.mode != "L":
            img = img.convert("L")
        return LabelMask(np.asarray(img))


def _write_mask(root: Path, record: ImageRecord) -> None:
    mask = rasterize(record.regions, record.width, record.height)
    Image.fromarray(mask.values, mode="L").save(_mask_path(root, record.image_id))


def _write_splits(root: Path, index: DatasetIndex) -> None:
    with open(root / SPLITS_FILE, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "split"])
        for record in index.records:
            writer.writerow([record.image_id, record.split])


def _write_annotations(root: Path, index: DatasetIndex) -> None:
    doc = {
        "version": 1,
        "images": [
            {
                "image_id": r.image_id,
                "file_name": Path(r.file_path).name,
                "width": r.width,
                "height": r.height,
                "regions": [
                    {"class_id": reg.class_id,
                     "points": [[x, y] for x, y in reg.polygon.points]}
                    for reg in r.regions
                ],
            }
            for r in index.records
        ],
    }
    with open(root / ANNOTATIONS_FILE, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def save_dataset(index: DatasetIndex, root: str | Path, *,
                 images: dict[str, np.ndarray] | None = None,
                 source_dir: str | Path | None = None) -> None:
    """Write a dataset directory: images/, masks/, taxonomy.txt, splits.csv.

    Image pixels come either from `images` (id -> RGB array, written as PNG)
    or are copied verbatim from `source_dir`. Masks are rasterized from the
    record regions and stored as single-channel PNGs of class ids. Polygon
    regions themselves are kept in annotations.json so downstream per-region
    work does not have to re-derive shapes from rasters.
    """
    root = Path(root)
    (root / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
    (root / MASKS_DIR).mkdir(parents=True, exist_ok=True)

    for record in index.records:
        if images is not None and record.image_id in images:
            arr = np.asarray(images[record.image_id], dtype=np.uint8)
            dest = root / IMAGES_DIR / f"{record.image_id}.png"
            Image.fromarray(arr).save(dest)
            record.file_path = dest.name
        elif source_dir is not None:
            src = Path(source_dir) / record.file_path
            if not src.exists():
                raise ValidationError(f"source image missing: {src}")
            dest = root / IMAGES_DIR / src.name
            shutil.copyfile(src, dest)
            record.file_path = dest.name
        else:
            raise ValidationError(
                f"no pixel source for image {record.image_id!r}; "
                "pass images= or source_dir=")
        _write_mask(root, record)

    write_taxonomy(index.taxonomy, root / TAXONOMY_FILE)
    _write_splits(root, index)
    _write_annotations(root, index)


def load_dataset(root: str | Path) -> DatasetIndex:
    """Read a dataset directory back into an index.

    annotations.json supplies regions and dimensions when present; otherwise
    records are reconstructed from the image files with empty region lists.
    """
    root = Path(root)
    taxonomy = read_taxonomy(root / TAXONOMY_FILE)

    splits: dict[str, str] = {}
    splits_path = root / SPLITS_FILE
    if splits_path.exists():
        with open(splits_path, newline="") as fh:
            for row in csv.DictReader(fh):
                split = row["split"]
                if split not in SPLITS and split != UNASSIGNED:
                    raise ValidationError(
                        f"{SPLITS_FILE}: unknown split {split!r} for {row['image_id']!r}")
                splits[row["image_id"]] = split

    records: list[ImageRecord] = []
    ann_path = root / ANNOTATIONS_FILE
    if ann_path.exists():
        with open(ann_path) as fh:
            doc = json.load(fh)
        for entry in doc["images"]:
            regions = [
                RegionAnnotation(
                    polygon=Polygon(points=tuple((float(x), float(y))
                                                 for x, y in reg["points"])),
                    class_id=int(reg["class_id"]))
                for reg in entry["regions"]
            ]
            records.append(ImageRecord(
                image_id=entry["image_id"], file_path=entry["file_name"],
                width=int(entry["width"]), height=int(entry["height"]),
                regions=regions,
                split=splits.get(entry["image_id"], UNASSIGNED)))
    else:
        for path in sorted((root / IMAGES_DIR).iterdir()):
            if path.suffix.lower() not in _IMAGE_SUFFIXES:
                continue
            with Image.open(path) as img:
                width, height = img.size
            records.append(ImageRecord(
                image_id=path.stem, file_path=path.name,
                width=width, height=height, regions=[],
                split=splits.get(path.stem, UNASSIGNED)))

    return DatasetIndex(taxonomy=taxonomy, records=records, root=str(root))


def build_dataset(annotations_path: str | Path, images_dir: str | Path,
                  out_dir: str | Path, taxonomy: ClassTaxonomy, *,
                  class_key: str = "food") -> DatasetIndex:
    """Turn a VIA annotation export plus its image files into a dataset directory."""
    text = Path(annotations_path).read_text()
    records = parse_via(text, taxonomy, class_key=class_key)

    images_dir = Path(images_dir)
    sized: list[ImageRecord] = []
    for record in records:
        src = images_dir / record.file_path
        if not src.exists():
            raise ValidationError(f"annotated image not found: {src}")
        with Image.open(src) as img:
            width, height = img.size
        sized.append(ImageRecord(image_id=record.image_id, file_path=record.file_path,
                                 width=width, height=height, regions=record.regions))

    index = DatasetIndex(taxonomy=taxonomy, records=sized)
    save_dataset(index, out_dir, source_dir=images_dir)
    return index


def validate_dataset(root: str | Path) -> list[str]:
    """Check a dataset directory; return a list of problems (empty = clean)."""
    root = Path(root)
    problems: list[str] = []
    for name in (TAXONOMY_FILE, IMAGES_DIR, MASKS_DIR):
        if not (root / name).exists():
            problems.append(f"missing {name}")
    if problems:
        return problems

    index = load_dataset(root)
    for record in index.records:
        img_file = image_path(root, record)
        if not img_file.exists():
            problems.append(f"{record.image_id}: image file missing")
            continue
        with Image.open(img_file) as img:
            if img.size != (record.width, record.height):
                problems.append(
                    f"{record.image_id}: image is {img.size}, "
                    f"index says {(record.width, record.height)}")
        mask_file = _mask_path(root, record.image_id)
        if not mask_file.exists():
            problems.append(f"{record.image_id}: mask missing")
            continue
        mask = load_mask(root, record.image_id)
        if (mask.width, mask.height) != (record.width, record.height):
            problems.append(
                f"{record.image_id}: mask is {(mask.width, mask.height)}, "
                f"image is {(record.width, record.height)}")
        try:
            mask.validate_against(index.taxonomy)
        except ValidationError as exc:
            problems.append(f"{record.image_id}: {exc}")
    return problems
