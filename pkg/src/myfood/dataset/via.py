from __future__ import annotations

import json
from typing import Any

from ..errors import MyfoodError
from .index import AnnotationError, ImageRecord, Polygon, RegionAnnotation
from .taxonomy import ClassTaxonomy, TaxonomyError


class ViaParseError(MyfoodError):
    """The annotation document is not in the expected polygon-export shape."""


def _regions_of(entry: dict[str, Any]) -> list[dict[str, Any]]:
    regions = entry.get("regions", [])
    # Older exports keep regions as an index-keyed object instead of a list.
    if isinstance(regions, dict):
        regions = [regions[k] for k in sorted(regions, key=lambda s: (len(s), s))]
    if not isinstance(regions, list):
        raise ViaParseError(f"regions must be a list or mapping, got {type(regions).__name__}")
    return regions


def _parse_region(raw: dict[str, Any], taxonomy: ClassTaxonomy, class_key: str,
                  where: str) -> RegionAnnotation | None:
    shape = raw.get("shape_attributes", {})
    name = shape.get("name")
    if name != "polygon":
        raise ViaParseError(f"{where}: unsupported region shape {name!r} (only polygon)")
    xs = shape.get("all_points_x")
    ys = shape.get("all_points_y")
    if not isinstance(xs, list) or not isinstance(ys, list) or len(xs) != len(ys):
        raise ViaParseError(f"{where}: all_points_x/all_points_y must be equal-length lists")

    attrs = raw.get("region_attributes", {})
    label = attrs.get(class_key)
    if label is None:
        raise ViaParseError(f"{where}: region has no {class_key!r} attribute")
    try:
        class_id = taxonomy.id_of(str(label))
    except KeyError:
        raise TaxonomyError(f"{where}: unknown class label {label!r}") from None

    try:
        polygon = Polygon(points=tuple((float(x), float(y)) for x, y in zip(xs, ys)))
    except (TypeError, ValueError) as exc:
        raise ViaParseError(f"{where}: bad polygon coordinates: {exc}") from None
    except AnnotationError as exc:
        raise AnnotationError(f"{where}: {exc}") from None
    return RegionAnnotation(polygon=polygon, class_id=class_id)


def parse_via(text: str, taxonomy: ClassTaxonomy, *, class_key: str = "food",
              default_size: tuple[int, int] = (512, 512)) -> list[ImageRecord]:
    """Parse a VGG Image Annotator polygon-project export into image records.

    Accepts both the bare ``{key: entry}`` export and the project save file
    that nests it under ``_via_img_metadata``. The per-region class label is
    read from ``region_attributes[class_key]`` and must name a taxonomy
    entry. The annotator does not store image dimensions, so records come
    back sized ``default_size`` (the normalized on-disk size); callers that
    have the image files overwrite width/height from them.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ViaParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ViaParseError("top level must be an object")
    if "_via_img_metadata" in doc:
        doc = doc["_via_img_metadata"]
        if not isinstance(doc, dict):
            raise ViaParseError("_via_img_metadata must be an object")

    records: list[ImageRecord] = []
    for key in sorted(doc):
        if key.startswith("_via_"):
            continue
        entry = doc[key]
        if not isinstance(entry, dict):
            raise ViaParseError(f"entry {key!r} must be an object")
        filename = entry.get("filename")
        if not filename or not isinstance(filename, str):
            raise ViaParseError(f"entry {key!r} has no filename")

        regions = []
        for i, raw in enumerate(_regions_of(entry)):
            region = _parse_region(raw, taxonomy, class_key, f"{filename} region {i}")
            if region is not None:
                regions.append(region)

        image_id = filename.rsplit(".", 1)[0]
        records.append(ImageRecord(image_id=image_id, file_path=filename,
                                   width=default_size[0], height=default_size[1],
                                   regions=regions))

    ids = [r.image_id for r in records]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ViaParseError(f"duplicate image ids after stem extraction: {dupes}")
    return records
