"""Dataset handling: taxonomy, annotations, rasterization, splits, storage."""

from .index import (SPLITS, UNASSIGNED, AnnotationError, DatasetIndex, DatasetStats,
                    ImageRecord, LabelMask, Polygon, RegionAnnotation, dataset_stats,
                    split_dataset)
from .raster import point_in_polygon, polygon_mask, rasterize
from .store import (build_dataset, image_path, load_dataset, load_image, load_mask,
                    save_dataset, validate_dataset)
from .synthetic import FixtureSpec, generate_fixture, load_fixture_spec
from .taxonomy import (BACKGROUND_NAME, DEFAULT_FOOD_NAMES, ClassTaxonomy,
                       TaxonomyError, default_taxonomy, read_taxonomy,
                       taxonomy_from_names, write_taxonomy)
from .transforms import resize_pair
from .via import ViaParseError, parse_via

__all__ = [
    "SPLITS", "UNASSIGNED", "AnnotationError", "DatasetIndex", "DatasetStats",
    "ImageRecord", "LabelMask", "Polygon", "RegionAnnotation", "dataset_stats",
    "split_dataset", "point_in_polygon", "polygon_mask", "rasterize",
    "build_dataset", "image_path", "load_dataset", "load_image", "load_mask",
    "save_dataset", "validate_dataset", "FixtureSpec", "generate_fixture",
    "load_fixture_spec", "BACKGROUND_NAME", "DEFAULT_FOOD_NAMES", "ClassTaxonomy",
    "TaxonomyError", "default_taxonomy", "read_taxonomy", "taxonomy_from_names",
    "write_taxonomy", "resize_pair", "ViaParseError", "parse_via",
]
