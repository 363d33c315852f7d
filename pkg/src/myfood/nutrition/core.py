from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from ..dataset import ClassTaxonomy, TaxonomyError
from ..errors import MyfoodError, ValidationError
from ..modelhub import PredictionOutput

log = logging.getLogger("myfood.nutrition")

NUTRIENT_FIELDS = ("kcal", "protein", "carb", "fat")
TABLE_COLUMNS = ("class", "kcal_100g", "protein_100g", "carb_100g", "fat_100g")
CALIBRATION_COLUMNS = ("class", "grams_per_pixel")


class CompletenessError(MyfoodError):
    """A required class is missing from a configuration table."""


class EstimationError(MyfoodError):
    """A prediction references a class the tables cannot price."""


@dataclass(frozen=True)
class Nutrients:
    """One nutrient tuple. Values are exact rationals internally so scaling
    and summation commute with no rounding drift; convert to float only at
    the presentation boundary."""

    kcal: Fraction
    protein: Fraction
    carb: Fraction
    fat: Fraction

    def __add__(self, other: "Nutrients") -> "Nutrients":
        return Nutrients(kcal=self.kcal + other.kcal,
                         protein=self.protein + other.protein,
                         carb=self.carb + other.carb,
                         fat=self.fat + other.fat)

    def scaled(self, factor: Fraction) -> "Nutrients":
        return Nutrients(kcal=self.kcal * factor, protein=self.protein * factor,
                         carb=self.carb * factor, fat=self.fat * factor)

    def as_floats(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in NUTRIENT_FIELDS}

    @classmethod
    def zero(cls) -> "Nutrients":
        z = Fraction(0)
        return cls(kcal=z, protein=z, carb=z, fat=z)

    @classmethod
    def from_values(cls, kcal, protein, carb, fat) -> "Nutrients":
        return cls(kcal=_as_fraction(kcal), protein=_as_fraction(protein),
                   carb=_as_fraction(carb), fat=_as_fraction(fat))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # Go through the decimal text so 0.1 means 1/10, not the binary float.
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class NutrientProfile:
    class_id: int
    per_100g: Nutrients

    def __post_init__(self):
        for name in NUTRIENT_FIELDS:
            if getattr(self.per_100g, name) < 0:
                raise ValidationError(
                    f"class {self.class_id}: {name} per 100 g must be >= 0")


@dataclass(frozen=True)
class AreaCalibration:
    grams_per_pixel: dict[int, Fraction]

    def __post_init__(self):
        for class_id, factor in self.grams_per_pixel.items():
            if factor <= 0:
                raise ValidationError(
                    f"class {class_id}: grams_per_pixel must be positive, got {factor}")

    def factor(self, class_id: int) -> Fraction:
        if class_id not in self.grams_per_pixel:
            raise EstimationError(f"no area calibration for class {class_id}")
        return self.grams_per_pixel[class_id]


@dataclass(frozen=True)
class MealItem:
    class_id: int
    pixel_area: int
    grams: Fraction
    nutrients: Nutrients


@dataclass(frozen=True)
class MealEstimate:
    items: tuple[MealItem, ...]
    totals: Nutrients

    def __post_init__(self):
        summed = Nutrients.zero()
        for item in self.items:
            summed = summed + item.nutrients
        if summed != self.totals:
            raise ValidationError("meal totals do not equal the sum of its items")


def _read_source(source: str | Path) -> str:
    """A Path (or a one-line string) names a file; multi-line text is inline."""
    if isinstance(source, Path):
        return source.read_text()
    if "\n" in source:
        return source
    return Path(source).read_text()


def _data_rows(text: str, columns: tuple[str, ...], where: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != list(columns):
        raise ValidationError(
            f"{where}: expected header {','.join(columns)}, got {reader.fieldnames}")
    return list(reader)


def load_nutrition_table(source: str | Path, taxonomy: ClassTaxonomy) -> dict[int, NutrientProfile]:
    """Load per-100g profiles for every food class.

    The file is configuration: rows are taken verbatim. Comment lines (#)
    are ignored, a duplicated class keeps its last row with a logged warning,
    and a class present in the taxonomy but absent from the file is an error.
    """
    text = _read_source(source)
    profiles: dict[int, NutrientProfile] = {}
    for row in _data_rows(text, TABLE_COLUMNS, "nutrition table"):
        name = row["class"].strip()
        try:
            class_id = taxonomy.id_of(name)
        except TaxonomyError:
            raise ValidationError(f"nutrition table: unknown class {name!r}") from None
        if class_id in profiles:
            log.warning("nutrition table: duplicate row for %r; last row wins", name)
        profiles[class_id] = NutrientProfile(
            class_id=class_id,
            per_100g=Nutrients.from_values(row["kcal_100g"], row["protein_100g"],
                                           row["carb_100g"], row["fat_100g"]))
    missing = [taxonomy.name_of(cid) for cid in taxonomy.food_ids if cid not in profiles]
    if missing:
        raise CompletenessError(f"nutrition table missing classes: {missing}")
    return profiles


def load_calibration(source: str | Path, taxonomy: ClassTaxonomy) -> AreaCalibration:
    text = _read_source(source)
    factors: dict[int, Fraction] = {}
    for row in _data_rows(text, CALIBRATION_COLUMNS, "calibration table"):
        name = row["class"].strip()
        try:
            class_id = taxonomy.id_of(name)
        except TaxonomyError:
            raise ValidationError(f"calibration table: unknown class {name!r}") from None
        if class_id in factors:
            log.warning("calibration table: duplicate row for %r; last row wins", name)
        factors[class_id] = _as_fraction(row["grams_per_pixel"])
    return AreaCalibration(grams_per_pixel=factors)


def default_nutrition_table(taxonomy: ClassTaxonomy) -> dict[int, NutrientProfile]:
    text = resources.files("myfood").joinpath("data/nutrients.csv").read_text()
    return load_nutrition_table(text, taxonomy)


def default_calibration(taxonomy: ClassTaxonomy) -> AreaCalibration:
    text = resources.files("myfood").joinpath("data/calibration.csv").read_text()
    return load_calibration(text, taxonomy)


def estimate_meal(pred: PredictionOutput, table: dict[int, NutrientProfile],
                  calib: AreaCalibration, *,
                  taxonomy: ClassTaxonomy | None = None) -> MealEstimate:
    """Price a prediction: grams = pixel_area x grams_per_pixel, exactly.

    One item per food class with nonzero pixel area, ordered by class id.
    Nutrients scale linearly with grams from the per-100g profile.
    """
    values = pred.label_mask.values
    class_ids, counts = np.unique(values, return_counts=True)
    items: list[MealItem] = []
    for class_id, count in sorted(zip(class_ids.tolist(), counts.tolist())):
        if taxonomy is not None and class_id == taxonomy.background_id:
            continue
        if taxonomy is None and class_id == 0:
            continue
        if class_id not in table:
            raise EstimationError(f"no nutrient profile for class {class_id}")
        grams = Fraction(count) * calib.factor(class_id)
        nutrients = table[class_id].per_100g.scaled(grams / 100)
        items.append(MealItem(class_id=class_id, pixel_area=int(count),
                              grams=grams, nutrients=nutrients))

    totals = Nutrients.zero()
    for item in items:
        totals = totals + item.nutrients
    return MealEstimate(items=tuple(items), totals=totals)
