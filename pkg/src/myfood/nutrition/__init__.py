"""Portion and nutrient estimation from segmentation output."""

from .core import (CALIBRATION_COLUMNS, NUTRIENT_FIELDS, TABLE_COLUMNS,
                   AreaCalibration, CompletenessError, EstimationError, MealEstimate,
                   MealItem, NutrientProfile, Nutrients, default_calibration,
                   default_nutrition_table, estimate_meal, load_calibration,
                   load_nutrition_table)

__all__ = [
    "CALIBRATION_COLUMNS", "NUTRIENT_FIELDS", "TABLE_COLUMNS", "AreaCalibration",
    "CompletenessError", "EstimationError", "MealEstimate", "MealItem",
    "NutrientProfile", "Nutrients", "default_calibration", "default_nutrition_table",
    "estimate_meal", "load_calibration", "load_nutrition_table",
]
