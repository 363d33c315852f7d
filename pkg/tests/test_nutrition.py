from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myfood.dataset import LabelMask
from myfood.errors import ValidationError
from myfood.modelhub import PredictionOutput
from myfood.nutrition import (AreaCalibration, CompletenessError,
                              EstimationError, Nutrients, default_calibration,
                              default_nutrition_table, estimate_meal,
                              load_calibration, load_nutrition_table)

ALL_FOODS = ("rice", "beans", "boiled egg", "fried egg", "pasta", "salad",
             "roasted meat", "apple", "chicken breast")


def _table_text(rows):
    lines = ["class,kcal_100g,protein_100g,carb_100g,fat_100g"]
    lines += [",".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _full_table_text(**overrides):
    rows = [(name, 100, 10, 10, 10) for name in ALL_FOODS]
    rows = [overrides.get(r[0], r) for r in rows]
    return _table_text(rows)


def _calib_text(factor="0.1"):
    lines = ["class,grams_per_pixel"]
    lines += [f"{name},{factor}" for name in ALL_FOODS]
    return "\n".join(lines) + "\n"


def _output_with(class_id: int, pixels: int, side: int = 40) -> PredictionOutput:
    mask = np.zeros((side, side), np.uint8)
    mask.flat[:pixels] = class_id
    return PredictionOutput(label_mask=LabelMask(mask))


# ------------------------------------------------------------------ loading

def test_default_tables_cover_all_foods(taxonomy):
    table = default_nutrition_table(taxonomy)
    assert set(table) == set(taxonomy.food_ids)
    calib = default_calibration(taxonomy)
    for cid in taxonomy.food_ids:
        assert calib.factor(cid) > 0
    # spot-check one row against its source file
    rice = table[taxonomy.id_of("rice")]
    assert rice.per_100g.kcal == Fraction(130)
    assert rice.per_100g.protein == Fraction("2.7")


def test_load_table_missing_class_is_completeness_error(taxonomy):
    rows = [(name, 100, 10, 10, 10) for name in ALL_FOODS if name != "beans"]
    with pytest.raises(CompletenessError, match="beans"):
        load_nutrition_table(_table_text(rows), taxonomy)


def test_load_table_unknown_class_rejected(taxonomy):
    text = _full_table_text() + "pizza,300,11,33,9\n"
    with pytest.raises(ValidationError, match="pizza"):
        load_nutrition_table(text, taxonomy)


def test_load_table_negative_value_rejected(taxonomy):
    text = _full_table_text(rice=("rice", -5, 1, 1, 1))
    with pytest.raises(ValidationError):
        load_nutrition_table(text, taxonomy)


def test_load_table_duplicate_keeps_last_and_warns(taxonomy, caplog):
    text = _full_table_text() + "rice,200,20,20,20\n"
    with caplog.at_level(logging.WARNING, logger="myfood.nutrition"):
        table = load_nutrition_table(text, taxonomy)
    assert table[taxonomy.id_of("rice")].per_100g.kcal == Fraction(200)
    assert any("rice" in record.message for record in caplog.records)


def test_load_table_wrong_header(taxonomy):
    with pytest.raises(ValidationError, match="header"):
        load_nutrition_table("food,kcal\nrice,1\n", taxonomy)


def test_load_table_comments_and_blanks_ignored(taxonomy):
    text = "# comment\n\n" + _full_table_text()
    table = load_nutrition_table(text, taxonomy)
    assert len(table) == 9


def test_load_calibration_zero_factor_rejected(taxonomy):
    with pytest.raises(ValidationError):
        load_calibration(_calib_text(factor="0"), taxonomy)


def test_load_table_from_file(tmp_path, taxonomy):
    path = tmp_path / "nutrients.csv"
    path.write_text(_full_table_text())
    table = load_nutrition_table(path, taxonomy)
    assert len(table) == 9


# ------------------------------------------------------------------ estimate

def test_estimate_all_background_is_empty(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = load_calibration(_calib_text(), taxonomy)
    est = estimate_meal(_output_with(0, 0), table, calib, taxonomy=taxonomy)
    assert est.items == ()
    assert est.totals == Nutrients.zero()


def test_estimate_exact_grams_and_nutrients(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = load_calibration(_calib_text(factor="0.1"), taxonomy)
    est = estimate_meal(_output_with(1, 1000), table, calib, taxonomy=taxonomy)
    assert len(est.items) == 1
    item = est.items[0]
    assert item.pixel_area == 1000
    assert item.grams == Fraction(100)  # 1000 px * 0.1 g/px, exactly
    assert item.nutrients.kcal == Fraction(100)  # exactly the per-100g value
    assert est.totals == item.nutrients


def test_estimate_items_sorted_by_class(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = load_calibration(_calib_text(), taxonomy)
    mask = np.zeros((10, 10), np.uint8)
    mask[0] = 5
    mask[1] = 2
    est = estimate_meal(PredictionOutput(label_mask=LabelMask(mask)),
                        table, calib, taxonomy=taxonomy)
    assert [item.class_id for item in est.items] == [2, 5]


def test_estimate_missing_profile_names_class(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    del table[3]
    calib = load_calibration(_calib_text(), taxonomy)
    with pytest.raises(EstimationError, match="boiled egg|class 3"):
        estimate_meal(_output_with(3, 5), table, calib, taxonomy=taxonomy)


def test_estimate_missing_calibration_names_class(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = AreaCalibration(grams_per_pixel={1: Fraction(1, 10)})
    with pytest.raises(EstimationError):
        estimate_meal(_output_with(2, 5), table, calib, taxonomy=taxonomy)


# ------------------------------------------------------------------ linearity

@settings(max_examples=60, deadline=None)
@given(pixels=st.integers(1, 1000), k=st.sampled_from([2, 10]))
def test_scaling_pixel_area_scales_every_nutrient_exactly(pixels, k):
    from myfood.dataset import default_taxonomy
    taxonomy = default_taxonomy()
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = load_calibration(_calib_text(factor="0.003"), taxonomy)
    small = estimate_meal(_output_with(4, pixels, side=110), table, calib,
                          taxonomy=taxonomy)
    large = estimate_meal(_output_with(4, pixels * k, side=110), table, calib,
                          taxonomy=taxonomy)
    assert large.items[0].grams == k * small.items[0].grams
    for name in ("kcal", "protein", "carb", "fat"):
        assert getattr(large.totals, name) == k * getattr(small.totals, name)


def test_two_foods_add_exactly(taxonomy):
    table = load_nutrition_table(_full_table_text(), taxonomy)
    calib = load_calibration(_calib_text(factor="0.007"), taxonomy)
    mask = np.zeros((20, 20), np.uint8)
    mask[:3] = 1
    mask[3:8] = 7
    both = estimate_meal(PredictionOutput(label_mask=LabelMask(mask)),
                         table, calib, taxonomy=taxonomy)
    only_1 = estimate_meal(_output_with(1, 60, side=20), table, calib,
                           taxonomy=taxonomy)
    only_7 = estimate_meal(_output_with(7, 100, side=20), table, calib,
                           taxonomy=taxonomy)
    assert both.totals == only_1.totals + only_7.totals


def test_fraction_arithmetic_has_no_float_drift():
    # 0.1 is not representable in binary floating point; the table parser
    # must treat it as the decimal 1/10 so 3 * (1000 px * 0.1) is exactly 300.
    n = Nutrients.from_values("0.1", "0.1", "0.1", "0.1")
    tripled = n.scaled(Fraction(3))
    assert tripled.kcal == Fraction(3, 10)
    assert float(tripled.kcal) != 0.1 * 3 or tripled.kcal == Fraction(3, 10)


def test_nutrients_reject_bad_profile():
    from myfood.nutrition import NutrientProfile
    with pytest.raises(ValidationError):
        NutrientProfile(class_id=1,
                        per_100g=Nutrients.from_values(-1, 0, 0, 0))
