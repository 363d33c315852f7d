from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from myfood.dataset import LabelMask, default_taxonomy
from myfood.errors import ValidationError
from myfood.metrics import (METRIC_NAMES, UNDEFINED_METRICS, AggregateReport,
                            ConfusionCounts, MetricStat, MetricValues, aggregate,
                            balanced_accuracy, confusion, evaluate_image,
                            format_mean_std, format_std, format_table, iou,
                            metric_values, ppv, report_csv, sensitivity,
                            specificity)

from conftest import random_mask_pair


# ------------------------------------------------------------------ oracles
# Two independent re-derivations of the confusion quantities: a per-pixel
# python loop, and a set-based construction. The implementation must agree
# with the loop exactly and with the set formulation to float precision.

def _loop_confusion(pred, gt, class_id):
    tp = fp = tn = fn = 0
    for r in range(pred.shape[0]):
        for c in range(pred.shape[1]):
            p = pred[r, c] == class_id
            g = gt[r, c] == class_id
            if p and g:
                tp += 1
            elif p and not g:
                fp += 1
            elif not p and g:
                fn += 1
            else:
                tn += 1
    return tp, fp, tn, fn


def _set_metrics(pred, gt, class_id):
    coords_p = {(r, c) for r in range(pred.shape[0]) for c in range(pred.shape[1])
                if pred[r, c] == class_id}
    coords_g = {(r, c) for r in range(gt.shape[0]) for c in range(gt.shape[1])
                if gt[r, c] == class_id}
    everything = {(r, c) for r in range(pred.shape[0])
                  for c in range(pred.shape[1])}
    union = coords_p | coords_g
    inter = coords_p & coords_g
    out = {}
    out["iou"] = len(inter) / len(union) if union else None
    out["ppv"] = len(inter) / len(coords_p) if coords_p else None
    out["se"] = len(inter) / len(coords_g) if coords_g else None
    neg_g = everything - coords_g
    out["sp"] = len(neg_g - coords_p) / len(neg_g) if neg_g else None
    if out["se"] is None or out["sp"] is None:
        out["bac"] = None
    else:
        out["bac"] = (out["se"] + out["sp"]) / 2
    return out


def test_confusion_matches_pixel_loop(rng):
    for _ in range(60):
        pred, gt = random_mask_pair(rng)
        class_id = int(rng.integers(0, 10))
        counts = confusion(LabelMask(pred), LabelMask(gt), class_id)
        assert (counts.tp, counts.fp, counts.tn, counts.fn) == \
            _loop_confusion(pred, gt, class_id)


def test_metrics_match_set_oracle(rng):
    for _ in range(60):
        pred, gt = random_mask_pair(rng)
        class_id = int(rng.integers(0, 10))
        expected = _set_metrics(pred, gt, class_id)
        values = metric_values(confusion(LabelMask(pred), LabelMask(gt), class_id))
        for name in METRIC_NAMES:
            want = expected[name]
            got = values.get(name)
            if want is None:
                assert got is None, name
            else:
                assert got == pytest.approx(want, abs=1e-12), name


# ------------------------------------------------------------------ formulas

def test_formula_spot_checks():
    counts = ConfusionCounts(tp=6, fp=4, tn=0, fn=2)
    assert iou(counts) == pytest.approx(0.5)
    assert ppv(counts) == pytest.approx(0.6)
    assert sensitivity(counts) == pytest.approx(0.75)
    assert specificity(counts) == pytest.approx(0.0)
    assert balanced_accuracy(sensitivity(counts), specificity(counts)) == \
        pytest.approx(0.375)


def test_balanced_accuracy_known_pair():
    assert balanced_accuracy(0.81, 0.99) == pytest.approx(0.90)
    assert balanced_accuracy(None, 0.5) is None
    assert balanced_accuracy(0.5, None) is None


def test_zero_denominators_yield_none():
    nothing = ConfusionCounts(tp=0, fp=0, tn=9, fn=0)
    assert iou(nothing) is None
    assert ppv(nothing) is None
    assert sensitivity(nothing) is None
    assert specificity(nothing) == 1.0
    everything = ConfusionCounts(tp=9, fp=0, tn=0, fn=0)
    assert specificity(everything) is None


def test_confusion_counts_validation():
    with pytest.raises(ValidationError):
        ConfusionCounts(tp=-1, fp=0, tn=0, fn=0)
    counts = ConfusionCounts(tp=1, fp=2, tn=3, fn=4)
    assert counts.total == 10


def test_confusion_rejects_shape_mismatch():
    with pytest.raises(ValidationError):
        confusion(LabelMask(np.zeros((2, 2), np.uint8)), LabelMask(np.zeros((2, 3), np.uint8)), 1)


# ------------------------------------------------------------------ invariants

mask_pairs = st.integers(1, 8).flatmap(
    lambda h: st.integers(1, 8).flatmap(
        lambda w: st.tuples(
            arrays(np.uint8, (h, w), elements=st.integers(0, 9)),
            arrays(np.uint8, (h, w), elements=st.integers(0, 9)),
        )))


@settings(max_examples=200, deadline=None)
@given(pair=mask_pairs, class_id=st.integers(0, 9))
def test_metric_ranges_and_orderings(pair, class_id):
    pred, gt = pair
    counts = confusion(LabelMask(pred), LabelMask(gt), class_id)
    assert counts.total == pred.size
    values = metric_values(counts)
    for name in METRIC_NAMES:
        v = values.get(name)
        assert v is None or 0.0 <= v <= 1.0
    if values.iou is not None:
        if values.ppv is not None:
            assert values.iou <= values.ppv + 1e-12
        if values.se is not None:
            assert values.iou <= values.se + 1e-12


@settings(max_examples=100, deadline=None)
@given(pair=mask_pairs, class_id=st.integers(0, 9))
def test_swapping_pred_and_gt_transposes_counts(pair, class_id):
    pred, gt = pair
    a = confusion(LabelMask(pred), LabelMask(gt), class_id)
    b = confusion(LabelMask(gt), LabelMask(pred), class_id)
    assert (a.tp, a.tn) == (b.tp, b.tn)
    assert a.fp == b.fn and a.fn == b.fp
    va, vb = metric_values(a), metric_values(b)
    assert va.iou == vb.iou
    assert va.ppv == vb.se and va.se == vb.ppv


def test_perfect_prediction_is_all_ones(rng):
    gt = rng.integers(0, 3, size=(6, 6)).astype(np.uint8)
    gt[0, 0] = 1
    gt[0, 1] = 0
    values = metric_values(confusion(LabelMask(gt), LabelMask(gt), 1))
    assert values == MetricValues(iou=1.0, ppv=1.0, se=1.0, sp=1.0, bac=1.0)


# ------------------------------------------------------------------ evaluate_image

def test_evaluate_image_perfect(taxonomy, rng):
    gt = rng.integers(0, 4, size=(10, 10)).astype(np.uint8)
    results = evaluate_image(LabelMask(gt), LabelMask(gt), taxonomy)
    assert set(results) == set(taxonomy.food_ids)
    for cid in np.unique(gt):
        if cid == 0:
            continue
        assert results[int(cid)].iou == 1.0


def test_evaluate_image_absent_class_is_undefined(taxonomy):
    pred = np.zeros((4, 4), np.uint8)
    gt = np.zeros((4, 4), np.uint8)
    gt[0, 0] = 2
    results = evaluate_image(LabelMask(pred), LabelMask(gt), taxonomy)
    # class 5 appears in neither mask: no defined metrics at all
    assert results[5] == UNDEFINED_METRICS
    # class 2 is missed entirely: recall is 0, precision undefined
    assert results[2].se == 0.0
    assert results[2].ppv is None
    assert results[2].iou == 0.0


def test_evaluate_image_rejects_unknown_ids(taxonomy):
    bad = np.full((2, 2), 99, np.uint8)
    with pytest.raises(ValidationError):
        evaluate_image(LabelMask(bad), LabelMask(np.zeros((2, 2), np.uint8)), taxonomy)


# ------------------------------------------------------------------ aggregate

def _mv(**kwargs):
    base = dict(iou=None, ppv=None, se=None, sp=None, bac=None)
    base.update(kwargs)
    return MetricValues(**base)


def test_aggregate_mean_and_population_std():
    samples = [(1, _mv(iou=0.6)), (1, _mv(iou=0.8))]
    report = aggregate(samples)
    stat = report.per_class[1]["iou"]
    assert stat.mean == pytest.approx(0.70)
    assert stat.std == pytest.approx(0.1)  # population, not sample, deviation
    assert stat.n == 2
    assert report.overall["iou"].mean == pytest.approx(0.70)


def test_aggregate_skips_undefined_values():
    samples = [(1, _mv(iou=0.5, se=None)), (1, _mv(iou=None, se=0.25))]
    report = aggregate(samples)
    assert report.per_class[1]["iou"].n == 1
    assert report.per_class[1]["se"].mean == pytest.approx(0.25)
    assert report.per_class[1]["sp"].n == 0
    assert not report.per_class[1]["sp"].defined


def test_aggregate_empty():
    report = aggregate([])
    assert report.per_class == {}
    for name in METRIC_NAMES:
        assert report.overall[name].n == 0


def test_aggregate_pools_classes_into_overall():
    samples = [(1, _mv(iou=1.0)), (2, _mv(iou=0.0))]
    report = aggregate(samples)
    assert report.overall["iou"].mean == pytest.approx(0.5)
    assert report.overall["iou"].n == 2


# ------------------------------------------------------------------ formatting

@pytest.mark.parametrize("value,expected", [
    (0.213, "0.2"),
    (0.024, "0.02"),
    (0.096, "0.1"),
    (0.0, "0.0"),
    (0.5, "0.5"),
    (0.0004, "0.0004"),
])
def test_format_std_single_significant_digit(value, expected):
    assert format_std(value) == expected


def test_format_mean_std():
    assert format_mean_std(MetricStat(mean=0.7, std=0.213, n=5)) == "0.70(0.2)"
    assert format_mean_std(MetricStat(mean=1.0, std=0.0, n=3)) == "1.00(0.0)"
    assert format_mean_std(MetricStat(mean=None, std=None, n=0)) == "—"


def test_report_csv_shape(taxonomy):
    samples = [(1, _mv(iou=0.5, ppv=0.5, se=0.5, sp=0.5, bac=0.5))]
    text = report_csv(aggregate(samples), "demo", taxonomy)
    lines = text.strip().splitlines()
    assert lines[0] == "model,class,metric,mean,std,n"
    rice_rows = [l for l in lines if l.startswith("demo,rice,")]
    assert len(rice_rows) == 5
    assert any(l.startswith("demo,all,iou,") for l in lines)
    empty = [l for l in lines if l.startswith("demo,salad,iou")]
    assert empty and empty[0].endswith(",,,0")


def test_format_table_layout():
    stats = {name: MetricStat(mean=0.5, std=0.213, n=4) for name in METRIC_NAMES}
    report = AggregateReport(per_class={}, overall=stats)
    table = format_table({"demo": report})
    lines = table.splitlines()
    assert lines[0].split() == ["Model", "IoU", "SE", "SP", "BAC", "PPV"]
    assert "demo" in lines[-1]
    assert lines[-1].count("0.50(0.2)") == 5
