import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroq.bench.metrics import (
    classification_metrics, confusion_counts, metrics_from_confusion, regression_metrics,
)
from hydroq.errors import DimMismatch, EmptyInput


def test_reference_confusion_matrix():
    m = metrics_from_confusion([[243, 0], [0, 32]])
    assert (m.accuracy, m.precision, m.recall, m.balanced_accuracy, m.f1) == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert m.n == 275 and m.flags == []


def test_all_positive_signature():
    y = np.zeros(10_000, int)
    y[:578] = 1
    m = classification_metrics(y, np.ones_like(y))
    assert m.accuracy == pytest.approx(0.0578)
    assert m.recall == 1.0 and m.balanced_accuracy == 0.5
    assert m.precision == pytest.approx(0.0578)


def test_perfect_predictions():
    y = np.array([0, 1, 1, 0, 1])
    m = classification_metrics(y, y)
    assert m.accuracy == 1.0 and m.f1 == 1.0


def test_zero_division_flags():
    m = classification_metrics([0, 0, 0], [0, 0, 0])
    assert m.precision == 0.0 and m.recall == 0.0 and m.f1 == 0.0
    assert {"precision_undefined", "recall_undefined", "f1_undefined"} <= set(m.flags)
    assert m.balanced_accuracy == 0.5


def test_label_coding_and_errors():
    a = classification_metrics([-1, 1, 1], [1, 1, -1])
    assert a.confusion == [[0, 1], [1, 1]]
    with pytest.raises(DimMismatch):
        confusion_counts([0, 1], [0])
    with pytest.raises(EmptyInput):
        classification_metrics([], [])


def test_regression_examples():
    y = np.array([1.0, 4.0, 2.0, 8.0])
    perfect = regression_metrics(y, y)
    assert (perfect.mae, perfect.mse, perfect.r2) == (0.0, 0.0, 1.0)
    assert regression_metrics(y, np.full(4, y.mean())).r2 == pytest.approx(0.0, abs=1e-15)
    flat = regression_metrics([3.0, 3.0], [2.0, 4.0])
    assert flat.r2 == 0.0 and "r2_zero_variance" in flat.flags
    with pytest.raises(EmptyInput):
        regression_metrics([], [])


def test_regression_against_direct_formulas():
    r = np.random.default_rng(21)
    t, p = r.normal(40, 10, 30), r.normal(40, 10, 30)
    m = regression_metrics(t, p)
    mae = sum(abs(a - b) for a, b in zip(t, p)) / 30
    mse = sum((a - b) ** 2 for a, b in zip(t, p)) / 30
    mean = sum(t) / 30
    r2 = 1 - sum((a - b) ** 2 for a, b in zip(t, p)) / sum((a - mean) ** 2 for a in t)
    assert m.mae == pytest.approx(mae, rel=1e-12)
    assert m.mse == pytest.approx(mse, rel=1e-12)
    assert m.r2 == pytest.approx(r2, rel=1e-12)


def test_to_items_timing_toggle():
    m = metrics_from_confusion([[1, 0], [0, 1]])
    m.training_time_s = 0.5
    keys = [k for k, _ in m.to_items(timing=False)]
    assert "training_time_s" not in keys and "accuracy" in keys
    assert dict(m.to_items())["training_time_s"] == "0.5"


@settings(max_examples=200, deadline=None)
@given(tn=st.integers(0, 500), fp=st.integers(0, 500), fn=st.integers(0, 500), tp=st.integers(0, 500))
def test_metric_identities_exact(tn, fp, fn, tp):
    if tn + fp + fn + tp == 0:
        return
    m = metrics_from_confusion([[tn, fp], [fn, tp]])
    assert m.accuracy == (m.tp + m.tn) / (m.tp + m.tn + m.fp + m.fn)
    prec = m.tp / (m.tp + m.fp) if m.tp + m.fp else 0.0
    rec = m.tp / (m.tp + m.fn) if m.tp + m.fn else 0.0
    tnr = m.tn / (m.tn + m.fp) if m.tn + m.fp else 0.0
    assert m.precision == prec and m.recall == rec
    assert m.f1 == (2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    assert m.balanced_accuracy == (rec + tnr) / 2
