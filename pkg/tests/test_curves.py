import logging

import numpy as np
import pytest

from hydroq.bench.curves import learning_curve
from hydroq.bench.models import make_model
from hydroq.errors import ConfigError
from hydroq.hydrodata import HydroDataset


def separable(n=240, seed=0):
    r = np.random.default_rng(seed)
    X = r.uniform(-1, 1, (n, 2))
    y = (X[:, 0] > 0).astype(int)
    ts = np.datetime64("2000-01-01") + np.arange(n).astype("timedelta64[D]")
    return HydroDataset(X, y, ["a", "b"], ts)


def noisy(n=300, seed=1):
    r = np.random.default_rng(seed)
    X = r.uniform(-1, 1, (n, 3))
    y = ((X[:, 0] + 0.4 * r.standard_normal(n)) > 0).astype(int)
    ts = np.datetime64("2000-01-01") + np.arange(n).astype("timedelta64[D]")
    return HydroDataset(X, y, ["a", "b", "c"], ts)


def test_separable_full_fraction_train_score():
    pts = learning_curve(lambda s: make_model("tree", {"max_depth": 3}, s), separable(), (0.5, 1.0))
    assert pts[-1].train_mean == 1.0 and pts[-1].fraction == 1.0


def test_train_at_least_cv_for_expressive_model():
    pts = []
    for seed in range(3):
        pts += learning_curve(lambda s: make_model("tree", {"max_depth": 8}, s), noisy(seed=seed),
                              (0.25, 0.5, 0.75, 1.0), k_folds=3, seed=seed)
    assert len(pts) == 12
    assert sum(p.train_mean < p.cv_mean for p in pts) <= 2


def test_skipped_fractions(caplog):
    ds = separable(40)
    y = np.zeros(40, int)
    y[[5, 12, 15, 30]] = 1
    ds = HydroDataset(ds.X, y, ds.feature_names, ds.timestamps)
    with caplog.at_level(logging.WARNING):
        pts = learning_curve(lambda s: make_model("knn", {"k": 1}, s), ds, (0.25, 1.0), k_folds=1)
    assert [p.fraction for p in pts] == [1.0]
    assert "skipped" in caplog.text


def test_regression_scores_r2():
    r = np.random.default_rng(3)
    X = r.standard_normal((120, 2))
    ts = np.datetime64("2000-01-01") + np.arange(120).astype("timedelta64[D]")
    ds = HydroDataset(X, 3 * X[:, 0] + 1, ["a", "b"], ts, task="regression", target_name="level")
    pts = learning_curve(lambda s: make_model("linear", None, s), ds, (1.0,))
    assert pts[0].cv_mean == pytest.approx(1.0)


@pytest.mark.parametrize("fr", [(), (0.0,), (0.5, 0.4), (1.2,)])
def test_bad_fractions(fr):
    with pytest.raises(ConfigError):
        learning_curve(lambda s: make_model("tree", None, s), separable(), fr)
