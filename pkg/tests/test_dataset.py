import math
from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hydroq.errors import ConfigError, DimMismatch, InsufficientHistory
from hydroq.hydrodata import (
    HydroDataset, HydroTable, Scaler, TimeSeriesRecord, build_supervised, build_table,
    chrono_split, label_floods, normalize, table_to_supervised,
)
from hydroq.hydrodata.dataset import LEVEL, PRECIP

DAYS = np.arange("2020-01-01", "2020-01-11", dtype="datetime64[D]")


def dataset(n, y=None, d=2, seed=0):
    r = np.random.default_rng(seed)
    ts = np.datetime64("2001-01-01") + np.arange(n).astype("timedelta64[D]")
    return HydroDataset(r.standard_normal((n, d)), np.zeros(n, int) if y is None else y,
                        [f"f{k}" for k in range(d)], ts)


def test_label_floods_examples():
    np.testing.assert_array_equal(label_floods([95, 37, 90, 90.0001]), [1, 0, 0, 1])


def test_label_floods_permutation():
    r = np.random.default_rng(2)
    v = r.uniform(0, 200, 50)
    p = r.permutation(50)
    np.testing.assert_array_equal(label_floods(v[p]), label_floods(v)[p])


def test_minmax_examples():
    col = np.array([[0.0], [5.0], [10.0]])
    np.testing.assert_allclose(Scaler.fit(col, "minmax_0_1").transform(col)[:, 0], [0, 0.5, 1])
    assert Scaler.fit(col, "minmax_0_pi").transform(col).max() == math.pi


def test_zscore_zero_variance_column(caplog):
    X = np.column_stack([np.arange(5.0), np.full(5, 3.0)])
    s = Scaler.fit(X, "zscore")
    out = s.transform(X)
    np.testing.assert_array_equal(out[:, 1], 0.0)
    assert abs(out[:, 0].mean()) < 1e-12 and "zero spread" in caplog.text
    np.testing.assert_allclose(s.inverse_transform(out), X)


@pytest.mark.parametrize("mode", ["minmax_0_pi", "zscore", "minmax_0_1"])
def test_inverse_roundtrip(mode):
    X = np.random.default_rng(4).normal(50, 20, (40, 3))
    s = Scaler.fit(X, mode)
    assert np.max(np.abs(s.inverse_transform(s.transform(X)) - X)) < 1e-10


def test_minmax_pi_clips_unseen_extremes():
    s = Scaler.fit(np.array([[0.0], [1.0]]), "minmax_0_pi")
    out = s.transform(np.array([[-3.0], [7.0]]))
    np.testing.assert_array_equal(out[:, 0], [0.0, math.pi])


def test_unknown_mode():
    with pytest.raises(ConfigError):
        Scaler.fit(np.ones((2, 1)), "robust")


@settings(max_examples=50, deadline=None)
@given(train=arrays(np.float64, (20, 3), elements=st.floats(-1e3, 1e3)),
       test=arrays(np.float64, (7, 3), elements=st.floats(-1e6, 1e6)),
       mode=st.sampled_from(["minmax_0_pi", "zscore", "minmax_0_1"]))
def test_leakage_guard(train, test, mode):
    ts = np.arange(27).astype("datetime64[D]")
    tr = HydroDataset(train, np.zeros(20), ["a", "b", "c"], ts[:20])
    te = HydroDataset(test, np.zeros(7), ["a", "b", "c"], ts[20:])
    _, _, s1 = normalize(tr, te, mode)
    _, _, s2 = normalize(tr, te.with_features(test[::-1] * 3 + 11), mode)
    assert s1.shift.tobytes() == s2.shift.tobytes()
    assert s1.width.tobytes() == s2.width.tobytes()
    np.testing.assert_array_equal(s1.shift, Scaler.fit(train, mode).shift)


def test_chrono_split_examples():
    tr, te = chrono_split(dataset(10), 0.8)
    assert (len(tr), len(te)) == (8, 2)
    assert tr.timestamps.max() < te.timestamps.min()
    with pytest.raises(ConfigError):
        chrono_split(dataset(10), 1.0)
    with pytest.raises(ConfigError):
        chrono_split(dataset(10), 0.0)


def test_chrono_split_confusion_population():
    y = np.zeros(1375, int)
    y[1100 + np.arange(0, 275, 8)[:32]] = 1
    _, te = chrono_split(dataset(1375, y), 0.8)
    assert len(te) == 275
    assert (int((te.y == 0).sum()), int(te.y.sum())) == (243, 32)


def test_chrono_split_rejects_unsorted():
    ds = dataset(5)
    ds.timestamps = ds.timestamps[::-1]
    with pytest.raises(ConfigError):
        chrono_split(ds, 0.5)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(2, 300), f=st.floats(0.01, 0.99))
def test_chrono_split_ordering_property(n, f):
    ds = dataset(n)
    tr, te = chrono_split(ds, f)
    assert len(tr) == math.ceil(f * n - 1e-9) or len(tr) == n
    assert len(tr) + len(te) == n
    np.testing.assert_array_equal(np.concatenate([tr.X, te.X]), ds.X)
    if len(te) and len(tr):
        assert tr.timestamps.max() < te.timestamps.min()


def test_build_supervised_examples():
    ds = build_supervised([1, 2, 3, 4], lags=2)
    np.testing.assert_array_equal(ds.X, [[1, 2], [2, 3]])
    np.testing.assert_array_equal(ds.y, [3, 4])
    assert ds.feature_names == ["level_lag2", "level_lag1"]
    assert len(build_supervised(np.arange(6.0), lags=5)) == 1
    with pytest.raises(InsufficientHistory):
        build_supervised([1, 2], lags=2)


def test_build_supervised_roundtrip_and_flags():
    s = np.random.default_rng(1).uniform(0, 150, 40)
    ds = build_supervised(s, lags=4)
    rebuilt = np.concatenate([ds.X[0], ds.X[1:, -1], ds.y[-1:]])
    np.testing.assert_array_equal(rebuilt, s)
    flags = build_supervised(s, lags=4, target="flood_flag")
    np.testing.assert_array_equal(flags.y, label_floods(s[4:]))
    assert flags.task == "classification"


def test_build_supervised_horizon_and_exog():
    s = np.arange(10.0)
    rain = 100 + np.arange(10.0)
    ds = build_supervised(s, lags=3, horizon=2, exog={"rain": rain})
    np.testing.assert_array_equal(ds.X[0], [0, 1, 2, 102])
    assert ds.y[0] == 4.0
    assert ds.feature_names[-1] == "rain_lag1"
    with pytest.raises(DimMismatch):
        build_supervised(s, lags=3, exog={"rain": rain[:5]})


def test_build_table_and_supervised():
    t0 = datetime(2020, 1, 1)
    recs = []
    for i in range(12):
        recs.append(TimeSeriesRecord(t0 + timedelta(days=i), "s", LEVEL, 80.0 + 2 * i))
        if i != 5:
            recs.append(TimeSeriesRecord(t0 + timedelta(days=i), "s", PRECIP, float(i)))
    table, results = build_table(recs)
    assert len(table) == 12 and table[PRECIP][5] == 4.0
    assert results[PRECIP].count("fill") == 1
    ds = table_to_supervised(table, lags=3)
    assert ds.feature_names == [f"{LEVEL}_lag3", f"{LEVEL}_lag2", f"{LEVEL}_lag1", f"{PRECIP}_lag1"]
    np.testing.assert_array_equal(ds.y, label_floods(table[LEVEL][3:]))


def test_table_helpers(tmp_path):
    t = HydroTable(DAYS, {LEVEL: np.arange(10.0)})
    assert t.months().tolist() == [1] * 10 and t.years().tolist() == [2020] * 10
    assert len(t.slice(2, 5)) == 3
    t.write_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[1] == "2020-01-01T00:00:00,0.0"
    with pytest.raises(DimMismatch):
        HydroTable(DAYS, {LEVEL: np.arange(3.0)})
