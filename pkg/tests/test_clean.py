import math
from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroq.errors import EmptyInput
from hydroq.hydrodata import CleanRules, TimeSeriesRecord, clean_series, iqr_bounds

T0 = datetime(2021, 1, 1)


def stream(values, step=timedelta(days=1), skip=()):
    return [TimeSeriesRecord(T0 + i * step, "s", "water_level_cm", float(v))
            for i, v in enumerate(values) if i not in skip]


def test_forward_fill_single_gap():
    res = clean_series(stream([1, math.nan, 3]))
    np.testing.assert_array_equal(res.values, [1, 1, 3])
    assert res.count("fill") == 1


def test_long_gap_dropped_and_leading_gap():
    vals = [math.nan, 5, 6] + [math.nan] * 4 + [9]
    res = clean_series(stream(vals))
    np.testing.assert_array_equal(res.values, [5, 6, 9])
    assert res.count("drop") == 5


def test_absent_timestamps_regularized():
    res = clean_series(stream([1, 2, 3, 4, 5, 6], skip=(2,)))
    assert len(res.records) == 6 and res.values[2] == 2.0
    assert res.timestamps[2] == T0 + timedelta(days=2)


def test_constant_series_no_outliers():
    res = clean_series(stream([4.0] * 30))
    assert not res.outliers.any() and res.count("outlier") == 0
    assert iqr_bounds([4.0] * 10) is None


def test_spike_injection_flags_exactly_that_point():
    r = np.random.default_rng(11)
    v = r.uniform(0, 1, 400)
    v[123] = v.mean() + 10 * v.std()
    res = clean_series(stream(v))
    assert np.flatnonzero(res.outliers).tolist() == [123]
    # flagged values stay in the series
    assert res.values[123] == v[123]


def test_iqr_bounds_linear_quartiles():
    v = np.array([1.0, 2.0, 3.0, 4.0, 100.0])
    q1, q3 = 2.0, 4.0
    assert iqr_bounds(v) == (q1 - 3.0, q3 + 3.0)


def test_empty_and_mixed_streams():
    with pytest.raises(EmptyInput):
        clean_series([])
    mixed = stream([1, 2]) + [TimeSeriesRecord(T0, "other", "water_level_cm", 1.0)]
    with pytest.raises(ValueError):
        clean_series(mixed)


@settings(max_examples=60, deadline=None)
@given(values=st.lists(st.one_of(st.floats(-50, 500, allow_nan=False), st.just(math.nan)),
                       min_size=1, max_size=60),
       skips=st.sets(st.integers(1, 59), max_size=8),
       max_gap=st.integers(0, 4))
def test_cleaning_idempotent(values, skips, max_gap):
    recs = stream(values, skip=skips)
    if not recs:
        return
    rules = CleanRules(max_gap=max_gap)
    once = clean_series(recs, rules)
    if not once.records:
        return
    twice = clean_series(once.records, rules)
    assert twice.records == once.records
    np.testing.assert_array_equal(twice.outliers, once.outliers)
    assert twice.count("fill") == 0 and twice.count("drop") == 0
