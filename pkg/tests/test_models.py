import json

import numpy as np
import pytest

from hydroq import modelio
from hydroq.bench.models import (
    REGISTRY, adapter_from_state, level_lag_columns, make_model, recent_columns,
)
from hydroq.bench.runner import DEFAULT_MODELS
from hydroq.errors import ConfigError
from hydroq.hydrodata import SynthCalibration, chrono_split, synth_generate, table_to_supervised

FAST = {"qboost": {"sweeps": 200}, "qboost_plus": {"sweeps": 200}, "vqc": {"iters": 5},
        "vqr": {"iters": 5}, "qar": {"iters": 5}, "forest": {"n_trees": 5},
        "forest_regressor": {"n_trees": 5}}


@pytest.fixture(scope="module")
def splits():
    table = synth_generate(3, SynthCalibration(years=2)).slice(0, 400)
    out = {}
    for task, target in (("classification", "flood_flag"), ("regression", "level")):
        out[task] = chrono_split(table_to_supervised(table, 5, target), 0.8)
    out["forecast"] = out["regression"]
    return out


def test_registry_covers_default_suite():
    assert set(DEFAULT_MODELS) == set(REGISTRY)


def test_recent_columns_order():
    names = ["water_level_cm_lag3", "water_level_cm_lag2", "water_level_cm_lag1",
             "precipitation_mm_lag1"]
    assert recent_columns(names, 1) == [2]
    assert recent_columns(names, 2) == [2, 3]
    assert recent_columns(names, 3) == [1, 2, 3]
    assert recent_columns(names, None) == [0, 1, 2, 3]
    assert level_lag_columns(names) == [0, 1, 2]


def test_unknown_model_and_param():
    with pytest.raises(ConfigError):
        make_model("perceptron")
    with pytest.raises(ConfigError):
        make_model("svm", {"degree": 3})


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_adapter_fit_predict_and_reload(name, splits, tmp_path):
    model = make_model(name, FAST.get(name), seed=2)
    train, test = splits[model.task]
    model.fit(train.X, train.y, train.feature_names)
    pred = model.predict(test.X)
    assert pred.shape == (len(test),)
    assert np.all(np.isfinite(pred))
    if model.task == "classification":
        assert set(np.unique(pred).tolist()) <= {0, 1}
    path = tmp_path / f"{name}.json"
    modelio.save_json(model.state(), path)
    back = adapter_from_state(modelio.load_json(path))
    assert back.predict(test.X).tobytes() == pred.tobytes()
    json.loads(path.read_text())


def test_baselines(splits):
    train, test = splits["classification"]
    maj = make_model("majority").fit(train.X, train.y, train.feature_names)
    assert np.all(maj.predict(test.X) == 0)
    pos = make_model("all_positive").fit(train.X, train.y, train.feature_names)
    assert np.all(pos.predict(test.X) == 1)
    tie = make_model("majority").fit(np.zeros((4, 1)), np.array([0, 1, 0, 1]), ["x"])
    assert tie.predict(np.zeros((1, 1)))[0] == 1


def test_quantum_adapters_scale_into_range(splits):
    train, _ = splits["classification"]
    m = make_model("qsvc", {"features": 2}).fit(train.X, train.y, train.feature_names)
    Z = m.scaler.transform(train.X[:, m.columns])
    assert Z.min() >= 0 and Z.max() <= np.pi


def test_seeded_adapters_are_deterministic(splits):
    train, test = splits["classification"]
    a = make_model("qboost", {"sweeps": 100}, seed=4).fit(train.X, train.y, train.feature_names)
    b = make_model("qboost", {"sweeps": 100}, seed=4).fit(train.X, train.y, train.feature_names)
    assert a.predict(test.X).tobytes() == b.predict(test.X).tobytes()
