"""Uniform fit/predict adapters over every model family plus baselines.

Classification adapters predict {0, 1} flood flags, regression adapters
predict the level in cm, forecast adapters predict the next level from
its lag window. Any scaling is fit inside ``fit`` on the training rows
only.
"""

from __future__ import annotations

import numpy as np

from .. import modelio
from ..classical.boosting import fit_adaboost, fit_gbrt
from ..classical.knn import knn_predict
from ..classical.linear import ArModel, fit_ar, fit_ols
from ..classical.svm import svm_predict, train_svm_smo
from ..classical.trees import fit_forest, fit_tree
from ..errors import ConfigError, DimMismatch
from ..hydrodata.dataset import Scaler
from ..qboost import Schedule, ensemble_predict, train_qboost
from ..qfeatures import FeatureMapSpec, kernel_matrix
from ..vqml import AnsatzSpec, TrainConfig, VariationalModel, train_variational, vqc_predict

LEVEL_PREFIX = "water_level_cm_lag"


def recent_columns(feature_names, n: int | None) -> list[int]:
    """Indices of the ``n`` most recent features: all ``*_lag1`` columns
    first (level before exogenous), then older level lags."""
    if n is None:
        return list(range(len(feature_names)))

    def lag_of(name):
        tail = name.rsplit("_lag", 1)
        return int(tail[1]) if len(tail) == 2 and tail[1].isdigit() else 0

    ranked = sorted(range(len(feature_names)),
                    key=lambda i: (lag_of(feature_names[i]),
                                   not feature_names[i].startswith(LEVEL_PREFIX), i))
    return sorted(ranked[: max(1, min(n, len(feature_names)))])


def level_lag_columns(feature_names) -> list[int]:
    """Level lag columns ordered oldest first."""
    cols = [i for i, f in enumerate(feature_names) if f.startswith(LEVEL_PREFIX)]
    return sorted(cols, key=lambda i: -int(feature_names[i][len(LEVEL_PREFIX):]))


class Adapter:
    name = ""
    task = "classification"
    table = 1  # 0 baseline, 1 classical table, 2 quantum/ensemble table
    defaults: dict = {}
    scaler_mode: str | None = None

    def __init__(self, params: dict | None = None, seed: int = 0):
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"{self.name}: unknown hyperparameters {sorted(unknown)}")
        self.params = {**self.defaults, **params}
        self.seed = int(seed)
        self.columns: list[int] | None = None
        self.feature_names: list[str] = []
        self.scaler: Scaler | None = None
        self.model = None
        self.extras: dict = {}

    # subclasses implement _fit / _predict on prepared arrays
    def _fit(self, X, y):
        raise NotImplementedError

    def _predict(self, X):
        raise NotImplementedError

    def _select(self, feature_names):
        return recent_columns(feature_names, self.params.get("features"))

    def _prepare(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.feature_names):
            raise DimMismatch(f"{self.name}: expected {len(self.feature_names)} features, got {X.shape[1]}")
        X = X[:, self.columns]
        return self.scaler.transform(X) if self.scaler is not None else X

    def fit(self, X, y, feature_names) -> "Adapter":
        self.feature_names = list(feature_names)
        self.columns = self._select(self.feature_names)
        X = np.asarray(X, dtype=np.float64)[:, self.columns]
        if self.scaler_mode is not None:
            self.scaler = Scaler.fit(X, self.scaler_mode)
            X = self.scaler.transform(X)
        self._fit(X, np.asarray(y))
        return self

    def predict(self, X) -> np.ndarray:
        return self._predict(self._prepare(X))

    def state(self) -> dict:
        return {"name": self.name, "params": self.params, "seed": self.seed,
                "feature_names": self.feature_names, "columns": self.columns,
                "scaler": modelio.encode(self.scaler), "model": self._encode_model()}

    def _encode_model(self):
        return modelio.encode(self.model)

    def _decode_model(self, d):
        self.model = modelio.decode(d)

    @classmethod
    def from_state(cls, state: dict) -> "Adapter":
        obj = cls(state["params"], state["seed"])
        obj.feature_names = list(state["feature_names"])
        obj.columns = list(state["columns"])
        obj.scaler = modelio.decode(state["scaler"])
        obj._decode_model(state["model"])
        return obj


# baselines

class Majority(Adapter):
    name, table = "majority", 0

    def _fit(self, X, y):
        # ties go to the flood class
        self.model = None
        self.extras["label"] = int(np.mean(y) >= 0.5)

    def _predict(self, X):
        return np.full(X.shape[0], self.extras["label"], dtype=np.int64)

    def _encode_model(self):
        return {"type": "constant", "label": self.extras["label"]}

    def _decode_model(self, d):
        self.extras["label"] = d["label"]


class AllPositive(Majority):
    name = "all_positive"

    def _fit(self, X, y):
        self.extras["label"] = 1


# classical classifiers

class Svm(Adapter):
    name = "svm"
    defaults = {"C": 1.0, "gamma": None, "tol": 1e-3, "kernel": "rbf", "features": None}
    scaler_mode = "zscore"

    def _fit(self, X, y):
        p = self.params
        self.model = train_svm_smo(X, y, C=p["C"], tol=p["tol"], kernel=p["kernel"], gamma=p["gamma"])

    def _predict(self, X):
        return svm_predict(self.model, X)[0]


class Knn(Adapter):
    name = "knn"
    defaults = {"k": 5, "features": None}
    scaler_mode = "zscore"

    def _fit(self, X, y):
        self.extras["train_X"], self.extras["train_y"] = X, (y > 0).astype(np.int64)

    def _predict(self, X):
        k = min(self.params["k"], self.extras["train_X"].shape[0])
        return np.asarray(knn_predict(self.extras["train_X"], self.extras["train_y"], X, k),
                          dtype=np.int64)

    def _encode_model(self):
        return {"type": "knn", "train_X": self.extras["train_X"].tolist(),
                "train_y": self.extras["train_y"].tolist()}

    def _decode_model(self, d):
        self.extras["train_X"] = np.array(d["train_X"], dtype=np.float64)
        self.extras["train_y"] = np.array(d["train_y"], dtype=np.int64)


class Tree(Adapter):
    name, table = "tree", 2
    defaults = {"max_depth": 5, "min_leaf": 1, "features": None}

    def _fit(self, X, y):
        self.model = fit_tree(X, y, self.params["max_depth"], self.params["min_leaf"])

    def _predict(self, X):
        return self.model.predict(X)


class Forest(Adapter):
    name, table = "forest", 2
    defaults = {"n_trees": 50, "max_depth": 8, "max_features": "sqrt", "features": None}
    task_name = "classify"

    def _fit(self, X, y):
        p = self.params
        self.model = fit_forest(X, y, p["n_trees"], p["max_depth"], self.seed,
                                max_features=p["max_features"], task=self.task_name)

    def _predict(self, X):
        return self.model.predict(X)


class AdaBoost(Adapter):
    name, table = "adaboost", 2
    defaults = {"n_rounds": 50, "features": None}

    def _fit(self, X, y):
        self.model = fit_adaboost(X, y, self.params["n_rounds"])

    def _predict(self, X):
        return (self.model.predict(X) > 0).astype(np.int64)


class QBoost(Adapter):
    name, table = "qboost", 2
    variant = "qboost"
    defaults = {"Q": 20, "lam": None, "T0": 10.0, "alpha": 0.97, "sweeps": 2000,
                "auto_flip": False, "features": None}

    def _fit(self, X, y):
        p = self.params
        self.model = train_qboost(X, y, p["Q"], p["lam"], self.variant, self.seed,
                                  Schedule(p["T0"], p["alpha"], p["sweeps"]), p["auto_flip"])
        self.extras.update(self.model.metadata)

    def _predict(self, X):
        return (ensemble_predict(self.model, X) > 0).astype(np.int64)


class QBoostPlus(QBoost):
    name, variant = "qboost_plus", "qboost_plus"


class Qsvc(Adapter):
    name, table = "qsvc", 2
    defaults = {"C": 1.0, "reps": 2, "entanglement": "linear", "tol": 1e-3, "features": 3}
    scaler_mode = "minmax_0_pi"

    def _spec(self, d):
        return FeatureMapSpec(d, self.params["reps"], self.params["entanglement"])

    def _fit(self, X, y):
        spec = self._spec(X.shape[1])
        K = kernel_matrix(X, spec=spec)
        self.extras["train_X"] = X
        self.model = train_svm_smo(K, y, C=self.params["C"], tol=self.params["tol"],
                                   kernel="precomputed")

    def _predict(self, X):
        K = kernel_matrix(X, self.extras["train_X"], spec=self._spec(X.shape[1]))
        return svm_predict(self.model, K)[0]

    def _encode_model(self):
        return {"type": "qsvc", "svm": modelio.encode(self.model),
                "train_X": self.extras["train_X"].tolist()}

    def _decode_model(self, d):
        self.model = modelio.decode(d["svm"])
        self.extras["train_X"] = np.array(d["train_X"], dtype=np.float64)


class _Variational(Adapter):
    table = 2
    readout = "classification"
    scaler_mode = "minmax_0_pi"
    defaults = {"depth": 2, "reps": 1, "iters": 100, "learning_rate": 0.1, "features": 3}

    def _model(self, d):
        return VariationalModel(AnsatzSpec(d, self.params["depth"]),
                                FeatureMapSpec(d, self.params["reps"]), readout=self.readout)

    def _cfg(self):
        return TrainConfig(self.params["learning_rate"], self.params["iters"], self.seed)


class Vqc(_Variational):
    name = "vqc"

    def _fit(self, X, y):
        self.model, hist = train_variational(self._model(X.shape[1]), X, y, self._cfg())
        self.extras["cost_history"] = hist

    def _predict(self, X):
        return vqc_predict(self.model, X)


# regressors

class Linear(Adapter):
    name, task = "linear", "regression"
    defaults = {"features": None}

    def _fit(self, X, y):
        self.model = fit_ols(X, y)

    def _predict(self, X):
        return self.model.predict(X)


class ForestRegressor(Forest):
    name, task, table = "forest_regressor", "regression", 1
    task_name = "regress"


class Gbrt(Adapter):
    name, task = "gbrt", "regression"
    defaults = {"n_rounds": 100, "shrinkage": 0.1, "max_depth": 1, "features": None}

    def _fit(self, X, y):
        p = self.params
        self.model = fit_gbrt(X, y, p["n_rounds"], p["shrinkage"], p["max_depth"])

    def _predict(self, X):
        return self.model.predict(X)


class Vqr(_Variational):
    """Variational regression on standardised targets."""

    name, task, readout = "vqr", "regression", "regression"

    def _fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        mu, sd = float(y.mean()), float(y.std()) or 1.0
        model, hist = train_variational(self._model(X.shape[1]), X, (y - mu) / sd, self._cfg())
        model.scale, model.offset = model.scale * sd, model.offset * sd + mu
        self.model = model
        self.extras["cost_history"] = hist

    def _predict(self, X):
        return vqc_predict(self.model, X)


# forecasters: fit on the level series reconstructed from lag windows

def _series_from_windows(W, y):
    if W.shape[0] == 0:
        raise ConfigError("no training windows")
    if W.shape[0] > 1 and not np.array_equal(W[1:, -1], y[:-1]):
        raise ConfigError("forecast models need contiguous one-step windows (horizon 1)")
    return np.concatenate([W[0], y])


class Ar(Adapter):
    name, task = "ar", "forecast"
    defaults = {"p": None}

    def _select(self, feature_names):
        cols = level_lag_columns(feature_names)
        if not cols:
            raise ConfigError("forecast models need level lag columns")
        p = self.params["p"] or len(cols)
        if p > len(cols):
            raise ConfigError(f"p={p} exceeds the {len(cols)} available lags")
        return cols[len(cols) - p:]

    def _fit(self, X, y):
        series = _series_from_windows(X, np.asarray(y, dtype=np.float64))
        self.model = fit_ar(series, X.shape[1])

    def _predict(self, X):
        m: ArModel = self.model
        return X[:, ::-1] @ m.coefficients + m.intercept


class Qar(Ar):
    name, table = "qar", 2
    defaults = {"p": 4, "depth": 2, "iters": 100, "learning_rate": 0.1}

    def _fit(self, X, y):
        from ..vqml import fit_qar

        series = _series_from_windows(X, np.asarray(y, dtype=np.float64))
        cfg = TrainConfig(self.params["learning_rate"], self.params["iters"], self.seed)
        self.model, hist = fit_qar(series, X.shape[1], self.params["depth"], cfg)
        self.extras["cost_history"] = hist

    def _predict(self, X):
        return vqc_predict(self.model, X)


REGISTRY: dict[str, type[Adapter]] = {
    cls.name: cls
    for cls in (Majority, AllPositive, Svm, Knn, Tree, Forest, AdaBoost, QBoost, QBoostPlus, Qsvc,
                Vqc, Linear, ForestRegressor, Gbrt, Vqr, Ar, Qar)
}


def make_model(name: str, params: dict | None = None, seed: int = 0) -> Adapter:
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(REGISTRY)}") from None
    return cls(params, seed)


def adapter_from_state(state: dict) -> Adapter:
    return REGISTRY[state["name"]].from_state(state)


__all__ = ["Adapter", "REGISTRY", "adapter_from_state", "make_model", "recent_columns",
           "level_lag_columns"]
