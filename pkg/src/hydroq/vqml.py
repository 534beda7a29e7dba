"""Variational quantum classifier/regressor and the quantum AR forecaster.

The circuit is an input encoding followed by a hardware-efficient ansatz
(RY on every qubit, then a CZ ring, repeated ``depth`` times). The model
output is ``<Z_0>``; classification takes its sign, regression rescales it
as ``scale * <Z_0> + offset``.

Training is full-batch gradient descent on the mean squared error with
gradients from the parameter-shift rule

    d<Z_0>/d theta_j = (f(theta_j + pi/2) - f(theta_j - pi/2)) / 2.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _core
from .errors import DimMismatch, DivergenceError, EmptyBatch, InsufficientHistory, IoError
from .qfeatures import FeatureMapSpec, encode_batch, zz_feature_map
from .qsim import (
    ParamCircuit,
    StateVector,
    expectation_z_batch,
    run_circuit,
    run_circuit_batch,
    zero_batch,
)

log = logging.getLogger(__name__)

SHIFT = math.pi / 2.0
ENCODINGS = ("zz", "ry", "none")
READOUTS = ("classification", "regression")


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    depth: int = 2

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @property
    def n_params(self) -> int:
        return self.n_qubits * self.depth

    def circuit(self) -> ParamCircuit:
        n = self.n_qubits
        circ = ParamCircuit(n)
        ring = [(q, q + 1) for q in range(n - 1)]
        if n > 2:
            ring.append((n - 1, 0))
        for layer in range(self.depth):
            for q in range(n):
                circ.add("RY", q, param=layer * n + q)
            for a, b in ring:
                circ.add("CZ", a, b)
        # keep n_params exact even if the last parameters were never used
        circ.n_params = self.n_params
        return circ


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    max_iters: int = 1000
    seed: int = 0
    loss: str = "squared_error"
    log_every: int = 100
    refresh_every: int = 100

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.loss != "squared_error":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class VariationalModel:
    """Encoding + ansatz + readout.

    ``feature_range=(lo, hi)`` maps raw inputs linearly onto ``[0, pi]``
    (clipped) before encoding; ``None`` means inputs are pre-scaled.
    """

    ansatz: AnsatzSpec
    feature_map: FeatureMapSpec | None = None
    encoding: str = "zz"
    params: np.ndarray | None = None
    readout: str = "classification"
    scale: float = 1.0
    offset: float = 0.0
    feature_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.readout not in READOUTS:
            raise ValueError(f"unknown readout {self.readout!r}")
        if self.encoding == "zz":
            if self.feature_map is None:
                self.feature_map = FeatureMapSpec(self.ansatz.n_qubits)
            if self.feature_map.n_features != self.ansatz.n_qubits:
                raise DimMismatch("ZZ encoding needs one qubit per feature")
        if self.params is not None:
            self.params = np.asarray(self.params, dtype=np.float64).reshape(-1)
            if self.params.shape[0] != self.ansatz.n_params:
                raise DimMismatch(
                    f"{self.params.shape[0]} params for an ansatz with {self.ansatz.n_params}"
                )

    @property
    def n_features(self) -> int:
        if self.encoding == "zz":
            return self.feature_map.n_features
        if self.encoding == "ry":
            return self.ansatz.n_qubits
        return 0


def init_params(ansatz: AnsatzSpec, seed: int) -> np.ndarray:
    """Uniform in [-pi/100, pi/100]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi / 100, math.pi / 100, size=ansatz.n_params)


def _scaled_inputs(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if model.encoding == "none":
        return X
    if X.shape[1] != model.n_features:
        raise DimMismatch(f"expected {model.n_features} features, got {X.shape[1]}")
    if model.feature_range is not None:
        lo, hi = model.feature_range
        if hi > lo:
            X = np.clip((X - lo) / (hi - lo), 0.0, 1.0) * math.pi
        else:
            X = np.zeros_like(X)
    return X


def encode(model: VariationalModel, X) -> np.ndarray:
    """Encoded input states, one row per sample."""
    X = _scaled_inputs(model, X)
    n = model.ansatz.n_qubits
    if model.encoding == "zz":
        return encode_batch(X, model.feature_map)
    states = zero_batch(n, X.shape[0])
    if model.encoding == "ry":
        for q in range(n):
            half = 0.5 * X[:, q]
            c, s = np.cos(half), np.sin(half)
            for r in range(X.shape[0]):
                _core.apply_1q(states[r:r + 1], c[r], -s[r], s[r], c[r], q)
    return states


def _forward_states(model, states, params):
    out = run_circuit_batch(model.ansatz.circuit(), params, states)
    return expectation_z_batch(out, model.ansatz.n_qubits, 0)


def _params(model):
    if model.params is None:
        raise ValueError("model has no parameters; train or initialise it first")
    return model.params


def model_forward(model: VariationalModel, x) -> float:
    """Raw ``<Z_0>`` for one sample, by running the gate circuits directly."""
    x = _scaled_inputs(model, x)[0]
    n = model.ansatz.n_qubits
    if model.encoding == "zz":
        state = run_circuit(zz_feature_map(x, model.feature_map))
    elif model.encoding == "ry":
        enc = ParamCircuit(n)
        for q in range(n):
            enc.add("RY", q, theta=x[q])
        state = run_circuit(enc)
    else:
        state = StateVector.zero(n)
    out = run_circuit(model.ansatz.circuit(), _params(model), initial=state)
    probs = np.abs(out.amplitudes) ** 2
    signs = 1.0 - 2.0 * (np.arange(1 << n) & 1)
    return float(probs @ signs)


def forward_batch(model: VariationalModel, X) -> np.ndarray:
    """Raw ``<Z_0>`` for every row of ``X``."""
    return _forward_states(model, encode(model, X), _params(model))


def _targets(model, y):
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if model.readout == "classification" and np.all((y == 0) | (y == 1)):
        return 2.0 * y - 1.0
    return y


def _loss(model, f, y):
    return float(np.mean((model.scale * f + model.offset - y) ** 2))


def _shift_gradient(model, states, params, f, y):
    resid = model.scale * f + model.offset - y
    grad = np.empty(params.shape[0])
    for j in range(params.shape[0]):
        plus = params.copy()
        plus[j] += SHIFT
        minus = params.copy()
        minus[j] -= SHIFT
        df = 0.5 * (_forward_states(model, states, plus) - _forward_states(model, states, minus))
        grad[j] = np.mean(2.0 * resid * model.scale * df)
    return grad


def parameter_shift_gradient(model: VariationalModel, X, y) -> np.ndarray:
    """Gradient of the mean squared loss with respect to ``model.params``."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise EmptyBatch("gradient of an empty batch")
    y = _targets(model, y)
    states = encode(model, X)
    params = _params(model)
    f = _forward_states(model, states, params)
    return _shift_gradient(model, states, params, f, y)


def loss(model: VariationalModel, X, y) -> float:
    return _loss(model, forward_batch(model, X), _targets(model, y))


def _refit_affine(f, y):
    design = np.column_stack([f, np.ones_like(f)])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(a), float(b)


def train_variational(model: VariationalModel, X, y, cfg: TrainConfig = TrainConfig()):
    """Gradient descent for ``cfg.max_iters`` steps.

    Returns ``(trained_model, cost_history)`` where ``cost_history[k]`` is
    the loss before step ``k``. Regression models refit ``(scale, offset)``
    by least squares every ``cfg.refresh_every`` steps and once at the end.
    Parameters start from ``model.params`` or, if unset, from
    :func:`init_params` with ``cfg.seed``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise EmptyBatch("empty training set")
    params = _params(model).copy() if model.params is not None else init_params(model.ansatz, cfg.seed)
    work = replace(model, params=params)
    y = _targets(work, y)
    states = encode(work, X)
    history = np.empty(cfg.max_iters)
    for k in range(cfg.max_iters):
        f = _forward_states(work, states, params)
        cost = _loss(work, f, y)
        if not math.isfinite(cost):
            raise DivergenceError(f"non-finite loss at iteration {k}", iteration=k)
        history[k] = cost
        if cfg.log_every and k % cfg.log_every == 0:
            log.debug("iter %d cost %.6g", k, cost)
        params = params - cfg.learning_rate * _shift_gradient(work, states, params, f, y)
        work.params = params
        if work.readout == "regression" and cfg.refresh_every and (k + 1) % cfg.refresh_every == 0:
            work.scale, work.offset = _refit_affine(_forward_states(work, states, params), y)
    if work.readout == "regression":
        work.scale, work.offset = _refit_affine(_forward_states(work, states, params), y)
    return work, history


def vqc_predict(model: VariationalModel, X) -> np.ndarray:
    """Labels in {0, 1} (``<Z_0> >= 0`` is 1) or rescaled regression values."""
    f = forward_batch(model, X)
    if model.readout == "classification":
        return (f >= 0.0).astype(np.int64)
    return model.scale * f + model.offset


def fit_qar(series, lags: int = 7, depth: int = 2, cfg: TrainConfig = TrainConfig(),
            reps: int = 1):
    """Train a QAR model on ``lags``-window -> next-value pairs of ``series``.

    Windows are min-max mapped onto ``[0, pi]`` using the series range and
    targets onto ``[-1, 1]``; the returned scale/offset are in series units.
    Returns ``(model, cost_history)``.
    """
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    if series.shape[0] < lags + 1:
        raise InsufficientHistory(f"need at least {lags + 1} values, got {series.shape[0]}")
    lo, hi = float(series.min()), float(series.max())
    windows = np.lib.stride_tricks.sliding_window_view(series[:-1], lags)
    targets = series[lags:]
    span = hi - lo if hi > lo else 1.0
    scaled_t = 2.0 * (targets - lo) / span - 1.0
    model = VariationalModel(
        AnsatzSpec(lags, depth),
        feature_map=FeatureMapSpec(lags, reps=reps),
        readout="regression",
        feature_range=(lo, hi),
    )
    trained, history = train_variational(model, windows, scaled_t, cfg)
    trained.scale = trained.scale * span / 2.0
    trained.offset = (trained.offset + 1.0) * span / 2.0 + lo
    return trained, history


def qar_forecast(model: VariationalModel, series, lags: int, horizon: int) -> np.ndarray:
    """Iterated one-step-ahead forecast; each prediction joins the window."""
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    if series.shape[0] < lags:
        raise InsufficientHistory(f"need {lags} values of history, got {series.shape[0]}")
    if model.n_features != lags:
        raise DimMismatch(f"model takes {model.n_features} lags, not {lags}")
    window = list(series[series.shape[0] - lags:])
    out = np.empty(max(horizon, 0))
    for h in range(out.shape[0]):
        f = forward_batch(model, np.array(window).reshape(1, -1))[0]
        out[h] = model.scale * f + model.offset
        window = window[1:] + [out[h]]
    return out


def save_variational(model: VariationalModel, path) -> None:
    """Flat text: ``key=value`` header, then one parameter per line."""
    fm = model.feature_map
    lo, hi = model.feature_range if model.feature_range is not None else ("none", "none")
    header = {
        "qubits": model.ansatz.n_qubits,
        "depth": model.ansatz.depth,
        "reps": fm.reps if fm is not None else 0,
        "entanglement": fm.entanglement if fm is not None else "none",
        "encoding": model.encoding,
        "readout": model.readout,
        "scale": repr(float(model.scale)),
        "offset": repr(float(model.offset)),
        "feature_low": lo if lo == "none" else repr(float(lo)),
        "feature_high": hi if hi == "none" else repr(float(hi)),
        "n_params": model.ansatz.n_params,
    }
    lines = ["# hydroq variational model"]
    lines += [f"{k}={v}" for k, v in header.items()]
    lines += [repr(float(p)) for p in _params(model)]
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_variational(path) -> VariationalModel:
    try:
        with open(path) as fh:
            raw = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise IoError(str(exc)) from exc
    head = dict(ln.split("=", 1) for ln in raw if "=" in ln)
    params = np.array([float(ln) for ln in raw if "=" not in ln])
    n = int(head["qubits"])
    fm = None
    if head["encoding"] == "zz":
        fm = FeatureMapSpec(n, reps=int(head["reps"]), entanglement=head["entanglement"])
    rng = None
    if head["feature_low"] != "none":
        rng = (float(head["feature_low"]), float(head["feature_high"]))
    return VariationalModel(
        AnsatzSpec(n, int(head["depth"])),
        feature_map=fm,
        encoding=head["encoding"],
        params=params,
        readout=head["readout"],
        scale=float(head["scale"]),
        offset=float(head["offset"]),
        feature_range=rng,
    )


def write_cost_history(history, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "cost"])
            for k, c in enumerate(history):
                w.writerow([k, repr(float(c))])
    except OSError as exc:
        raise IoError(str(exc)) from exc
