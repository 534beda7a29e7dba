"""Ordinary least squares and autoregressive forecasting."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DimMismatch, InsufficientHistory, SingularDesign

log = logging.getLogger(__name__)


def r2_score(y, pred) -> float:
    """Coefficient of determination; 0.0 when ``y`` has zero variance."""
    y = np.asarray(y, dtype=np.float64)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - float(((y - pred) ** 2).sum()) / ss_tot


def _design(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    return X, np.column_stack([X, np.ones(X.shape[0])])


def _qr_solve(A, y):
    q, r = np.linalg.qr(A)
    d = np.abs(np.diag(r))
    if d.size == 0 or d.min() <= np.finfo(float).eps * max(A.shape) * d.max():
        raise SingularDesign("design matrix is rank deficient")
    return np.linalg.solve(r, q.T @ y)


@dataclass
class OlsModel:
    coef: np.ndarray
    intercept: float
    r2: float

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.coef.shape[0]:
            raise DimMismatch(f"expected {self.coef.shape[0]} features, got {X.shape[1]}")
        return X @ self.coef + self.intercept


def fit_ols(X, y) -> OlsModel:
    """Least squares with intercept via QR; reports in-sample R^2."""
    X, A = _design(X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if A.shape[0] != y.shape[0]:
        raise DimMismatch(f"{A.shape[0]} rows for {y.shape[0]} targets")
    if A.shape[0] <= X.shape[1]:
        raise SingularDesign(f"need more than {X.shape[1]} rows, got {A.shape[0]}")
    beta = _qr_solve(A, y)
    coef, intercept = beta[:-1], float(beta[-1])
    return OlsModel(coef, intercept, r2_score(y, X @ coef + intercept))


@dataclass
class ArModel:
    """``y_t = intercept + sum_k coefficients[k] * y_{t-k-1}``."""

    p: int
    coefficients: np.ndarray
    intercept: float

    def predict_next(self, window) -> float:
        """One step ahead from the last ``p`` values (oldest first)."""
        lagged = np.asarray(window, dtype=np.float64)[-self.p:][::-1]
        return float(lagged @ self.coefficients + self.intercept)


def lag_matrix(series, p):
    """Rows ``[y_{t-1}, ..., y_{t-p}]`` with targets ``y_t`` for t >= p."""
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    n = series.shape[0]
    lags = np.column_stack([series[p - k - 1:n - k - 1] for k in range(p)])
    return lags, series[p:]


def fit_ar(series, p: int) -> ArModel:
    """AR(p) by least squares on the lag matrix.

    A rank-deficient lag matrix (for example a constant series) falls back
    to the minimum-norm least-squares solution instead of failing, so a
    constant series forecasts its constant.
    """
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    if p < 1:
        raise ValueError("lag order must be >= 1")
    if series.shape[0] <= p + 1:
        raise InsufficientHistory(f"AR({p}) needs more than {p + 1} values, got {series.shape[0]}")
    lags, target = lag_matrix(series, p)
    A = np.column_stack([lags, np.ones(lags.shape[0])])
    try:
        beta = _qr_solve(A, target)
    except SingularDesign:
        log.warning("AR(%d) lag matrix is rank deficient; using minimum-norm solution", p)
        beta = np.linalg.lstsq(A, target, rcond=None)[0]
    return ArModel(p, beta[:-1], float(beta[-1]))


def ar_forecast(model: ArModel, history, horizon: int) -> np.ndarray:
    """Iterated one-step forecasts, each appended to the window."""
    history = np.asarray(history, dtype=np.float64).reshape(-1)
    if history.shape[0] < model.p:
        raise InsufficientHistory(f"need {model.p} values of history, got {history.shape[0]}")
    window = list(history[-model.p:])
    out = np.empty(max(horizon, 0))
    for h in range(out.shape[0]):
        out[h] = model.predict_next(window)
        window = window[1:] + [out[h]]
    return out
