"""Kernel SVM trained by SMO with maximal-violating-pair selection.

Solves the dual

    min_a  1/2 a' Q a - e' a,   Q_ij = y_i y_j K_ij,   0 <= a_i <= C,   y' a = 0

two multipliers at a time until the KKT gap ``m(a) - M(a)`` drops below
``tol``. A precomputed Gram matrix (for example a quantum fidelity kernel)
goes through exactly the same code path as the built-in kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateLabels, DimMismatch, KernelError

KERNELS = ("rbf", "linear", "precomputed")
_TAU = 1e-12


def linear_kernel(A, B):
    return np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64).T


def rbf_kernel(A, B, gamma):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def default_gamma(X) -> float:
    X = np.asarray(X, dtype=np.float64)
    var = X.var()
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


@dataclass
class SvmModel:
    kernel: str
    C: float
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    train_X: np.ndarray | None = None
    gamma: float | None = None
    n_iter: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    @property
    def support_vectors(self):
        return None if self.train_X is None else self.train_X[self.support]

    def kernel_rows(self, X) -> np.ndarray:
        """Kernel between query rows and all training rows."""
        X = np.asarray(X, dtype=np.float64)
        if self.kernel == "precomputed":
            raise ValueError("precomputed models take kernel rows directly")
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.train_X.shape[1]:
            raise DimMismatch(f"expected {self.train_X.shape[1]} features, got {X.shape[1]}")
        if self.kernel == "linear":
            return linear_kernel(X, self.train_X)
        return rbf_kernel(X, self.train_X, self.gamma)


def _as_pm1(y):
    y = np.asarray(y).reshape(-1)
    vals = set(np.unique(y).tolist())
    if vals <= {0, 1}:
        y = np.where(y == 1, 1.0, -1.0)
    elif not vals <= {-1, 1}:
        raise ValueError("SVM labels must be binary")
    y = y.astype(np.float64)
    if np.unique(y).size < 2:
        raise DegenerateLabels("SVM needs at least one sample per class")
    return y


def _check_gram(K, n):
    if K.shape != (n, n):
        raise DimMismatch(f"Gram matrix {K.shape} for {n} labels")
    if not np.all(np.isfinite(K)):
        raise KernelError("Gram matrix has non-finite entries")
    if not np.allclose(K, K.T, rtol=0.0, atol=1e-8):
        raise KernelError("precomputed Gram matrix is not symmetric")
    lam_min = float(np.linalg.eigvalsh(0.5 * (K + K.T))[0])
    if lam_min < -1e-6:
        raise KernelError(f"precomputed Gram matrix not PSD (min eigenvalue {lam_min:.3g})")


def _smo(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    it = 0
    while it < max_iter:
        yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        gap = yg[i] - yg[j]
        if gap < tol:
            break
        curv = diag[i] + diag[j] - 2.0 * K[i, j]
        if curv <= 0:
            curv = _TAU
        step = gap / curv
        step = min(step, C - alpha[i] if y[i] > 0 else alpha[i])
        step = min(step, alpha[j] if y[j] > 0 else C - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for t in (i, j):
            if alpha[t] < 1e-14:
                alpha[t] = 0.0
            elif alpha[t] > C - 1e-14 * max(1.0, C):
                alpha[t] = C
        grad += step * y * (K[:, i] - K[:, j])
        it += 1
    return alpha, grad, it


def _bias(alpha, grad, y, C):
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
        ub = yg[ub_mask].min() if ub_mask.any() else np.inf
        lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float(0.5 * (ub + lb)) if np.isfinite(ub) and np.isfinite(lb) else float(
            ub if np.isfinite(ub) else lb
        )
    return -rho


def train_svm_smo(K_or_X, y, C: float = 1.0, tol: float = 1e-3, kernel: str = "rbf",
                  gamma: float | None = None, max_iter: int | None = None) -> SvmModel:
    """Fit a binary SVM. Labels may be {0, 1} or {-1, +1}.

    With ``kernel="precomputed"`` the first argument is the training Gram
    matrix (array or :class:`~hydroq.qfeatures.KernelMatrix`).
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if C <= 0:
        raise ValueError("C must be > 0")
    y = _as_pm1(y)
    data = getattr(K_or_X, "values", K_or_X)
    data = np.asarray(data, dtype=np.float64)
    train_X = None
    if kernel == "precomputed":
        K = data
        _check_gram(K, y.shape[0])
    else:
        train_X = data.reshape(-1, 1) if data.ndim == 1 else data
        if train_X.shape[0] != y.shape[0]:
            raise DimMismatch(f"{train_X.shape[0]} rows for {y.shape[0]} labels")
        if kernel == "linear":
            K = linear_kernel(train_X, train_X)
        else:
            gamma = default_gamma(train_X) if gamma is None else float(gamma)
            K = rbf_kernel(train_X, train_X, gamma)
    if max_iter is None:
        max_iter = max(100_000, 100 * y.shape[0])
    alpha, grad, it = _smo(K, y, float(C), tol, max_iter)
    return SvmModel(kernel, float(C), alpha, _bias(alpha, grad, y, C), y, train_X, gamma, it)


def svm_decision(model: SvmModel, K_row_or_x) -> np.ndarray:
    data = np.asarray(getattr(K_row_or_x, "values", K_row_or_x), dtype=np.float64)
    if model.kernel == "precomputed":
        rows = data.reshape(1, -1) if data.ndim == 1 else data
        if rows.shape[1] != model.alphas.shape[0]:
            raise DimMismatch(f"kernel rows need {model.alphas.shape[0]} columns, got {rows.shape[1]}")
    else:
        rows = model.kernel_rows(data)
    return rows @ (model.alphas * model.labels) + model.bias


def svm_predict(model: SvmModel, K_row_or_x) -> tuple[np.ndarray, np.ndarray]:
    """``(labels in {0, 1}, decision values)``; a zero decision value maps to 1."""
    dec = svm_decision(model, K_row_or_x)
    return (dec >= 0.0).astype(np.int64), dec


def kkt_violation(model: SvmModel, K) -> float:
    """Largest KKT violation of the fitted multipliers on their Gram matrix."""
    K = np.asarray(getattr(K, "values", K), dtype=np.float64)
    y, a, C = model.labels, model.alphas, model.C
    margin = y * (K @ (a * y) + model.bias)
    viol = np.zeros_like(a)
    lower = a <= 0
    upper = a >= C
    free = ~lower & ~upper
    viol[lower] = np.maximum(0.0, 1.0 - margin[lower])
    viol[upper] = np.maximum(0.0, margin[upper] - 1.0)
    viol[free] = np.abs(margin[free] - 1.0)
    return float(viol.max()) if viol.size else 0.0
