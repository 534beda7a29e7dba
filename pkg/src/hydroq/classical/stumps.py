"""Weighted decision stumps on {-1, +1} labels.

Shared by AdaBoost and the QBoost weak-learner pool. Candidate thresholds
are midpoints between consecutive sorted unique feature values; ties go
to the lowest feature index, then the lowest threshold, then polarity +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    polarity: int = 1

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        above = X[:, self.feature] > self.threshold
        return np.where(above, self.polarity, -self.polarity).astype(np.int64)


def split_candidates(values):
    """Sorted order, and for each cut: (position after which to cut, threshold)."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    cut = np.flatnonzero(v[1:] > v[:-1])
    return order, cut, 0.5 * (v[cut] + v[cut + 1])


def fit_stump(X, y, weights=None) -> tuple[Stump, float]:
    """Minimum weighted-error stump; returns ``(stump, weighted_error)``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y).reshape(-1)
    n, d = X.shape
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=np.float64)
    pos_w = w * (y > 0)
    neg_w = w * (y <= 0)
    total = float(w.sum())
    total_neg = float(neg_w.sum())

    best_err = np.inf
    best = None
    for f in range(d):
        order, cut, thr = split_candidates(X[:, f])
        if cut.size == 0:
            continue
        left_pos = np.cumsum(pos_w[order])[cut]
        left_neg = np.cumsum(neg_w[order])[cut]
        # polarity +1: left predicted -1, right predicted +1
        err_plus = left_pos + (total_neg - left_neg)
        err_minus = total - err_plus
        errs = np.column_stack([err_plus, err_minus]).reshape(-1)
        k = int(np.flatnonzero(errs <= errs.min() + TIE_TOL)[0])
        if errs[k] < best_err - TIE_TOL:
            best_err = float(errs[k])
            best = Stump(f, float(thr[k // 2]), 1 if k % 2 == 0 else -1)
    if best is None:
        # every feature constant: a constant vote for the heavier class
        pol = 1 if pos_w.sum() >= total_neg else -1
        best = Stump(0, float(X[:, 0].min()) - 1.0, pol)
        best_err = float(total_neg if pol == 1 else pos_w.sum())
    return best, max(best_err, 0.0)
