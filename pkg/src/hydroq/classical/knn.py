"""Brute-force k-nearest neighbours (Euclidean).

Distance ties go to the lower training index; an even label vote goes to
the positive (flood) class.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimMismatch, EmptyTrainSet


def _neighbours(train_X, x, k):
    d2 = ((train_X - x) ** 2).sum(axis=1)
    return np.argsort(d2, kind="stable")[:k]


def knn_predict(train_X, train_y, x, k: int, task: str = "classify"):
    """Predict for one query vector (returns a scalar) or a 2-D query matrix."""
    train_X = np.asarray(train_X, dtype=np.float64)
    if train_X.ndim == 1:
        train_X = train_X.reshape(-1, 1)
    train_y = np.asarray(train_y).reshape(-1)
    n = train_X.shape[0]
    if n == 0:
        raise EmptyTrainSet("KNN needs at least one training sample")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if task not in ("classify", "regress"):
        raise ValueError(f"unknown task {task!r}")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim <= 1
    X = x.reshape(1, -1) if single else x
    if X.shape[1] != train_X.shape[1]:
        raise DimMismatch(f"expected {train_X.shape[1]} features, got {X.shape[1]}")

    if task == "classify":
        pos = train_y > 0
        neg_label = -1 if np.any(train_y < 0) else 0
        out = np.empty(X.shape[0], dtype=np.int64)
    else:
        out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        idx = _neighbours(train_X, X[r], k)
        if task == "classify":
            n_pos = int(pos[idx].sum())
            out[r] = 1 if 2 * n_pos >= k else neg_label
        else:
            out[r] = float(np.mean(train_y[idx]))
    return out[0] if single else out
