"""Discrete AdaBoost and least-squares gradient boosting, both on stumps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateLabels
from .stumps import fit_stump
from .trees import fit_tree

EPS_CLAMP = 1e-10


def adaboost_alpha(eps: float) -> float:
    e = min(max(eps, EPS_CLAMP), 1.0 - EPS_CLAMP)
    return 0.5 * math.log((1.0 - e) / e)


@dataclass
class BoostModel:
    kind: str
    learners: list = field(default_factory=list)
    weights: list[float] = field(default_factory=list)
    init: float = 0.0
    errors: list[float] = field(default_factory=list)

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        out = np.full(X.shape[0], self.init)
        for learner, w in zip(self.learners, self.weights):
            out += w * learner.predict(X)
        return out

    def predict(self, X) -> np.ndarray:
        """AdaBoost: labels in {-1, +1} (zero score -> +1); GBRT: real values."""
        score = self.decision(X)
        if self.kind == "adaboost":
            return np.where(score >= 0.0, 1, -1).astype(np.int64)
        return score

    def staged_predict(self, X):
        """Predictions after each boosting round."""
        for r in range(1, len(self.learners) + 1):
            yield BoostModel(self.kind, self.learners[:r], self.weights[:r], self.init).predict(X)


def fit_adaboost(X, y, n_rounds: int = 50) -> BoostModel:
    """Binary AdaBoost; stops early when a stump is perfect or no better than chance."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y).reshape(-1)
    if set(np.unique(y).tolist()) <= {0, 1}:
        y = np.where(y == 1, 1, -1)
    if np.unique(y).size < 2:
        raise DegenerateLabels("AdaBoost needs both classes")
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    model = BoostModel("adaboost")
    for _ in range(n_rounds):
        stump, eps = fit_stump(X, y, w)
        if eps >= 0.5:
            if not model.learners:
                model.learners.append(stump)
                model.weights.append(EPS_CLAMP)
                model.errors.append(eps)
            break
        alpha = adaboost_alpha(eps)
        model.learners.append(stump)
        model.weights.append(alpha)
        model.errors.append(eps)
        if eps <= 0.0:
            break
        w = w * np.exp(-alpha * y * stump.predict(X))
        w /= w.sum()
    return model


def fit_gbrt(X, y, n_rounds: int = 100, shrinkage: float = 0.1, max_depth: int = 1) -> BoostModel:
    """Least-squares boosting: each stump fits the current residuals."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    model = BoostModel("gbrt", init=float(y.mean()))
    pred = np.full(y.shape[0], model.init)
    for _ in range(max(n_rounds, 0)):
        tree = fit_tree(X, y - pred, max_depth=max_depth, task="regress")
        model.learners.append(tree)
        model.weights.append(float(shrinkage))
        pred = pred + shrinkage * tree.predict(X)
    return model
