"""Learning curves with forward-chaining chronological folds.

For a fraction ``f`` the first ``f * N`` rows are cut into ``k + 1``
contiguous blocks; fold ``j`` trains on blocks ``0..j-1`` and validates on
block ``j``. Nothing is shuffled, so validation rows always follow the
training rows in time.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    n_train: int
    train_mean: float
    train_std: float
    cv_mean: float
    cv_std: float
    n_folds: int


def _score(task, y, pred):
    y = np.asarray(y)
    if task == "classification":
        return float(np.mean(np.asarray(pred) == y))
    y = y.astype(np.float64)
    ss = float(np.sum((y - y.mean()) ** 2))
    return 0.0 if ss == 0.0 else 1.0 - float(np.sum((y - pred) ** 2)) / ss


def _enough(task, y):
    if task != "classification":
        return y.shape[0] >= 2
    _, counts = np.unique(y, return_counts=True)
    return counts.size >= 2 and counts.min() >= 2


def learning_curve(model_factory, dataset, fractions=(0.25, 0.5, 0.75, 1.0), k_folds: int = 3,
                   seed: int = 0) -> list[CurvePoint]:
    """Score ``model_factory(seed)`` adapters on growing chronological prefixes.

    Scores are accuracy for classification and R^2 otherwise. Fractions
    whose prefix has fewer than 2 samples of some class are skipped with
    a warning, as are folds whose training blocks are single-class.
    """
    fr = [float(f) for f in fractions]
    if not fr or any(not 0.0 < f <= 1.0 for f in fr) or any(b <= a for a, b in zip(fr, fr[1:])):
        raise ConfigError("fractions must be increasing within (0, 1]")
    if k_folds < 1:
        raise ConfigError("k_folds must be >= 1")
    task = dataset.task
    n = len(dataset)
    out = []
    for f in fr:
        m = min(n, math.ceil(f * n - 1e-9))
        y = dataset.y[:m]
        if not _enough(task, y):
            log.warning("fraction %.3f: too few samples per class, skipped", f)
            continue
        edges = np.linspace(0, m, k_folds + 2).round().astype(int)
        tr_scores, cv_scores = [], []
        for j in range(1, k_folds + 1):
            a, b = edges[j], edges[j + 1]
            if b <= a or not _enough(task, dataset.y[:a]):
                continue
            model = model_factory(seed)
            model.fit(dataset.X[:a], dataset.y[:a], dataset.feature_names)
            tr_scores.append(_score(task, dataset.y[:a], model.predict(dataset.X[:a])))
            cv_scores.append(_score(task, dataset.y[a:b], model.predict(dataset.X[a:b])))
        if not cv_scores:
            log.warning("fraction %.3f: no usable folds, skipped", f)
            continue
        out.append(CurvePoint(f, m, float(np.mean(tr_scores)), float(np.std(tr_scores)),
                              float(np.mean(cv_scores)), float(np.std(cv_scores)), len(cv_scores)))
    return out
