"""Classification and regression metrics with explicit 0/0 conventions.

Every ratio with a zero denominator is reported as 0.0 and named in
``MetricsReport.flags`` so that a degenerate classifier is visible rather
than silently scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import DimMismatch, EmptyInput

TASKS = ("classification", "regression", "forecast")
NAN = float("nan")


@dataclass
class MetricsReport:
    task: str
    model_name: str = ""
    seed: int | None = None
    n: int = 0
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    accuracy: float = NAN
    precision: float = NAN
    recall: float = NAN
    f1: float = NAN
    balanced_accuracy: float = NAN
    mae: float = NAN
    mse: float = NAN
    r2: float = NAN
    training_time_s: float = NAN
    flags: list[str] = field(default_factory=list)

    @property
    def confusion(self) -> list[list[int]]:
        """``[[TN, FP], [FN, TP]]`` (rows are true labels 0, 1)."""
        return [[self.tn, self.fp], [self.fn, self.tp]]

    def to_items(self, timing: bool = True) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            if f.name == "training_time_s" and not timing:
                continue
            v = getattr(self, f.name)
            if f.name == "flags":
                v = ";".join(v)
            elif isinstance(v, float):
                v = repr(v)
            out.append((f.name, "" if v is None else str(v)))
        return out


def _ratio(num, den, flag, flags):
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def metrics_from_confusion(confusion, model_name: str = "", seed=None) -> MetricsReport:
    """Metrics from ``[[TN, FP], [FN, TP]]``."""
    (tn, fp), (fn, tp) = [[int(v) for v in row] for row in confusion]
    if min(tn, fp, fn, tp) < 0:
        raise ValueError("confusion counts must be non-negative")
    n = tn + fp + fn + tp
    if n == 0:
        raise EmptyInput("confusion matrix is empty")
    flags: list[str] = []
    accuracy = (tp + tn) / n
    precision = _ratio(tp, tp + fp, "precision_undefined", flags)
    recall = _ratio(tp, tp + fn, "recall_undefined", flags)
    tnr = _ratio(tn, tn + fp, "specificity_undefined", flags)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1_undefined", flags)
    balanced = (recall + tnr) / 2
    return MetricsReport("classification", model_name, seed, n, tp, tn, fp, fn,
                         accuracy, precision, recall, f1, balanced, flags=flags)


def _binary(y, name):
    y = np.asarray(y).reshape(-1)
    vals = set(np.unique(y).tolist())
    if vals <= {0, 1}:
        return y.astype(np.int64)
    if vals <= {-1, 1}:
        return (y == 1).astype(np.int64)
    raise ValueError(f"{name} must hold binary labels in {{0, 1}} (or {{-1, +1}}), got {sorted(vals)[:5]}")


def confusion_counts(y_true, y_pred) -> list[list[int]]:
    t, p = _binary(y_true, "y_true"), _binary(y_pred, "y_pred")
    if t.shape != p.shape:
        raise DimMismatch(f"{t.shape[0]} labels vs {p.shape[0]} predictions")
    tp = int(np.sum((t == 1) & (p == 1)))
    tn = int(np.sum((t == 0) & (p == 0)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    return [[tn, fp], [fn, tp]]


def classification_metrics(y_true, y_pred, model_name: str = "", seed=None) -> MetricsReport:
    """Confusion counts and derived ratios for binary labels (1 is flood)."""
    if np.asarray(y_true).size == 0 and np.asarray(y_pred).size == 0:
        raise EmptyInput("no labels")
    return metrics_from_confusion(confusion_counts(y_true, y_pred), model_name, seed)


def regression_metrics(y_true, y_pred, model_name: str = "", seed=None,
                       task: str = "regression") -> MetricsReport:
    """MAE, MSE and R^2 (R^2 is 0.0 when the truth has zero variance)."""
    t = np.asarray(y_true, dtype=np.float64).reshape(-1)
    p = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    if t.shape != p.shape:
        raise DimMismatch(f"{t.shape[0]} targets vs {p.shape[0]} predictions")
    if t.size == 0:
        raise EmptyInput("no targets")
    err = t - p
    flags = []
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    mse = float(np.mean(err**2))
    if ss_tot == 0.0:
        flags.append("r2_zero_variance")
        r2 = 0.0
    else:
        r2 = 1.0 - float(np.sum(err**2)) / ss_tot
    if not math.isfinite(mse):
        flags.append("non_finite_predictions")
    return MetricsReport(task, model_name, seed, int(t.size), mae=float(np.mean(np.abs(err))),
                         mse=mse, r2=r2, flags=flags)
