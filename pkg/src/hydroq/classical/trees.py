"""CART trees and random forests.

Classification splits minimise weighted Gini impurity, regression splits
minimise the summed squared error. Thresholds are midpoints of sorted
unique values; equal-quality splits resolve to the lowest feature index,
then the lowest threshold. Class-count ties at a leaf go to the larger
label (the flood class for {0, 1} or {-1, +1} labels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stumps import TIE_TOL, split_candidates

TASKS = ("classify", "regress")


@dataclass
class Node:
    value: float
    feature: int = -1
    threshold: float = float("nan")
    left: "Node | None" = None
    right: "Node | None" = None
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class TreeModel:
    root: Node
    task: str
    max_depth: int
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        out = np.empty(X.shape[0])
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if node.is_leaf or idx.size == 0:
                out[idx] = node.value
                continue
            go_left = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out.astype(np.int64) if self.task == "classify" else out

    def depth(self) -> int:
        def _d(node):
            return 0 if node.is_leaf else 1 + max(_d(node.left), _d(node.right))

        return _d(self.root)

    def leaves(self) -> list[Node]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend((node.right, node.left))
        return out


def majority(y) -> float:
    vals, counts = np.unique(y, return_counts=True)
    # largest count, ties to the largest label
    return float(vals[np.flatnonzero(counts == counts.max())[-1]])


def _impurity_total(y, task, classes):
    if task == "regress":
        return float(((y - y.mean()) ** 2).sum())
    counts = np.array([(y == c).sum() for c in classes], dtype=np.float64)
    n = y.shape[0]
    return float(n - (counts**2).sum() / n)


def _best_split(X, y, task, classes, features, min_leaf):
    n = y.shape[0]
    best_score, best = np.inf, None
    if task == "classify":
        onehot = (y[:, None] == classes[None, :]).astype(np.float64)
    for f in features:
        order, cut, thr = split_candidates(X[:, f])
        if cut.size == 0:
            continue
        n_left = cut + 1.0
        n_right = n - n_left
        ok = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not ok.any():
            continue
        if task == "classify":
            cum = np.cumsum(onehot[order], axis=0)[cut]
            tot = onehot.sum(axis=0)
            right = tot[None, :] - cum
            # n * weighted Gini = sum over sides of (n_side - sum counts^2 / n_side)
            score = (n_left - (cum**2).sum(1) / n_left) + (n_right - (right**2).sum(1) / n_right)
        else:
            ys = y[order]
            s1 = np.cumsum(ys)[cut]
            s2 = np.cumsum(ys * ys)[cut]
            t1, t2 = ys.sum(), (ys * ys).sum()
            score = (s2 - s1**2 / n_left) + ((t2 - s2) - (t1 - s1) ** 2 / n_right)
        score = np.where(ok, score, np.inf)
        k = int(np.flatnonzero(score <= score.min() + TIE_TOL)[0])
        if score[k] < best_score - TIE_TOL:
            best_score, best = float(score[k]), (int(f), float(thr[k]))
    return best_score, best


def _grow(X, y, depth, cfg):
    task, classes, max_depth, min_leaf, max_features, rng = cfg
    value = majority(y) if task == "classify" else float(y.mean())
    node = Node(value, n_samples=int(y.shape[0]))
    if depth >= max_depth or y.shape[0] < 2 * min_leaf:
        return node
    parent = _impurity_total(y, task, classes)
    if parent <= TIE_TOL:
        return node
    d = X.shape[1]
    if max_features is None or max_features >= d:
        features = range(d)
    else:
        features = np.sort(rng.choice(d, size=max_features, replace=False))
    score, split = _best_split(X, y, task, classes, features, min_leaf)
    if split is None or score >= parent - TIE_TOL:
        return node
    f, thr = split
    mask = X[:, f] <= thr
    node.feature, node.threshold = f, thr
    node.left = _grow(X[mask], y[mask], depth + 1, cfg)
    node.right = _grow(X[~mask], y[~mask], depth + 1, cfg)
    return node


def fit_tree(X, y, max_depth: int = 5, min_leaf: int = 1, task: str = "classify",
             max_features: int | None = None, rng=None) -> TreeModel:
    """Grow a CART tree; degenerate data yields a single leaf."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.shape[0] == 0:
        raise ValueError("empty dataset")
    classes = np.unique(y) if task == "classify" else None
    if max_features is not None and rng is None:
        rng = np.random.default_rng(0)
    cfg = (task, classes, int(max_depth), max(1, int(min_leaf)), max_features, rng)
    return TreeModel(_grow(X, y, 0, cfg), task, int(max_depth), X.shape[1])


@dataclass
class ForestModel:
    trees: list[TreeModel]
    task: str
    max_features: int | None

    def predict(self, X) -> np.ndarray:
        preds = np.array([t.predict(X) for t in self.trees], dtype=np.float64)
        if self.task == "regress":
            return preds.mean(axis=0)
        return np.array([majority(col) for col in preds.T], dtype=np.int64)


def resolve_max_features(rule, d):
    if rule is None:
        return None
    if rule == "sqrt":
        return max(1, int(np.sqrt(d)))
    return max(1, min(int(rule), d))


def fit_forest(X, y, n_trees: int = 100, max_depth: int = 8, seed: int = 0,
               bootstrap: bool = True, max_features="sqrt", min_leaf: int = 1,
               task: str = "classify") -> ForestModel:
    """Bagged CART trees with per-split feature subsampling.

    Tree ``t`` draws its bootstrap rows and feature subsets from
    ``default_rng(seed + t)`` so trees are independent of fitting order.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n, d = X.shape
    m = resolve_max_features(max_features, d)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(seed + t)
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(fit_tree(X[idx], y[idx], max_depth, min_leaf, task, m, rng))
    return ForestModel(trees, task, m)
