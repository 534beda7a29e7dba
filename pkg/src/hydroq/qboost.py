"""QBoost: sparse weak-learner selection as a QUBO.

For a pool of ``Q`` stumps with training predictions ``h_i(x_s)`` and labels
``y_s`` in {-1, +1}, the selection ``w`` in {0, 1}^Q minimises

    sum_s ((1/Q) sum_i w_i h_i(x_s) - y_s)^2 + lam * sum_i w_i

which expands to ``w' M w + linear . w + constant`` with

    M[i, j]   = (1/Q^2) sum_s h_i(x_s) h_j(x_s)     (i != j, diagonal 0)
    linear[i] = (1/Q^2) sum_s h_i(x_s)^2 - (2/Q) sum_s h_i(x_s) y_s + lam
    constant  = sum_s y_s^2

using ``w_i^2 = w_i``. Simulated annealing stands in for an annealer; an
exhaustive solver checks it on small instances.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .classical.stumps import Stump, fit_stump
from .errors import DegenerateLabels, DimMismatch, FormatError, IoError, ScheduleError, TooLarge

log = logging.getLogger(__name__)

MAX_POOL = 64
MAX_EXHAUSTIVE = 20
VALIDATION_FRACTION = 0.2


def as_pm1(y) -> np.ndarray:
    """Labels as int {-1, +1}; accepts {0, 1} or {-1, +1}."""
    y = np.asarray(y).reshape(-1)
    vals = set(np.unique(y).tolist())
    if vals <= {0, 1}:
        return np.where(y == 1, 1, -1).astype(np.int64)
    if vals <= {-1, 1}:
        return y.astype(np.int64)
    raise ValueError(f"labels must be binary, got {sorted(vals)[:5]}")


def bootstrap_indices(n: int, rng) -> np.ndarray:
    """``n`` draws with replacement (about 63% distinct rows)."""
    return rng.integers(0, n, size=n)


@dataclass
class WeakLearnerPool:
    learners: list[Stump]
    predictions: np.ndarray  # (N, Q) in {-1, +1}

    @property
    def size(self) -> int:
        return len(self.learners)


def train_stump_pool(X, y, Q: int = 20, seed: int = 0) -> WeakLearnerPool:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = as_pm1(y)
    if np.unique(y).size < 2:
        raise DegenerateLabels("stump pool needs both classes")
    if not 1 <= Q <= MAX_POOL:
        raise ValueError(f"pool size must be in [1, {MAX_POOL}]")
    rng = np.random.default_rng(seed)
    learners = []
    for _ in range(Q):
        idx = bootstrap_indices(X.shape[0], rng)
        stump, _ = fit_stump(X[idx], y[idx])
        learners.append(stump)
    preds = np.column_stack([s.predict(X) for s in learners])
    return WeakLearnerPool(learners, preds)


@dataclass
class QuboProblem:
    matrix: np.ndarray
    linear: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        self.linear = np.ascontiguousarray(self.linear, dtype=np.float64).reshape(-1)
        n = self.linear.shape[0]
        if self.matrix.shape != (n, n):
            raise DimMismatch(f"matrix {self.matrix.shape} vs {n} linear terms")
        if not np.allclose(self.matrix, self.matrix.T, rtol=0.0, atol=1e-12):
            raise ValueError("QUBO matrix must be symmetric")
        self.constant = float(self.constant)

    @property
    def size(self) -> int:
        return self.linear.shape[0]

    def energy(self, w) -> float:
        w = np.asarray(w, dtype=np.float64).reshape(-1)
        return float(w @ self.matrix @ w + self.linear @ w + self.constant)

    def energies(self, W) -> np.ndarray:
        W = np.asarray(W, dtype=np.float64)
        return np.einsum("ki,ij,kj->k", W, self.matrix, W) + W @ self.linear + self.constant

    def restrict(self, keep) -> "QuboProblem":
        keep = np.asarray(keep, dtype=np.int64)
        return QuboProblem(self.matrix[np.ix_(keep, keep)], self.linear[keep], self.constant)


@dataclass(frozen=True)
class BinarySolution:
    w: np.ndarray
    energy: float

    @property
    def selected(self) -> np.ndarray:
        return np.flatnonzero(self.w)


def build_qubo(pool: WeakLearnerPool, labels, lam: float) -> QuboProblem:
    H = np.asarray(pool.predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if y.shape[0] != H.shape[0]:
        raise DimMismatch(f"{y.shape[0]} labels for {H.shape[0]} cached predictions")
    if lam < 0:
        raise ValueError("lam must be >= 0")
    q = H.shape[1]
    gram = H.T @ H
    matrix = gram / q**2
    np.fill_diagonal(matrix, 0.0)
    linear = np.diag(gram) / q**2 - (2.0 / q) * (H.T @ y) + lam
    return QuboProblem(matrix, linear, float(y @ y))


def _bits(ks, n):
    # w_0 is the most significant bit so integer order is lexicographic order
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ks[:, None] >> shifts[None, :]) & 1).astype(np.float64)


def solve_qubo_exhaustive(problem: QuboProblem, chunk: int = 1 << 16) -> BinarySolution:
    """Global minimum over all 2^Q assignments; ties -> lexicographically smallest w."""
    n = problem.size
    if n > MAX_EXHAUSTIVE:
        raise TooLarge(f"exhaustive search limited to {MAX_EXHAUSTIVE} variables, got {n}")
    best_e, best_k = np.inf, 0
    for start in range(0, 1 << n, chunk):
        ks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        e = problem.energies(_bits(ks, n))
        m = float(e.min())
        tol = 1e-12 * max(1.0, abs(m))
        if m < best_e - tol:
            best_e = m
            best_k = int(ks[np.flatnonzero(e <= m + tol)[0]])
    w = _bits(np.array([best_k]), n)[0].astype(np.uint8)
    return BinarySolution(w, problem.energy(w))


@dataclass(frozen=True)
class Schedule:
    T0: float = 10.0
    alpha: float = 0.97
    sweeps: int = 2000

    def __post_init__(self):
        if not (self.T0 > 0 and 0 < self.alpha < 1 and self.sweeps >= 1):
            raise ScheduleError(f"invalid annealing schedule {self}")

    def temperatures(self) -> np.ndarray:
        temps = self.T0 * self.alpha ** np.arange(self.sweeps, dtype=np.float64)
        return np.maximum(temps, 1e-300)


def solve_qubo_sa(problem: QuboProblem, schedule: Schedule = Schedule(), seed: int = 0) -> BinarySolution:
    """Single-bit-flip Metropolis annealing with geometric cooling.

    Each sweep visits bits in index order at temperature ``T0 * alpha**k``;
    the best assignment seen is returned. All randomness is drawn up front
    from ``seed``, so compiled and Python kernels consume identical streams.
    """
    if not isinstance(schedule, Schedule):
        schedule = Schedule(**schedule)
    rng = np.random.default_rng(seed)
    n = problem.size
    w0 = rng.integers(0, 2, size=n).astype(np.uint8)
    uniforms = rng.random((schedule.sweeps, n))
    best = _core.sa_anneal(problem.matrix, problem.linear, w0, schedule.temperatures(), uniforms)
    best = np.asarray(best, dtype=np.uint8)
    return BinarySolution(best, problem.energy(best))


@dataclass
class Ensemble:
    members: list[Stump]
    selected: np.ndarray
    flip: bool = False
    metadata: dict = field(default_factory=dict)


def ensemble_predict(ensemble: Ensemble, X) -> np.ndarray:
    """Sign of the mean member vote in {-1, +1}; a zero vote predicts +1 (flood)."""
    X = np.asarray(X, dtype=np.float64)
    votes = np.mean([m.predict(X) for m in ensemble.members], axis=0)
    out = np.where(votes >= 0.0, 1, -1).astype(np.int64)
    return -out if ensemble.flip else out


def _accuracy(ens, X, y):
    return float(np.mean(ensemble_predict(ens, X) == y)) if len(y) else 0.0


def _select(pool, problem, schedule, seed):
    return solve_qubo_sa(problem, schedule, seed).selected


def _make_ensemble(pool, selected, X, y):
    if selected.size == 0:
        errs = np.mean(pool.predictions != y[:, None], axis=0)
        best = int(np.argmin(errs))
        return Ensemble([pool.learners[best]], np.array([best]), metadata={"fallback": True})
    return Ensemble([pool.learners[i] for i in selected], selected, metadata={"fallback": False})


def train_qboost(X, y, Q: int = 20, lam: float | None = None, variant: str = "qboost",
                 seed: int = 0, schedule: Schedule = Schedule(), auto_flip: bool = False) -> Ensemble:
    """Fit a QBoost or QBoostPlus ensemble.

    ``qboost_plus`` holds out the chronologically last 20% of rows, fits the
    pool on the rest, then re-solves the QUBO restricted to the selected
    learners for ``lam`` in {0, lam/2, lam, 2 lam}, keeping whichever subset
    (the unrefined one included) scores best on the held-out rows.
    ``lam`` defaults to ``0.02 * N`` for the rows the pool is fit on.
    """
    if variant not in ("qboost", "qboost_plus"):
        raise ValueError(f"unknown variant {variant!r}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = as_pm1(y)
    n = X.shape[0]
    n_fit = n
    if variant == "qboost_plus":
        n_fit = n - max(1, int(round(VALIDATION_FRACTION * n)))
    Xf, yf = X[:n_fit], y[:n_fit]
    Xv, yv = X[n_fit:], y[n_fit:]
    if lam is None:
        lam = 0.02 * n_fit

    pool = train_stump_pool(Xf, yf, Q, seed)
    problem = build_qubo(pool, yf, lam)
    selected = _select(pool, problem, schedule, seed)
    ens = _make_ensemble(pool, selected, Xf, yf)
    ens.metadata.update(variant=variant, lam=float(lam), pool_size=Q, n_fit=n_fit)

    if variant == "qboost_plus":
        base_acc = _accuracy(ens, Xv, yv)
        best_acc, best_ens, best_lam = base_acc, ens, float(lam)
        if not ens.metadata["fallback"]:
            for lam_k in (0.0, lam / 2.0, lam, 2.0 * lam):
                sub_pool = WeakLearnerPool(
                    [pool.learners[i] for i in selected], pool.predictions[:, selected]
                )
                sub = build_qubo(sub_pool, yf, lam_k)
                keep = _select(sub_pool, sub, schedule, seed)
                if keep.size == 0:
                    continue
                cand = Ensemble([sub_pool.learners[i] for i in keep], selected[keep],
                                metadata={"fallback": False})
                acc = _accuracy(cand, Xv, yv)
                if acc > best_acc:
                    best_acc, best_ens, best_lam = acc, cand, float(lam_k)
        best_ens.metadata.update(
            ens.metadata,
            fallback=best_ens.metadata["fallback"],
            base_validation_accuracy=base_acc,
            validation_accuracy=best_acc,
            lam_refined=best_lam,
        )
        ens = best_ens

    train_acc = _accuracy(ens, Xf, yf)
    ens.metadata["train_accuracy"] = train_acc
    ens.metadata["polarity_warning"] = train_acc < 0.5
    if train_acc < 0.5:
        log.warning(
            "polarity check: ensemble training accuracy %.3f < 0.5; labels may be inverted%s",
            train_acc, " (auto-flip applied)" if auto_flip else "",
        )
        ens.flip = bool(auto_flip)
    if ens.metadata["fallback"]:
        log.info("QUBO selected no learners; fell back to the single best stump")
    return ens


def write_qubo(problem: QuboProblem, path, comment: str | None = None) -> None:
    """Triplet text: ``constant c`` header, then ``i j coeff`` lines.

    ``i == j`` lines carry linear + diagonal; ``i < j`` lines carry the full
    pair coefficient ``2 * M[i, j]``. Lines starting with ``#`` are comments.
    """
    lines = ["# hydroq QUBO: energy = sum(coeff * w_i * w_j) + constant"]
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"constant {problem.constant!r}")
    n = problem.size
    for i in range(n):
        lines.append(f"{i} {i} {float(problem.linear[i] + problem.matrix[i, i])!r}")
        for j in range(i + 1, n):
            c = 2.0 * problem.matrix[i, j]
            if c != 0.0:
                lines.append(f"{i} {j} {float(c)!r}")
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_qubo(path, size: int | None = None) -> QuboProblem:
    try:
        with open(path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    constant = 0.0
    triplets = []
    for ln in raw:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "constant":
            constant = float(parts[1])
            continue
        if len(parts) != 3:
            raise FormatError(f"bad QUBO line: {ln!r}")
        triplets.append((int(parts[0]), int(parts[1]), float(parts[2])))
    n = size if size is not None else 1 + max((max(i, j) for i, j, _ in triplets), default=-1)
    matrix = np.zeros((n, n))
    linear = np.zeros(n)
    for i, j, c in triplets:
        if i == j:
            linear[i] += c
        else:
            matrix[i, j] += c / 2.0
            matrix[j, i] += c / 2.0
    return QuboProblem(matrix, linear, constant)
