"""ZZ feature map and fidelity kernel for the quantum-kernel SVM.

Features must already be scaled to ``[0, pi]``; out-of-range values are
rejected, never clipped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import DimMismatch, FeatureScaleError, IoError
from .qsim import MAX_QUBITS, ParamCircuit, probabilities, run_circuit, zero_batch

_SCALE_TOL = 1e-12
_SQ2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class FeatureMapSpec:
    n_features: int
    reps: int = 2
    entanglement: str = "linear"

    def __post_init__(self):
        if not 1 <= self.n_features <= MAX_QUBITS:
            raise ValueError(f"n_features must be in [1, {MAX_QUBITS}]")
        if not 1 <= self.reps <= 4:
            raise ValueError("reps must be in [1, 4]")
        if self.entanglement not in ("linear", "ring"):
            raise ValueError(f"unknown entanglement {self.entanglement!r}")

    def pairs(self) -> list[tuple[int, int]]:
        d = self.n_features
        out = [(i, i + 1) for i in range(d - 1)]
        if self.entanglement == "ring" and d > 2:
            out.append((d - 1, 0))
        return out


def _check_features(x, spec, where=""):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != spec.n_features:
        raise DimMismatch(f"{where}expected {spec.n_features} features, got {x.shape[0]}")
    bad = ~np.isfinite(x) | (x < -_SCALE_TOL) | (x > math.pi + _SCALE_TOL)
    if bad.any():
        i = int(np.argmax(bad))
        raise FeatureScaleError(f"{where}feature {i} = {x[i]!r} outside [0, pi]")
    return x


def zz_feature_map(x, spec: FeatureMapSpec) -> ParamCircuit:
    """Bound circuit: per block H on all qubits, RZ(2 x_i), then ZZ phases."""
    x = _check_features(x, spec)
    circ = ParamCircuit(spec.n_features)
    for _ in range(spec.reps):
        for q in range(spec.n_features):
            circ.add("H", q)
        for q in range(spec.n_features):
            circ.add("RZ", q, theta=2.0 * x[q])
        for i, j in spec.pairs():
            circ.add("CNOT", i, j)
            circ.add("RZ", j, theta=2.0 * (math.pi - x[i]) * (math.pi - x[j]))
            circ.add("CNOT", i, j)
    return circ


def fidelity_kernel(x, y, spec: FeatureMapSpec) -> float:
    """``|<phi(y)|phi(x)>|^2`` via compute-uncompute, read as P(0...0)."""
    circ = zz_feature_map(x, spec).compose(zz_feature_map(y, spec).inverse())
    return float(probabilities(run_circuit(circ))[0])


def _rz_rows(states, angles, q):
    # RZ(2a) = diag(exp(-i a), exp(i a)) with a per row
    _core.apply_phase_rows(states, np.exp(-1j * angles), np.exp(1j * angles), q)


def encode_batch(X, spec: FeatureMapSpec) -> np.ndarray:
    """Feature-map states for every row of ``X`` as a ``(n, 2**d)`` array.

    Gate-for-gate the same circuit as :func:`zz_feature_map`, with the
    data-dependent RZ angles applied row-wise.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimMismatch("X must be a 2-D sample matrix")
    for r in range(X.shape[0]):
        _check_features(X[r], spec, where=f"row {r}: ")
    states = zero_batch(spec.n_features, X.shape[0])
    for _ in range(spec.reps):
        for q in range(spec.n_features):
            _core.apply_1q(states, _SQ2, _SQ2, _SQ2, -_SQ2, q)
        for q in range(spec.n_features):
            _rz_rows(states, X[:, q].copy(), q)
        for i, j in spec.pairs():
            _core.apply_cnot(states, i, j)
            _rz_rows(states, (math.pi - X[:, i]) * (math.pi - X[:, j]), j)
            _core.apply_cnot(states, i, j)
    return states


@dataclass
class KernelMatrix:
    values: np.ndarray
    row_ids: list = field(default_factory=list)
    col_ids: list = field(default_factory=list)

    @property
    def shape(self):
        return self.values.shape


def kernel_matrix(X, Y=None, spec: FeatureMapSpec | None = None, *,
                  row_ids=None, col_ids=None, chunk: int = 512) -> KernelMatrix:
    """Fidelity Gram matrix ``K[i, j] = k(X_i, Y_j)``.

    Each sample's state is prepared once; entries are squared overlaps,
    computed in row chunks. ``Y=None`` means ``Y = X`` and the result is
    symmetrised with a unit diagonal.
    """
    if spec is None:
        raise ValueError("spec is required")
    X = np.asarray(X, dtype=np.float64)
    same = Y is None
    sx = encode_batch(X, spec)
    sy = sx if same else encode_batch(np.asarray(Y, dtype=np.float64), spec)
    values = np.empty((sx.shape[0], sy.shape[0]))
    conj_t = sy.conj().T
    for start in range(0, sx.shape[0], chunk):
        block = sx[start:start + chunk] @ conj_t
        values[start:start + chunk] = block.real ** 2 + block.imag ** 2
    if same:
        values = 0.5 * (values + values.T)
        np.fill_diagonal(values, 1.0)
    np.clip(values, 0.0, 1.0, out=values)
    n_rows, n_cols = values.shape
    row_ids = list(range(n_rows)) if row_ids is None else list(row_ids)
    if col_ids is None:
        col_ids = list(row_ids) if same else list(range(n_cols))
    return KernelMatrix(values, row_ids, list(col_ids))


def write_kernel_csv(km: KernelMatrix, path) -> None:
    """Header row of column sample ids, then one numeric row per sample."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(km.col_ids)
            for row in km.values:
                w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_kernel_csv(path) -> KernelMatrix:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    header, body = rows[0], rows[1:]
    values = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
    return KernelMatrix(values.reshape(len(body), len(header)), list(range(len(body))), header)
