"""Shared fixtures and an independent dense-matrix circuit oracle."""

import math

import numpy as np
import pytest

from hydroq import _core

KERNEL_NAMES = ("apply_1q", "apply_cnot", "apply_cz", "apply_phase_rows", "sa_anneal")

_S = 1.0 / math.sqrt(2.0)
_I2 = np.eye(2, dtype=complex)
_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)


def one_qubit_matrix(kind, theta=None):
    if kind == "H":
        return np.array([[_S, _S], [_S, -_S]], dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "RY":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    raise ValueError(kind)


def embed(n, ops):
    """Kronecker product of per-qubit operators; qubit 0 is the rightmost factor."""
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, _I2))
    return out


def dense_unitary(n, kind, targets, theta=None):
    if kind in ("H", "X", "RY", "RZ"):
        return embed(n, {targets[0]: one_qubit_matrix(kind, theta)})
    a, b = targets
    second = np.diag([1, -1]).astype(complex) if kind == "CZ" else one_qubit_matrix("X")
    return embed(n, {a: _P0}) + embed(n, {a: _P1, b: second})


def dense_run(n, gates, initial=None):
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    if initial is not None:
        state = np.array(initial, dtype=complex)
    for kind, targets, theta in gates:
        state = dense_unitary(n, kind, targets, theta) @ state
    return state


def random_gates(rng, n, n_gates):
    kinds = ["H", "X", "RY", "RZ"] + (["CZ", "CNOT"] if n > 1 else [])
    out = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("CZ", "CNOT"):
            targets = tuple(int(t) for t in rng.choice(n, 2, replace=False))
        else:
            targets = (int(rng.integers(n)),)
        theta = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind in ("RY", "RZ") else None
        out.append((kind, targets, theta))
    return out


@pytest.fixture(params=sorted(_core.backends()))
def backend(request, monkeypatch):
    """Route the simulator through each importable kernel backend in turn."""
    mod = _core.backends()[request.param]
    for name in KERNEL_NAMES:
        monkeypatch.setattr(_core, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
