"""Dense statevector simulator.

Qubit ordering is little-endian: qubit ``q`` is bit ``q`` of the amplitude
index, so on two qubits the basis order is ``|q1 q0> = 00, 01, 10, 11``.
Global phase is kept as computed; compare probabilities or expectations
unless the phase is fixed analytically.

States are treated as immutable: every operation copies its input. The
batched entry points (:func:`run_circuit_batch`) work on ``(batch, 2**n)``
arrays and drive the compiled kernels in :mod:`hydroq._core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import InvalidQubit, ParamArityMismatch

MAX_QUBITS = 12

GATE_KINDS = ("H", "X", "RY", "RZ", "CZ", "CNOT")
_ARITY = {"H": 1, "X": 1, "RY": 1, "RZ": 1, "CZ": 2, "CNOT": 2}
_ROTATIONS = ("RY", "RZ")

_SQ2 = 1.0 / math.sqrt(2.0)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def _ry(theta):
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(theta):
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]],
        dtype=np.complex128,
    )


@dataclass(frozen=True)
class Gate:
    """A single gate. ``targets`` is ``(control, target)`` for CNOT."""

    kind: str
    targets: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(set(self.targets)) != len(self.targets):
            raise InvalidQubit(f"repeated target in {self.targets}")
        if any(t < 0 for t in self.targets):
            raise InvalidQubit(f"negative qubit index in {self.targets}")
        if self.kind in _ROTATIONS:
            if self.theta is None:
                raise ValueError(f"{self.kind} needs an angle")
            object.__setattr__(self, "theta", float(self.theta))

    def matrix(self) -> np.ndarray:
        """Unitary in the little-endian basis of ``targets``.

        For two-qubit gates basis index ``b0 + 2*b1`` where ``b0`` belongs
        to ``targets[0]``.
        """
        if self.kind == "H":
            return _H.copy()
        if self.kind == "X":
            return _X.copy()
        if self.kind == "RY":
            return _ry(self.theta)
        if self.kind == "RZ":
            return _rz(self.theta)
        if self.kind == "CZ":
            return np.diag([1, 1, 1, -1]).astype(np.complex128)
        # CNOT, control = targets[0] = low bit: flips the high bit when b0 = 1
        m = np.zeros((4, 4), dtype=np.complex128)
        for b0 in (0, 1):
            for b1 in (0, 1):
                out_b1 = b1 ^ b0
                m[b0 + 2 * out_b1, b0 + 2 * b1] = 1.0
        return m

    def inverse(self) -> "Gate":
        if self.kind in _ROTATIONS:
            return Gate(self.kind, self.targets, -self.theta)
        return self


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ValueError(
                f"{amps.shape[0]} amplitudes for {self.n_qubits} qubits"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        _check_width(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _check_width(n_qubits):
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidQubit(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def _check_targets(targets, n_qubits):
    for t in targets:
        if not 0 <= t < n_qubits:
            raise InvalidQubit(f"qubit {t} out of range for {n_qubits} qubits")


def _apply_inplace(states, gate):
    kind, tg = gate.kind, gate.targets
    if kind == "CNOT":
        _core.apply_cnot(states, tg[0], tg[1])
    elif kind == "CZ":
        _core.apply_cz(states, tg[0], tg[1])
    else:
        m = gate.matrix()
        _core.apply_1q(states, m[0, 0], m[0, 1], m[1, 0], m[1, 1], tg[0])


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return ``gate`` applied to ``state``; the input is not modified."""
    _check_targets(gate.targets, state.n_qubits)
    work = np.array(state.amplitudes, dtype=np.complex128).reshape(1, -1)
    _apply_inplace(work, gate)
    return StateVector(state.n_qubits, work[0])


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def _z_signs(n_qubits, qubit):
    bits = (np.arange(1 << n_qubits) >> qubit) & 1
    return 1.0 - 2.0 * bits


def expectation_z(state: StateVector, qubit: int) -> float:
    _check_targets((qubit,), state.n_qubits)
    return float(np.dot(_z_signs(state.n_qubits, qubit), probabilities(state)))


def expectation_z_batch(states: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    """Row-wise ``<Z_qubit>`` for a ``(batch, 2**n)`` array."""
    _check_targets((qubit,), n_qubits)
    return (np.abs(states) ** 2) @ _z_signs(n_qubits, qubit)


@dataclass(frozen=True)
class Param:
    """Reference to entry ``index`` of a circuit's parameter vector."""

    index: int


@dataclass(frozen=True)
class Op:
    kind: str
    targets: tuple[int, ...]
    binding: float | Param | None = None


@dataclass
class ParamCircuit:
    """Ordered gate list whose rotation angles are fixed or free."""

    n_qubits: int
    ops: list[Op] = field(default_factory=list)
    n_params: int = 0

    def __post_init__(self):
        _check_width(self.n_qubits)
        for op in self.ops:
            self._validate(op)

    def _validate(self, op):
        if op.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {op.kind!r}")
        _check_targets(op.targets, self.n_qubits)
        if isinstance(op.binding, Param) and not 0 <= op.binding.index < self.n_params:
            raise ParamArityMismatch(
                f"parameter index {op.binding.index} >= n_params {self.n_params}"
            )

    def add(self, kind, *targets, theta=None, param=None):
        """Append a gate; pass ``param=j`` to bind it to free parameter j."""
        binding = Param(int(param)) if param is not None else theta
        op = Op(kind, tuple(int(t) for t in targets), binding)
        if isinstance(op.binding, Param):
            self.n_params = max(self.n_params, op.binding.index + 1)
        self._validate(op)
        self.ops.append(op)
        return self

    @property
    def is_bound(self) -> bool:
        return not any(isinstance(op.binding, Param) for op in self.ops)

    def gates(self, params=None) -> list[Gate]:
        if params is None:
            params = np.zeros(0)
        params = np.asarray(params, dtype=np.float64).reshape(-1)
        if params.shape[0] != self.n_params:
            raise ParamArityMismatch(
                f"expected {self.n_params} parameters, got {params.shape[0]}"
            )
        out = []
        for op in self.ops:
            theta = op.binding
            if isinstance(theta, Param):
                theta = params[theta.index]
            out.append(Gate(op.kind, op.targets, theta if op.kind in _ROTATIONS else None))
        return out

    def bind(self, params) -> "ParamCircuit":
        bound = ParamCircuit(self.n_qubits)
        for g in self.gates(params):
            bound.ops.append(Op(g.kind, g.targets, g.theta))
        return bound

    def inverse(self) -> "ParamCircuit":
        """Adjoint circuit; only defined for bound circuits."""
        if not self.is_bound:
            raise ParamArityMismatch("bind parameters before inverting")
        inv = ParamCircuit(self.n_qubits)
        for g in reversed(self.gates()):
            g = g.inverse()
            inv.ops.append(Op(g.kind, g.targets, g.theta))
        return inv

    def compose(self, other: "ParamCircuit") -> "ParamCircuit":
        """``self`` followed by ``other``; both must be bound."""
        if other.n_qubits != self.n_qubits:
            raise InvalidQubit("circuit widths differ")
        if not (self.is_bound and other.is_bound):
            raise ParamArityMismatch("compose only bound circuits")
        return ParamCircuit(self.n_qubits, list(self.ops) + list(other.ops))


def run_circuit(circuit: ParamCircuit, params=None, initial: StateVector | None = None) -> StateVector:
    """Run ``circuit`` from ``|0...0>`` (or ``initial``)."""
    gates = circuit.gates(params)
    if initial is None:
        initial = StateVector.zero(circuit.n_qubits)
    elif initial.n_qubits != circuit.n_qubits:
        raise InvalidQubit("initial state width differs from circuit")
    work = np.array(initial.amplitudes, dtype=np.complex128).reshape(1, -1)
    for g in gates:
        _apply_inplace(work, g)
    return StateVector(circuit.n_qubits, work[0])


def run_circuit_batch(circuit: ParamCircuit, params, initial: np.ndarray) -> np.ndarray:
    """Apply the same bound circuit to every row of ``initial`` (copied)."""
    gates = circuit.gates(params)
    work = np.array(initial, dtype=np.complex128, order="C")
    if work.ndim != 2 or work.shape[1] != 1 << circuit.n_qubits:
        raise InvalidQubit("initial batch must have shape (batch, 2**n_qubits)")
    for g in gates:
        _apply_inplace(work, g)
    return work


def zero_batch(n_qubits: int, batch: int) -> np.ndarray:
    _check_width(n_qubits)
    out = np.zeros((batch, 1 << n_qubits), dtype=np.complex128)
    out[:, 0] = 1.0
    return out
