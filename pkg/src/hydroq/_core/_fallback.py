"""NumPy implementations of the compiled kernels.

Signatures and in-place semantics match ``_kernels.pyx`` exactly.
"""

import math

import numpy as np


def _split(states, q):
    # (batch, high bits, bit q, low bits) view; qubit q is index bit q.
    batch, dim = states.shape
    stride = 1 << q
    return states.reshape(batch, dim // (2 * stride), 2, stride)


def apply_1q(states, m00, m01, m10, m11, q):
    view = _split(states, q)
    a0 = view[:, :, 0, :].copy()
    a1 = view[:, :, 1, :]
    view[:, :, 0, :] = m00 * a0 + m01 * a1
    view[:, :, 1, :] = m10 * a0 + m11 * a1


def _bit_masks(dim, *qubits):
    idx = np.arange(dim)
    return [(idx >> q) & 1 == 1 for q in qubits]


def apply_cnot(states, control, target):
    dim = states.shape[1]
    c_on, t_on = _bit_masks(dim, control, target)
    src = np.nonzero(c_on & ~t_on)[0]
    dst = src | (1 << target)
    tmp = states[:, src].copy()
    states[:, src] = states[:, dst]
    states[:, dst] = tmp


def apply_cz(states, q0, q1):
    dim = states.shape[1]
    on0, on1 = _bit_masks(dim, q0, q1)
    states[:, on0 & on1] *= -1.0


def apply_phase_rows(states, phase0, phase1, q):
    view = _split(states, q)
    view[:, :, 0, :] *= np.asarray(phase0)[:, None, None]
    view[:, :, 1, :] *= np.asarray(phase1)[:, None, None]


def sa_anneal(matrix, linear, w0, temps, uniforms):
    n = matrix.shape[0]
    w = np.array(w0, dtype=np.uint8)
    best_w = w.copy()
    field = matrix @ w.astype(np.float64)
    diag = np.diag(matrix)
    energy = 0.0
    best = 0.0
    for s, t in enumerate(temps):
        u = uniforms[s]
        for i in range(n):
            d = 1.0 - 2.0 * w[i]
            de = d * (2.0 * field[i] + linear[i]) + diag[i]
            if de <= 0.0 or u[i] < math.exp(-de / t):
                w[i] = 1 - w[i]
                energy += de
                field += d * matrix[:, i]
                if energy < best:
                    best = energy
                    best_w[:] = w
    return best_w
