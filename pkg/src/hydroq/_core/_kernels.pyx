# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for statevector updates and simulated annealing.

Every routine mirrors a function in ``_fallback.py`` and must stay
numerically interchangeable with it. States are ``(batch, 2**n)``
C-contiguous complex128 arrays and are updated in place. Qubit ``q``
is bit ``q`` of the amplitude index.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def apply_1q(double complex[:, ::1] states, double complex m00,
             double complex m01, double complex m10, double complex m11,
             Py_ssize_t q):
    cdef Py_ssize_t b, i, j, dim = states.shape[1], stride = 1 << q
    cdef double complex a0, a1
    for b in range(states.shape[0]):
        for i in range(dim):
            if i & stride:
                continue
            j = i | stride
            a0 = states[b, i]
            a1 = states[b, j]
            states[b, i] = m00 * a0 + m01 * a1
            states[b, j] = m10 * a0 + m11 * a1


def apply_cnot(double complex[:, ::1] states, Py_ssize_t control,
               Py_ssize_t target):
    cdef Py_ssize_t b, i, j, dim = states.shape[1]
    cdef Py_ssize_t cbit = 1 << control, tbit = 1 << target
    cdef double complex tmp
    for b in range(states.shape[0]):
        for i in range(dim):
            if (i & cbit) and not (i & tbit):
                j = i | tbit
                tmp = states[b, i]
                states[b, i] = states[b, j]
                states[b, j] = tmp


def apply_cz(double complex[:, ::1] states, Py_ssize_t q0, Py_ssize_t q1):
    cdef Py_ssize_t b, i, dim = states.shape[1]
    cdef Py_ssize_t mask = (1 << q0) | (1 << q1)
    for b in range(states.shape[0]):
        for i in range(dim):
            if (i & mask) == mask:
                states[b, i] = -states[b, i]


def apply_phase_rows(double complex[:, ::1] states,
                     double complex[::1] phase0, double complex[::1] phase1,
                     Py_ssize_t q):
    """Per-row diagonal gate diag(phase0[b], phase1[b]) on qubit ``q``."""
    cdef Py_ssize_t b, i, dim = states.shape[1], stride = 1 << q
    for b in range(states.shape[0]):
        for i in range(dim):
            if i & stride:
                states[b, i] = states[b, i] * phase1[b]
            else:
                states[b, i] = states[b, i] * phase0[b]


def sa_anneal(double[:, ::1] matrix, double[::1] linear,
              cnp.uint8_t[::1] w0, double[::1] temps,
              double[:, ::1] uniforms):
    """Sequential-sweep Metropolis annealing; returns the best-seen bits."""
    cdef Py_ssize_t n = matrix.shape[0], sweeps = temps.shape[0]
    cdef Py_ssize_t s, i, j
    cdef double t, d, de, energy = 0.0, best = 0.0
    w_arr = np.array(w0, dtype=np.uint8)
    best_arr = w_arr.copy()
    field_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.uint8_t[::1] w = w_arr
    cdef cnp.uint8_t[::1] best_w = best_arr
    cdef double[::1] field = field_arr
    for i in range(n):
        for j in range(n):
            if w[j]:
                field[i] += matrix[i, j]
    for s in range(sweeps):
        t = temps[s]
        for i in range(n):
            d = 1.0 - 2.0 * w[i]
            de = d * (2.0 * field[i] + linear[i]) + matrix[i, i]
            if de <= 0.0 or uniforms[s, i] < exp(-de / t):
                w[i] = 1 - w[i]
                energy += de
                for j in range(n):
                    field[j] += d * matrix[j, i]
                if energy < best:
                    best = energy
                    for j in range(n):
                        best_w[j] = w[j]
    return best_arr
