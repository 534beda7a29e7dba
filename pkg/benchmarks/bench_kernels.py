"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each case runs on identical inputs for every importable backend, checks
that the outputs agree, and prints the best wall-clock time.
"""

import argparse
import math
import time

import numpy as np

from hydroq._core import backends


def _states(n_qubits, batch, rng):
    s = rng.standard_normal((batch, 1 << n_qubits)) + 1j * rng.standard_normal((batch, 1 << n_qubits))
    s /= np.linalg.norm(s, axis=1, keepdims=True)
    return np.ascontiguousarray(s)


def case_gates(mod, args):
    states, = args
    c, s = math.cos(0.3), math.sin(0.3)
    n = int(math.log2(states.shape[1]))
    for q in range(n):
        mod.apply_1q(states, c, -s, s, c, q)
    for q in range(n - 1):
        mod.apply_cnot(states, q, q + 1)
        mod.apply_cz(states, q, (q + 2) % n)
    return states


def case_phase(mod, args):
    states, p0, p1 = args
    for q in range(int(math.log2(states.shape[1]))):
        mod.apply_phase_rows(states, p0, p1, q)
    return states


def case_anneal(mod, args):
    matrix, linear, w0, temps, uniforms = args
    return mod.sa_anneal(matrix, linear, w0, temps, uniforms)


def build_cases(rng):
    q = 16
    a = rng.standard_normal((q, q))
    matrix = np.triu(a, 1)
    matrix = matrix + matrix.T
    sweeps = 2000
    temps = 10.0 * 0.97 ** np.arange(sweeps)
    p0 = np.exp(-0.5j * rng.random(2048))
    return {
        "gates 10 qubits x 256 states": (case_gates, lambda: (_states(10, 256, rng),)),
        "phase rows 8 qubits x 2048 states": (
            case_phase, lambda: (_states(8, 2048, rng), p0, np.conj(p0))),
        "annealing Q=16, 2000 sweeps": (
            case_anneal, lambda: (matrix, rng.standard_normal(q), rng.integers(0, 2, q).astype(np.uint8),
                                  temps, rng.random((sweeps, q)))),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()
    mods = backends()
    print("backends:", ", ".join(mods))
    rng = np.random.default_rng(0)
    for label, (fn, make) in build_cases(rng).items():
        inputs = make()
        times, outs = {}, {}
        for name, mod in mods.items():
            best = math.inf
            for _ in range(opts.repeat):
                args = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in inputs)
                t0 = time.perf_counter()
                outs[name] = fn(mod, args)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        ref = outs["python"]
        agree = all(np.allclose(o, ref, atol=1e-12) for o in outs.values())
        cells = "  ".join(f"{k}={v * 1e3:9.3f} ms" for k, v in times.items())
        speed = ""
        if "compiled" in times:
            speed = f"  speedup x{times['python'] / times['compiled']:.1f}"
        print(f"{label:<36}{cells}{speed}  agree={agree}")


if __name__ == "__main__":
    main()
