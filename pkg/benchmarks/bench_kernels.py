"""Benchmark the compiled window kernel against the pure-numpy fallback.

Runs the same batch of Gaussian paths through both backends with identical
normal draws, checks agreement of the accumulated integrals, and reports the
per-step throughput of each.

Usage: python3 benchmarks/bench_kernels.py [n_paths] [windows]
"""

import sys
import time

import numpy as np

from pssmplab._kernels import _py

try:
    from pssmplab._kernels import _core
except ImportError:
    _core = None


def run(impl, n, windows, steps=128, dt=0.01, b=0.5, sigma=1.0, seed=7):
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0],
                                                            dtype=np.uint64)))
    x = np.zeros(n)
    a = np.zeros(n)
    t = np.zeros(n)
    w = np.zeros(n)
    done = np.zeros(n, np.uint8)
    zeta = np.full(n, np.inf)
    target = np.zeros(n)
    elapsed = 0.0
    for _ in range(windows):
        normals = rng.standard_normal((steps, n))
        tic = time.perf_counter()
        impl.advance_window(x, a, t, w, done, zeta, target, normals,
                            b, sigma, dt, 1.0, -1.0, _py.STOP_AT_ZETA)
        elapsed += time.perf_counter() - tic
    return a, elapsed


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
    windows = int(sys.argv[2]) if len(sys.argv) > 2 else 40
    steps = 128
    total = n * windows * steps

    a_py, t_py = run(_py, n, windows)
    print(f"python backend: {t_py:.3f}s  ({total / t_py / 1e6:.1f} Msteps/s)")
    if _core is None:
        print("compiled backend not available")
        return
    a_c, t_c = run(_core, n, windows)
    print(f"cython backend: {t_c:.3f}s  ({total / t_c / 1e6:.1f} Msteps/s)")
    print(f"speedup: {t_py / t_c:.1f}x")
    rel = np.max(np.abs(a_py - a_c) / np.maximum(a_py, 1e-300))
    print(f"max relative difference of integrals: {rel:.2e}")


if __name__ == "__main__":
    main()
