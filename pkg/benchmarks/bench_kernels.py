"""Benchmark the compiled kernels against the NumPy fallback.

Times the exponentiated-gradient minimization and the grid-oracle scan on
seeded 2x2 instances, checks that both backends return the same values, and
prints a small table with the speedup.

    python benchmarks/bench_kernels.py [--solves 20] [--grids 5]
"""

import argparse
import time

import numpy as np

from knentropy.kernels import get_backend


def instances(count, seed=0):
    out = []
    for t in range(count):
        rng = np.random.default_rng([seed, t])
        out.append((rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2), size=2)))
    return out


def bench_solves(backend, probs, alpha):
    s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
    values = []
    t0 = time.perf_counter()
    for p, W in probs:
        R0 = np.full((2, 2), 0.5)
        val, _, _, _ = backend.ac_eg_minimize(p, W, R0, s, coef, 0.1, 1e-12, 10_000, 1e-12)
        values.append(val)
    return time.perf_counter() - t0, values


def bench_grids(backend, probs, alpha, n=1001):
    s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
    grid = np.linspace(0, 1, n)
    values = []
    t0 = time.perf_counter()
    for p, W in probs:
        val, _, _ = backend.ac_grid_scan(p, W, s, coef, grid, grid)
        values.append(val)
    return time.perf_counter() - t0, values


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--solves", type=int, default=20)
    parser.add_argument("--grids", type=int, default=5)
    args = parser.parse_args()

    fallback = get_backend("python")
    try:
        compiled = get_backend("compiled")
    except ImportError:
        print("compiled backend not available; install with the Cython extension built")
        return

    print(f"{'kernel':<28}{'compiled':>12}{'python':>12}{'speedup':>10}{'max |diff|':>14}")
    for label, fn, count in (
        ("eg_minimize (alpha=2)", bench_solves, args.solves),
        ("eg_minimize (alpha=0.5)", lambda b, p, a=0.5: bench_solves(b, p, a), args.solves),
        ("grid_scan 1001^2 (alpha=2)", bench_grids, args.grids),
    ):
        probs = instances(count)
        alpha = 0.5 if "0.5" in label else 2.0
        tc, vc = fn(compiled, probs, alpha)
        tp, vp = fn(fallback, probs, alpha)
        diff = max(abs(a - b) for a, b in zip(vc, vp))
        print(f"{label:<28}{1e3 * tc / count:>10.2f}ms{1e3 * tp / count:>10.2f}ms"
              f"{tp / tc:>9.1f}x{diff:>14.2e}")


if __name__ == "__main__":
    main()
