"""Benchmark the hot kernels under both execution paths.

The kernel path is fixed at import time by VOTEPATTERNS_NO_NUMBA, so this
script times the current process's path and, with --both, re-invokes
itself in a subprocess with the flag set to collect the pure-NumPy
fallback numbers and print a comparison. Results are bit-identical across
paths; only the speed differs.

Usage:
    python benchmarks/bench_kernels.py --both
    VOTEPATTERNS_NO_NUMBA=1 python benchmarks/bench_kernels.py
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from votepatterns import _kernels
from votepatterns._rng import rng_for
from votepatterns.cc import WeightedSignedGraph, brute_force, solve_exact, solve_heuristic


def random_weights(rng, n, density=0.7):
    w = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i):
            if rng.random() < density:
                w[i, j] = w[j, i] = rng.uniform(-1.0, 1.0)
    return w


def balanced_weights(rng, n, blocks):
    labels = rng.integers(0, blocks, size=n)
    w = np.where(labels[:, None] == labels[None, :], 1.0, -1.0)
    np.fill_diagonal(w, 0.0)
    return w


def bench(label, fn, repeat=3):
    fn()  # warm-up (jit compile on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    best = min(times)
    return label, best


def graph_of(w):
    return WeightedSignedGraph(tuple(f"n{i:03d}" for i in range(w.shape[0])), w)


def run_benchmarks():
    rng = rng_for(0, "bench")
    w9 = random_weights(rng, 9)
    w10 = random_weights(rng, 10, density=1.0)
    w40 = balanced_weights(rng, 40, 3)
    w60 = random_weights(rng, 60, density=1.0)
    labels60 = rng.integers(0, 4, size=60).astype(np.int64)

    cases = [
        ("imbalance n=60 x1000",
         lambda: [_kernels.assignment_cost(w60, labels60) for _ in range(1000)]),
        ("brute_force n=9 (21k partitions)", lambda: brute_force(graph_of(w9))),
        ("brute_force n=10 (116k partitions)", lambda: brute_force(graph_of(w10))),
        ("solve_exact n=10 random", lambda: solve_exact(graph_of(w10))),
        ("solve_exact n=40 balanced", lambda: solve_exact(graph_of(w40))),
        ("solve_heuristic n=60", lambda: solve_heuristic(graph_of(w60))),
    ]
    return [bench(label, fn) for label, fn in cases]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--both", action="store_true",
                        help="also time the pure-NumPy fallback in a subprocess")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    args = parser.parse_args()

    rows = run_benchmarks()
    mode = "numba" if _kernels.NUMBA_ENABLED else "numpy-fallback"
    if args.json:
        print(json.dumps({"mode": mode, "rows": rows}))
        return

    print(f"kernel path: {mode}")
    other = None
    if args.both and _kernels.NUMBA_ENABLED:
        env = dict(os.environ, VOTEPATTERNS_NO_NUMBA="1")
        proc = subprocess.run([sys.executable, __file__, "--json"], env=env,
                              capture_output=True, text=True, check=True)
        other = dict((r[0], r[1]) for r in json.loads(proc.stdout)["rows"])
        print(f"{'case':<38} {'numba':>12} {'numpy':>12} {'speedup':>9}")
        for label, t in rows:
            t2 = other[label]
            print(f"{label:<38} {t * 1e3:>10.2f}ms {t2 * 1e3:>10.2f}ms {t2 / t:>8.1f}x")
    else:
        for label, t in rows:
            print(f"{label:<38} {t * 1e3:>10.2f}ms")


if __name__ == "__main__":
    main()
