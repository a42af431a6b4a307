"""Microbenchmark: numba vs numpy residual-variance kernel.

Run from the repo root:

    python3 benchmarks/bench_kernels.py

The kernel is called once per candidate parent set inside grow-shrink, with
small conditioning sets (typically 0-10 indices), so per-call overhead
dominates. The numba path wins by avoiding numpy's per-call dispatch cost.
"""

import time
import timeit

import numpy as np

from bosslearn._kernels import (USING_NUMBA, _residual_variance_loops,
                                _residual_variance_numpy, residual_variance)


def make_cases(rng, p=30, count=2000, max_k=10):
    a = rng.standard_normal((p, p))
    cov = a @ a.T + p * np.eye(p)
    cases = []
    for _ in range(count):
        v = int(rng.integers(p))
        rest = np.array([i for i in range(p) if i != v])
        k = int(rng.integers(0, max_k + 1))
        idx = np.sort(rng.choice(rest, size=k, replace=False)).astype(np.int64)
        cases.append((v, idx))
    return cov, cases


def bench(fn, cov, cases, repeats=5):
    def run():
        for v, idx in cases:
            fn(cov, v, idx)

    run()  # warm up (triggers JIT compilation on the numba path)
    best = min(timeit.repeat(run, number=1, repeat=repeats))
    return best / len(cases)


def main():
    rng = np.random.default_rng(0)
    cov, cases = make_cases(rng)
    rows = [("numpy", _residual_variance_numpy)]
    if USING_NUMBA:
        rows.append(("numba", residual_variance))
    else:
        print("numba unavailable or disabled; timing the plain-python loops "
              "instead")
        rows.append(("loops", _residual_variance_loops))
    print(f"{len(cases)} calls, 30x30 covariance, conditioning sets of 0-10")
    results = {}
    for name, fn in rows:
        per_call = bench(fn, cov, cases)
        results[name] = per_call
        print(f"  {name:6s} {per_call * 1e6:8.2f} us/call")
    if len(results) == 2:
        (slow, slow_t), (fast, fast_t) = sorted(results.items(),
                                                key=lambda kv: -kv[1])
        print(f"  {fast} is {slow_t / fast_t:.1f}x faster than {slow}")


if __name__ == "__main__":
    main()
