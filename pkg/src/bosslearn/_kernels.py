"""Hot numeric kernels for local scoring.

The residual-variance kernel dominates runtime for data-driven searches: it is
called once per candidate parent set inside the grow-shrink loop. A numba
version is used when available; set BOSSLEARN_NO_NUMBA=1 to force the
pure-numpy path (see benchmarks/bench_kernels.py for a comparison).

Both paths return NaN for a singular or non-positive-definite conditioning
submatrix; callers turn that into an error naming the variables involved.
"""

import math
import os

import numpy as np

__all__ = ["residual_variance", "USING_NUMBA"]


def _residual_variance_numpy(cov, v, idx):
    """resvar(v | idx) = cov[v,v] - cov[v,idx] @ cov[idx,idx]^-1 @ cov[idx,v]."""
    k = idx.shape[0]
    if k == 0:
        return float(cov[v, v])
    a = cov[np.ix_(idx, idx)]
    b = cov[idx, v]
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return math.nan
    z = np.linalg.solve(chol, b)
    return float(cov[v, v] - z @ z)


def _residual_variance_loops(cov, v, idx):
    # Same computation with explicit loops; compiled under numba.
    k = idx.shape[0]
    if k == 0:
        return cov[v, v]
    a = np.empty((k, k))
    b = np.empty(k)
    scale = 0.0
    for i in range(k):
        b[i] = cov[idx[i], v]
        for j in range(k):
            a[i, j] = cov[idx[i], idx[j]]
        if a[i, i] > scale:
            scale = a[i, i]
    tol = 1e-13 * scale
    # In-place Cholesky (lower triangle).
    for j in range(k):
        s = a[j, j]
        for t in range(j):
            s -= a[j, t] * a[j, t]
        if s <= tol:
            return np.nan
        d = math.sqrt(s)
        a[j, j] = d
        for i in range(j + 1, k):
            s2 = a[i, j]
            for t in range(j):
                s2 -= a[i, t] * a[j, t]
            a[i, j] = s2 / d
    # Forward solve L z = b, reusing b for z.
    q = 0.0
    for i in range(k):
        s = b[i]
        for t in range(i):
            s -= a[i, t] * b[t]
        b[i] = s / a[i, i]
        q += b[i] * b[i]
    return cov[v, v] - q


USING_NUMBA = False
residual_variance = _residual_variance_numpy

if os.environ.get("BOSSLEARN_NO_NUMBA", "").lower() not in ("1", "true", "yes"):
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        residual_variance = njit(cache=True)(_residual_variance_loops)
        USING_NUMBA = True
