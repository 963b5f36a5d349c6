"""Central finite differences.

Evaluations at distinct points may run on a thread pool whose size comes
from ``COMOVE_THREADS`` (0 or unset: sequential). Each derivative coordinate
is computed from the same points in the same order either way, so threaded
and sequential results are identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["central_gradient", "central_hessian", "central_jacobian", "n_threads"]


def n_threads() -> int:
    try:
        return max(0, int(os.environ.get("COMOVE_THREADS", "0")))
    except ValueError:
        return 0


def _map(fn, points):
    workers = n_threads()
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def _steps(x: np.ndarray, rel: float) -> np.ndarray:
    h = rel * np.maximum(1.0, np.abs(x))
    # make x + h exactly representable
    return (x + h) - x


def central_jacobian(fn, x, rel: float = 1e-5, steps=None) -> np.ndarray:
    """Jacobian of a vector function, shape (len(fn(x)), len(x)).

    ``steps`` overrides the default ``rel * max(1, |x|)`` per coordinate.
    """
    x = np.asarray(x, dtype=float)
    h = _steps(x, rel) if steps is None else (x + steps) - x
    points = []
    for j in range(x.size):
        up, dn = x.copy(), x.copy()
        up[j] += h[j]
        dn[j] -= h[j]
        points.extend((up, dn))
    values = _map(lambda p: np.atleast_1d(np.asarray(fn(p), dtype=float)), points)
    cols = [(values[2 * j] - values[2 * j + 1]) / (2.0 * h[j]) for j in range(x.size)]
    return np.column_stack(cols)


def central_gradient(fn, x, rel: float = 1e-5, steps=None) -> np.ndarray:
    return central_jacobian(fn, x, rel, steps)[0]


def central_hessian(fn, x, rel: float = 1e-4, steps=None) -> np.ndarray:
    """Four-point central Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = _steps(x, rel) if steps is None else (x + steps) - x
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    points = []
    for i, j in pairs:
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            p = x.copy()
            p[i] += si * h[i]
            p[j] += sj * h[j]
            points.append(p)
    values = _map(lambda p: float(fn(p)), points)
    H = np.empty((n, n))
    for m, (i, j) in enumerate(pairs):
        fpp, fpm, fmp, fmm = values[4 * m : 4 * m + 4]
        H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
    return H
