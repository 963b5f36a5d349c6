"""Pure-Python (NumPy) versions of the compiled recursions in ``_kernels.pyx``.

Used when the extension is not built, or when ``COMOVE_BACKEND=python``.
Loops over time are sequential; work inside a time step is vectorized.
"""

from __future__ import annotations

import numpy as np


def garch_recursion(r, omega, kappa, lam, h_init, h) -> None:
    n = r.shape[0]
    if n == 0:
        return
    h[0] = h_init
    r2 = r * r
    for t in range(1, n):
        h[t] = omega + kappa * r2[t - 1] + lam * h[t - 1]


def _q_path(eps, alpha, beta, S, q_init, Q) -> None:
    base = (1.0 - alpha - beta) * S
    q = np.array(q_init, dtype=float)
    Q[0] = q
    for t in range(1, eps.shape[0]):
        e = eps[t - 1]
        q = base + alpha * np.outer(e, e) + beta * q
        q = np.triu(q) + np.triu(q, 1).T
        Q[t] = q


def _normalize_path(Q, R) -> int:
    d = np.diagonal(Q, axis1=1, axis2=2)
    bad = np.flatnonzero(~np.all(d > 0.0, axis=1))
    if bad.size:
        return int(bad[0]) + 1
    sd = np.sqrt(d)
    np.divide(Q, sd[:, :, None] * sd[:, None, :], out=R)
    idx = np.arange(Q.shape[1])
    R[:, idx, idx] = 1.0
    return 0


def dcc_recursion(eps, alpha, beta, S, q_init, Q, R) -> int:
    if eps.shape[0] == 0:
        return 0
    _q_path(eps, alpha, beta, S, q_init, Q)
    return _normalize_path(Q, R)


def system_loglik(r, omega, kappa, lam, h_init, alpha, beta, S, q_init,
                  nu, const_term, cond_max, out) -> int:
    n, k = r.shape
    if n == 0:
        return 0
    h = np.empty_like(r)
    garch_recursion(r, omega, kappa, lam, h_init, h)
    bad_h = np.flatnonzero(~np.all(h > 0.0, axis=1))
    if bad_h.size:
        return int(bad_h[0]) + 1
    eps = r / np.sqrt(h)
    Q = np.empty((n, k, k))
    R = np.empty((n, k, k))
    _q_path(eps, alpha, beta, S, q_init, Q)
    bad = _normalize_path(Q, R)
    if bad:
        return bad
    try:
        L = np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        eig_min = np.linalg.eigvalsh(R)[:, 0]
        return int(np.flatnonzero(~(eig_min > 0.0))[0]) + 1
    piv = np.diagonal(L, axis1=1, axis2=2)
    ratio = piv.max(axis=1) / piv.min(axis=1)
    ill = np.flatnonzero(ratio * ratio > cond_max)
    if ill.size:
        return int(ill[0]) + 1
    z = np.linalg.solve(L, eps[:, :, None])[:, :, 0]
    quad = np.einsum("ti,ti->t", z, z)
    logdet = np.log(h).sum(axis=1) + 2.0 * np.log(piv).sum(axis=1)
    out[:] = const_term - 0.5 * logdet - 0.5 * (nu + k) * np.log1p(quad / (nu - 2.0))
    return 0
