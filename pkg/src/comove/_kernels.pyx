# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled recursions. Signatures mirror ``_kernels_py``."""

import numpy as np

from libc.math cimport log, log1p, sqrt


def garch_recursion(const double[:, ::1] r, const double[::1] omega,
                    const double[::1] kappa, const double[::1] lam,
                    const double[::1] h_init, double[:, ::1] h):
    cdef Py_ssize_t n = r.shape[0], k = r.shape[1], t, i
    if n == 0:
        return
    with nogil:
        for i in range(k):
            h[0, i] = h_init[i]
        for t in range(1, n):
            for i in range(k):
                h[t, i] = omega[i] + kappa[i] * r[t - 1, i] * r[t - 1, i] + lam[i] * h[t - 1, i]


cdef inline int _normalize(double[:, ::1] q, double[:, ::1] out, double[::1] sd,
                           Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(k):
        if q[i, i] <= 0.0:
            return 1
        sd[i] = sqrt(q[i, i])
    for i in range(k):
        out[i, i] = 1.0
        for j in range(i + 1, k):
            v = q[i, j] / (sd[i] * sd[j])
            out[i, j] = v
            out[j, i] = v
    return 0


cdef inline void _q_update(double[:, ::1] q, const double[:, ::1] S, const double[:, ::1] eps,
                           Py_ssize_t tprev, double alpha, double beta,
                           Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double w = 1.0 - alpha - beta, v
    for i in range(k):
        for j in range(i, k):
            v = w * S[i, j] + alpha * eps[tprev, i] * eps[tprev, j] + beta * q[i, j]
            q[i, j] = v
            q[j, i] = v


def dcc_recursion(const double[:, ::1] eps, double alpha, double beta,
                  const double[:, ::1] S, const double[:, ::1] q_init,
                  double[:, :, ::1] Q, double[:, :, ::1] R):
    cdef Py_ssize_t n = eps.shape[0], k = eps.shape[1], t, i, j
    cdef double[:, ::1] q = np.array(q_init, dtype=np.float64, order="C")
    cdef double[::1] sd = np.empty(k)
    cdef int bad = 0
    with nogil:
        for t in range(n):
            if t > 0:
                _q_update(q, S, eps, t - 1, alpha, beta, k)
            for i in range(k):
                for j in range(k):
                    Q[t, i, j] = q[i, j]
            if _normalize(q, R[t], sd, k):
                bad = <int>(t + 1)
                break
    return bad


def system_loglik(const double[:, ::1] r, const double[::1] omega,
                  const double[::1] kappa, const double[::1] lam,
                  const double[::1] h_init, double alpha, double beta,
                  const double[:, ::1] S, const double[:, ::1] q_init,
                  double nu, double const_term, double cond_max, double[::1] out):
    """Per-week Student-t log density of the innovations; returns 0 or 1 + failing row."""
    cdef Py_ssize_t n = r.shape[0], k = r.shape[1], t, i, j, m
    cdef double[:, ::1] q = np.array(q_init, dtype=np.float64, order="C")
    cdef double[:, ::1] rho = np.empty((k, k))
    cdef double[:, ::1] L = np.zeros((k, k))
    cdef double[:, ::1] eps = np.empty((n, k))
    cdef double[::1] h = np.array(h_init, dtype=np.float64)
    cdef double[::1] sd = np.empty(k)
    cdef double[::1] z = np.empty(k)
    cdef double s, quad, logdet, piv, pmin, pmax, half = 0.5 * (nu + k)
    cdef int bad = 0
    with nogil:
        for t in range(n):
            if t > 0:
                for i in range(k):
                    h[i] = omega[i] + kappa[i] * r[t - 1, i] * r[t - 1, i] + lam[i] * h[i]
                _q_update(q, S, eps, t - 1, alpha, beta, k)
            logdet = 0.0
            for i in range(k):
                if not h[i] > 0.0:
                    bad = 1
                    break
                eps[t, i] = r[t, i] / sqrt(h[i])
                logdet += log(h[i])
            if bad or _normalize(q, rho, sd, k):
                bad = <int>(t + 1)
                break
            # Cholesky of the correlation matrix, pivot-ratio condition guard
            pmin = 1e300
            pmax = 0.0
            for j in range(k):
                s = rho[j, j]
                for m in range(j):
                    s -= L[j, m] * L[j, m]
                if not s > 0.0:
                    bad = 1
                    break
                piv = sqrt(s)
                L[j, j] = piv
                if piv < pmin:
                    pmin = piv
                if piv > pmax:
                    pmax = piv
                for i in range(j + 1, k):
                    s = rho[i, j]
                    for m in range(j):
                        s -= L[i, m] * L[j, m]
                    L[i, j] = s / piv
            if bad or (pmax / pmin) * (pmax / pmin) > cond_max:
                bad = <int>(t + 1)
                break
            quad = 0.0
            for i in range(k):
                s = eps[t, i]
                for m in range(i):
                    s -= L[i, m] * z[m]
                z[i] = s / L[i, i]
                quad += z[i] * z[i]
                logdet += 2.0 * log(L[i, i])
            out[t] = const_term - 0.5 * logdet - half * log1p(quad / (nu - 2.0))
    return bad
