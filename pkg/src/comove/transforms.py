"""Bijections between the constrained parameter set and R^29.

* mu, tau: identity
* phi: tanh
* omega: exp
* (kappa, lambda) and (alpha, beta): two-logit softmax onto the open simplex
  ``{a > 0, b > 0, a + b < 1}``
* nu: 2 + exp
"""

from __future__ import annotations

import numpy as np

from comove.correlation import DccParams
from comove.exceptions import TransformDomainError
from comove.likelihood import SystemParams
from comove.mean import MeanParams
from comove.variance import GarchParams

__all__ = [
    "N_PARAMS",
    "PARAM_NAMES",
    "inverse_transform",
    "natural_from_theta",
    "natural_steps",
    "pack",
    "transform",
    "theta_from_natural",
    "transform_jacobian",
    "unpack",
]

PARAM_NAMES = tuple(
    [f"mu{i}" for i in range(1, 6)]
    + [f"phi{i}" for i in range(1, 6)]
    + ["tau"]
    + [f"omega{i}" for i in range(1, 6)]
    + [f"kappa{i}" for i in range(1, 6)]
    + [f"lambda{i}" for i in range(1, 6)]
    + ["alpha", "beta", "nu"]
)
N_PARAMS = len(PARAM_NAMES)

MU, PHI, TAU = slice(0, 5), slice(5, 10), 10
OMEGA, KAPPA, LAM = slice(11, 16), slice(16, 21), slice(21, 26)
ALPHA, BETA, NU = 26, 27, 28


def pack(params: SystemParams) -> np.ndarray:
    """Natural-scale parameter vector in ``PARAM_NAMES`` order."""
    m, v, c = params.mean, params.variance, params.correlation
    return np.concatenate(
        [m.mu, m.phi, [m.tau], v.omega, v.kappa, v.lam, [c.alpha, c.beta, c.nu]]
    )


def unpack(vec, S) -> SystemParams:
    vec = np.asarray(vec, dtype=float)
    return SystemParams(
        mean=MeanParams(vec[MU], vec[PHI], vec[TAU]),
        variance=GarchParams(vec[OMEGA], vec[KAPPA], vec[LAM]),
        correlation=DccParams(vec[ALPHA], vec[BETA], S, vec[NU]),
    )


def _simplex_forward(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    slack = 1.0 - a - b
    if np.any(a <= 0) or np.any(b <= 0) or np.any(slack <= 0):
        raise TransformDomainError("pair must lie strictly inside a > 0, b > 0, a + b < 1")
    return np.log(a / slack), np.log(b / slack)


def _simplex_inverse(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m = np.maximum(0.0, np.maximum(u, v))
    eu, ev, e0 = np.exp(u - m), np.exp(v - m), np.exp(-m)
    denom = e0 + eu + ev
    return eu / denom, ev / denom


def transform(params: SystemParams) -> np.ndarray:
    """Map valid interior parameters to an unconstrained vector."""
    return theta_from_natural(pack(params))


def theta_from_natural(nat) -> np.ndarray:
    nat = np.asarray(nat, dtype=float)
    theta = nat.copy()
    phi = nat[PHI]
    if np.any(np.abs(phi) >= 1.0):
        raise TransformDomainError("|phi| must be < 1")
    theta[PHI] = np.arctanh(phi)
    if np.any(nat[OMEGA] <= 0):
        raise TransformDomainError("omega must be > 0")
    theta[OMEGA] = np.log(nat[OMEGA])
    theta[KAPPA], theta[LAM] = _simplex_forward(nat[KAPPA], nat[LAM])
    ua, ub = _simplex_forward(nat[ALPHA], nat[BETA])
    theta[ALPHA], theta[BETA] = float(ua), float(ub)
    if not nat[NU] > 2.0:
        raise TransformDomainError("nu must be > 2")
    theta[NU] = np.log(nat[NU] - 2.0)
    return theta


def natural_from_theta(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    nat = theta.copy()
    nat[PHI] = np.tanh(theta[PHI])
    nat[OMEGA] = np.exp(theta[OMEGA])
    nat[KAPPA], nat[LAM] = _simplex_inverse(theta[KAPPA], theta[LAM])
    a, b = _simplex_inverse(theta[ALPHA], theta[BETA])
    nat[ALPHA], nat[BETA] = float(a), float(b)
    nat[NU] = 2.0 + np.exp(theta[NU])
    return nat


def inverse_transform(theta, S) -> SystemParams:
    return unpack(natural_from_theta(theta), S)


def transform_jacobian(theta) -> np.ndarray:
    """d(natural) / d(theta), block diagonal."""
    theta = np.asarray(theta, dtype=float)
    nat = natural_from_theta(theta)
    J = np.zeros((N_PARAMS, N_PARAMS))
    idx = np.arange(N_PARAMS)
    J[idx, idx] = 1.0
    p = idx[PHI]
    J[p, p] = 1.0 - nat[PHI] ** 2
    o = idx[OMEGA]
    J[o, o] = nat[OMEGA]
    for ia, ib in zip(idx[KAPPA], idx[LAM]):
        _pair_block(J, ia, ib, nat[ia], nat[ib])
    _pair_block(J, ALPHA, BETA, nat[ALPHA], nat[BETA])
    J[NU, NU] = nat[NU] - 2.0
    return J


def _pair_block(J, ia, ib, a, b) -> None:
    J[ia, ia] = a * (1.0 - a)
    J[ia, ib] = -a * b
    J[ib, ia] = -a * b
    J[ib, ib] = b * (1.0 - b)


def natural_steps(nat, rel: float, margin: float = 0.25) -> np.ndarray:
    """Finite-difference steps on the natural scale that stay inside the constraints.

    Each step is ``rel * max(1, |x|)`` shrunk to at most ``margin`` times the
    distance to the nearest boundary of that coordinate.
    """
    nat = np.asarray(nat, dtype=float)
    steps = rel * np.maximum(1.0, np.abs(nat))
    room = np.full(N_PARAMS, np.inf)
    room[PHI] = 1.0 - np.abs(nat[PHI])
    room[OMEGA] = nat[OMEGA]
    slack = 1.0 - nat[KAPPA] - nat[LAM]
    room[KAPPA] = np.minimum(nat[KAPPA], slack)
    room[LAM] = np.minimum(nat[LAM], slack)
    ab_slack = 1.0 - nat[ALPHA] - nat[BETA]
    room[ALPHA] = min(nat[ALPHA], ab_slack)
    room[BETA] = min(nat[BETA], ab_slack)
    room[NU] = nat[NU] - 2.0
    return np.minimum(steps, margin * room)
