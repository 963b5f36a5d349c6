"""Student-t quasi log-likelihood of the full AR(1)-DCC(1,1)-GARCH(1,1) system."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from comove._backend import kernels
from comove.correlation import CorrelationPath, DccParams, dcc_filter
from comove.data import SpreadPanel
from comove.exceptions import LikelihoodError, PanelError
from comove.mean import MeanParams, mean_filter
from comove.variance import GarchParams, garch_filter, standardize

__all__ = [
    "COND_MAX",
    "FilterState",
    "LogLikelihood",
    "SystemParams",
    "filter_states",
    "log_likelihood",
    "resolve_h_init",
    "t_log_constant",
]

COND_MAX = 1e12
N_SERIES = 5


@dataclass(frozen=True)
class SystemParams:
    mean: MeanParams
    variance: GarchParams
    correlation: DccParams

    def __post_init__(self) -> None:
        if self.variance.omega.shape != (N_SERIES,):
            raise ValueError("variance parameters must cover 5 series")
        if self.correlation.S.shape != (N_SERIES, N_SERIES):
            raise ValueError("S must be 5x5")

    @property
    def nu(self) -> float:
        return self.correlation.nu


@dataclass(frozen=True)
class LogLikelihood:
    total: float
    per_week: np.ndarray


@dataclass(frozen=True)
class FilterState:
    r: np.ndarray
    h: np.ndarray
    eps: np.ndarray
    path: CorrelationPath


def t_log_constant(nu: float, k: int = N_SERIES) -> float:
    """Normalizing constant of a k-variate t with unit-covariance scaling."""
    return float(gammaln(0.5 * (nu + k)) - gammaln(0.5 * nu) - 0.5 * k * math.log((nu - 2.0) * math.pi))


def resolve_h_init(policy, r: np.ndarray, variance: GarchParams) -> np.ndarray:
    """``"sample"`` (innovation variance), ``"unconditional"``, or explicit values."""
    if isinstance(policy, str):
        if policy == "sample":
            return r.var(axis=0)
        if policy == "unconditional":
            return variance.unconditional_variance
        raise ValueError(f"unknown h_init policy {policy!r}")
    h0 = np.broadcast_to(np.asarray(policy, dtype=float), (r.shape[1],))
    return np.ascontiguousarray(h0)


def _check_panel(panel: SpreadPanel) -> None:
    if len(panel) < 2:
        raise PanelError("likelihood needs at least 2 weeks")


def log_likelihood(
    panel: SpreadPanel,
    params: SystemParams,
    *,
    h_init="sample",
    q_init=None,
) -> LogLikelihood:
    """Per-week log density of the innovations for weeks 2..T.

    The t scale matrix is ``H (nu - 2) / nu`` so that ``H = D R D`` is the
    conditional covariance.
    """
    _check_panel(panel)
    r = np.ascontiguousarray(mean_filter(panel.x, panel.b, params.mean))
    return _loglik_from_innovations(r, params, h_init=h_init, q_init=q_init)


def _loglik_from_innovations(r, params: SystemParams, *, h_init="sample", q_init=None,
                             S=None) -> LogLikelihood:
    var, dcc = params.variance, params.correlation
    h0 = resolve_h_init(h_init, r, var)
    if np.any(~(h0 > 0)):
        raise LikelihoodError("initial variances must be positive")
    S = dcc.S if S is None else S
    q0 = S if q_init is None else np.asarray(q_init, dtype=float)
    out = np.empty(r.shape[0])
    bad = kernels.system_loglik(
        r, var.omega, var.kappa, var.lam, np.ascontiguousarray(h0, dtype=float),
        dcc.alpha, dcc.beta, np.ascontiguousarray(S), np.ascontiguousarray(q0),
        dcc.nu, t_log_constant(dcc.nu, r.shape[1]), COND_MAX, out,
    )
    if bad:
        raise LikelihoodError(
            f"conditional covariance singular or ill-conditioned at innovation row {bad - 1}"
        )
    return LogLikelihood(float(math.fsum(out)), out)


def filter_states(panel: SpreadPanel, params: SystemParams, *, h_init="sample",
                  q_init=None) -> FilterState:
    """Full filter stack: innovations, variances, standardized residuals, Q and R."""
    _check_panel(panel)
    r = mean_filter(panel.x, panel.b, params.mean)
    h = garch_filter(r, params.variance, resolve_h_init(h_init, r, params.variance))
    eps = standardize(r, h)
    return FilterState(r, h, eps, dcc_filter(eps, params.correlation, q_init))
