"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests regress on an intercept (``trend="c"``) by default; ``trend="ct"``
adds a linear time trend and ``trend="n"`` drops deterministic terms.
Critical values come from MacKinnon (2010) response surfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from comove.exceptions import DegenerateRegressionError, PreconditionError

__all__ = ["UnitRootReport", "adf_test", "mackinnon_critical_values", "pp_test"]

MIN_LENGTH = 20

# tau_c(p) = b0 + b1/T + b2/T**2 + b3/T**3, one regressor (N=1)
_RESPONSE_SURFACE = {
    "n": {
        "1%": (-2.56574, -2.2358, -3.627, 0.0),
        "5%": (-1.94100, -0.2686, -3.365, 31.223),
        "10%": (-1.61682, 0.2656, -2.714, 25.364),
    },
    "c": {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.040),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    "ct": {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.380),
    },
}


@dataclass(frozen=True)
class UnitRootReport:
    series_label: str
    test_name: str
    statistic: float
    lags_or_bandwidth: int
    critical_values: dict[str, float]
    nobs: int

    @property
    def reject_at_5pct(self) -> bool:
        return self.statistic < self.critical_values["5%"]


def mackinnon_critical_values(nobs: int, trend: str = "c") -> dict[str, float]:
    """Finite-sample critical values for the Dickey-Fuller t statistic."""
    try:
        table = _RESPONSE_SURFACE[trend]
    except KeyError:
        raise ValueError(f"unknown trend {trend!r}") from None
    return {
        level: b[0] + b[1] / nobs + b[2] / nobs**2 + b[3] / nobs**3
        for level, b in table.items()
    }


def _check_series(series) -> np.ndarray:
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if y.shape[0] < MIN_LENGTH:
        raise PreconditionError(f"series too short: {y.shape[0]} < {MIN_LENGTH}")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    if np.ptp(y) == 0.0:
        raise DegenerateRegressionError("constant series: unit-root regression is degenerate")
    return y


def _deterministic(nobs: int, trend: str) -> np.ndarray:
    cols = []
    if trend in ("c", "ct"):
        cols.append(np.ones(nobs))
    if trend == "ct":
        cols.append(np.arange(1.0, nobs + 1.0))
    return np.column_stack(cols) if cols else np.empty((nobs, 0))


def _ols(y: np.ndarray, X: np.ndarray):
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateRegressionError("unit-root regression design is rank deficient")
    resid = y - X @ coef
    return coef, resid


def _t_first(y: np.ndarray, X: np.ndarray) -> tuple[float, float, np.ndarray]:
    """OLS t-ratio and standard error of the first regressor."""
    coef, resid = _ols(y, X)
    dof = X.shape[0] - X.shape[1]
    s2 = resid @ resid / dof
    if s2 <= 0:
        raise DegenerateRegressionError("unit-root regression has zero residual variance")
    xtx_inv = np.linalg.inv(X.T @ X)
    se = math.sqrt(s2 * xtx_inv[0, 0])
    return coef[0] / se, se, resid


def _adf_design(y: np.ndarray, lags: int, nobs: int, trend: str):
    dy = np.diff(y)
    # rows cover the last ``nobs`` differences
    level = y[-nobs - 1 : -1]
    cols = [level]
    for j in range(1, lags + 1):
        cols.append(dy[-nobs - j : len(dy) - j])
    X = np.column_stack(cols + [_deterministic(nobs, trend)])
    return dy[-nobs:], X


def adf_test(
    series,
    max_lag: int | str = "auto",
    *,
    trend: str = "c",
    label: str = "",
) -> UnitRootReport:
    """Augmented Dickey-Fuller test.

    ``max_lag="auto"`` searches lags ``0..ceil(12 (T/100)^(1/4))`` and keeps the
    AIC minimizer, comparing every candidate on the common sample; an integer
    fixes the augmentation order.
    """
    y = _check_series(series)
    T = y.shape[0]
    k_det = {"n": 0, "c": 1, "ct": 2}[trend]
    if max_lag == "auto":
        maxlag = int(math.ceil(12.0 * (T / 100.0) ** 0.25))
        maxlag = max(0, min(T // 2 - k_det - 1, maxlag))
        nobs = T - maxlag - 1
        best_ic, lags = math.inf, 0
        for p in range(maxlag + 1):
            dy, X = _adf_design(y, p, nobs, trend)
            _, resid = _ols(dy, X)
            ssr = resid @ resid
            ic = nobs * math.log(ssr / nobs) + 2 * X.shape[1]
            if ic < best_ic:
                best_ic, lags = ic, p
    else:
        lags = int(max_lag)
        if lags < 0:
            raise ValueError("max_lag must be non-negative")
    nobs = T - lags - 1
    dy, X = _adf_design(y, lags, nobs, trend)
    stat, _, _ = _t_first(dy, X)
    return UnitRootReport(
        series_label=label,
        test_name="ADF",
        statistic=float(stat),
        lags_or_bandwidth=lags,
        critical_values=mackinnon_critical_values(nobs, trend),
        nobs=nobs,
    )


def pp_test(
    series,
    bandwidth: int | str = "auto",
    *,
    trend: str = "c",
    label: str = "",
) -> UnitRootReport:
    """Phillips-Perron Z-tau test with a Bartlett-kernel long-run variance.

    ``bandwidth="auto"`` uses ``floor(4 (T/100)^(2/9))``.
    """
    y = _check_series(series)
    T = y.shape[0]
    if bandwidth == "auto":
        L = int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))
    else:
        L = int(bandwidth)
        if L < 0:
            raise ValueError("bandwidth must be non-negative")
    nobs = T - 1
    dy = np.diff(y)
    X = np.column_stack([y[:-1], _deterministic(nobs, trend)])
    t_rho, se_rho, u = _t_first(dy, X)
    s2 = u @ u / (nobs - X.shape[1])
    gamma0 = u @ u / nobs
    lrv = gamma0
    for j in range(1, L + 1):
        lrv += 2.0 * (1.0 - j / (L + 1.0)) * (u[j:] @ u[:-j]) / nobs
    if lrv <= 0:
        raise DegenerateRegressionError("non-positive long-run variance estimate")
    lam = math.sqrt(lrv)
    stat = math.sqrt(gamma0) / lam * t_rho - 0.5 * (lrv - gamma0) / lam * nobs * se_rho / math.sqrt(s2)
    return UnitRootReport(
        series_label=label,
        test_name="PP",
        statistic=float(stat),
        lags_or_bandwidth=L,
        critical_values=mackinnon_critical_values(nobs, trend),
        nobs=nobs,
    )
