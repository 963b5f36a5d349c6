"""Generate synthetic spread panels from a full parameter set."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from comove.correlation import normalize_q
from comove.data import DailyRateTable, SpreadPanel, write_daily
from comove.exceptions import ComoveError
from comove.likelihood import SystemParams
from comove.mean import mean_unfilter

__all__ = [
    "FIXTURE_START",
    "FIXTURE_END",
    "FIXTURE_BAND",
    "FIXTURE_SEED",
    "SimSpec",
    "SimulatedPaths",
    "daily_from_panel",
    "fixture_path",
    "make_fixture",
    "simulate",
    "simulate_paths",
]

FIXTURE_START = dt.date(2011, 6, 17)
FIXTURE_END = dt.date(2016, 4, 8)
FIXTURE_SEED = 20110617
FIXTURE_BAND = (0.0, 0.8)
FIXTURE_BURN_IN = 100


@dataclass(frozen=True)
class SimSpec:
    """Simulation settings.

    ``covariate`` is ``"ar1"`` (TB yield follows an AR(1) around ``b_mean``)
    or ``"constant"`` (TB yield fixed at ``b_mean``).
    """

    params: SystemParams
    T: int
    seed: int = 0
    covariate: str = "ar1"
    b_mean: float = 3.0
    b_phi: float = 0.95
    b_sigma: float = 0.1
    burn_in: int = 100
    start: dt.date = FIXTURE_START

    def __post_init__(self) -> None:
        if self.T < 10:
            raise ValueError("T must be >= 10")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.covariate not in ("ar1", "constant"):
            raise ValueError("covariate must be 'ar1' or 'constant'")
        if self.covariate == "ar1" and not abs(self.b_phi) < 1:
            raise ValueError("b_phi must satisfy |b_phi| < 1")


@dataclass(frozen=True)
class SimulatedPaths:
    """Panel plus the generator's internal states for weeks 2..T of the panel."""

    panel: SpreadPanel
    r: np.ndarray
    h: np.ndarray
    eps: np.ndarray
    Q: np.ndarray
    R: np.ndarray


def _unit_t_draws(rng: np.random.Generator, n: int, k: int, nu: float) -> np.ndarray:
    """Student-t(nu) vectors with identity covariance: z * sqrt((nu - 2) / w), w ~ chi2(nu)."""
    z = rng.standard_normal((n, k))
    w = rng.chisquare(nu, n)
    return z * np.sqrt((nu - 2.0) / w)[:, None]


def simulate_paths(spec: SimSpec) -> SimulatedPaths:
    """Run the model forward.

    Draw order from ``numpy.random.default_rng(seed)``: standard normals
    (n, 5), chi-square (n,), then TB-yield shocks (n + 1,), with
    ``n = burn_in + T - 1`` innovation weeks.
    """
    p = spec.params
    m, v, c = p.mean, p.variance, p.correlation
    k = 5
    n = spec.burn_in + spec.T - 1
    rng = np.random.default_rng(spec.seed)
    e = _unit_t_draws(rng, n, k, c.nu)
    b_shocks = rng.standard_normal(n + 1)

    if spec.covariate == "constant":
        b = np.full(n + 1, spec.b_mean)
    else:
        b = np.empty(n + 1)
        b[0] = spec.b_mean
        for t in range(1, n + 1):
            b[t] = spec.b_mean + spec.b_phi * (b[t - 1] - spec.b_mean) + spec.b_sigma * b_shocks[t]

    S = c.S
    h = np.empty((n, k))
    Q = np.empty((n, k, k))
    R = np.empty((n, k, k))
    eps = np.empty((n, k))
    r = np.empty((n, k))
    h_t = v.unconditional_variance.copy()
    q_t = S.copy()
    w = 1.0 - c.alpha - c.beta
    for t in range(n):
        R_t = normalize_q(q_t)
        try:
            L = np.linalg.cholesky(R_t)
        except np.linalg.LinAlgError:
            raise ComoveError(f"correlation matrix lost definiteness at week {t}") from None
        eps[t] = L @ e[t]
        r[t] = np.sqrt(h_t) * eps[t]
        h[t], Q[t], R[t] = h_t, q_t, R_t
        h_t = v.omega + v.kappa * r[t] ** 2 + v.lam * h_t
        q_t = w * S + c.alpha * np.outer(eps[t], eps[t]) + c.beta * q_t
        q_t = np.triu(q_t) + np.triu(q_t, 1).T

    x0 = m.mu / (1.0 - m.phi)
    x0[4] += m.tau * spec.b_mean / (1.0 - m.phi[4])
    x = mean_unfilter(r, m, x0, b)

    keep = slice(spec.burn_in, None)
    weeks = tuple(spec.start + dt.timedelta(weeks=i) for i in range(spec.T))
    panel = SpreadPanel(weeks, x[keep], b[keep])
    return SimulatedPaths(panel, r[keep], h[keep], eps[keep], Q[keep], R[keep])


def simulate(spec: SimSpec) -> SpreadPanel:
    return simulate_paths(spec).panel


def daily_from_panel(panel: SpreadPanel, seed: int, jitter: float = 0.01,
                     decimals: int = 6) -> DailyRateTable:
    """Spread each weekly value over Mon-Fri of its ISO week.

    Jitter is demeaned within the week so the weekly averages reproduce the
    panel up to rounding.
    """
    rng = np.random.default_rng(seed)
    dates, rows = [], []
    for week_end, xs, b in zip(panel.week_end, panel.x, panel.b):
        monday = week_end - dt.timedelta(days=week_end.weekday())
        noise = rng.standard_normal((5, 6)) * jitter
        noise -= noise.mean(axis=0)
        for d in range(5):
            tb = b + noise[d, 5]
            rows.append(np.append(tb + xs + noise[d, :5], tb))
            dates.append(monday + dt.timedelta(days=d))
    rates = np.round(np.array(rows), decimals)
    if np.any(rates < 0):
        raise ComoveError("simulated rates are negative; choose another seed")
    return DailyRateTable(tuple(dates), rates)


def fixture_path() -> Path:
    return Path(__file__).with_name("data") / "fixture_daily.csv"


def _fixture_weeks() -> int:
    return (FIXTURE_END - FIXTURE_START).days // 7 + 1


def make_fixture(out: str | Path | None = None, seed: int = FIXTURE_SEED):
    """Write the bundled synthetic daily CSV.

    Starting from ``seed``, successive seeds are tried until every simulated
    rate is non-negative and the generator's own co-movement paths stay in
    ``FIXTURE_BAND``, so the fixture resembles the observed market. The seed
    used is returned with the path.
    """
    from comove.correlation import COMOVEMENT_PAIRS
    from comove.reference import reference_params

    out = Path(out) if out is not None else fixture_path()
    params = reference_params()
    lo, hi = FIXTURE_BAND
    for attempt in range(1000):
        s = seed + attempt
        spec = SimSpec(params, T=_fixture_weeks(), seed=s, burn_in=FIXTURE_BURN_IN, start=FIXTURE_START)
        paths = simulate_paths(spec)
        panel = paths.panel
        comov = np.array([paths.R[:, i, j] for i, j in COMOVEMENT_PAIRS.values()])
        if comov.min() < lo or comov.max() > hi:
            continue
        try:
            table = daily_from_panel(panel, seed=s)
        except ComoveError:
            continue
        out.parent.mkdir(parents=True, exist_ok=True)
        write_daily(table, out)
        return out, s
    raise ComoveError("no seed produced non-negative rates")
