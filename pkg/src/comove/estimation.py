"""QML estimation: initialization, quasi-Newton fitting and robust standard errors."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm

from comove._backend import kernels
from comove.correlation import ComovementSeries, CorrelationPath, extract_comovements
from comove.data import SPREAD_LABELS, SpreadPanel
from comove.exceptions import (
    ComoveError,
    IndefiniteHessianError,
    LikelihoodError,
    PanelError,
    PreconditionError,
    RankDeficiencyError,
)
from comove.likelihood import (
    COND_MAX,
    LogLikelihood,
    SystemParams,
    filter_states,
    resolve_h_init,
    t_log_constant,
)
from comove.numdiff import central_gradient, central_hessian, central_jacobian
from comove.transforms import (
    ALPHA,
    BETA,
    KAPPA,
    LAM,
    MU,
    N_PARAMS,
    NU,
    OMEGA,
    PARAM_NAMES,
    PHI,
    TAU,
    inverse_transform,
    natural_from_theta,
    natural_steps,
    pack,
    theta_from_natural,
    transform,
    transform_jacobian,
    unpack,
)

__all__ = [
    "FitConfig",
    "FitReport",
    "Objective",
    "StandardErrors",
    "fit",
    "fit_univariate_garch",
    "initialize",
    "neg_log_likelihood_objective",
    "ols_mean",
    "sandwich_covariance",
    "significance_stars",
    "standard_errors",
]

logger = logging.getLogger(__name__)

PENALTY = 1e10
MIN_WEEKS = 30
BOUNDARY_ROOM = 1e-8
STAGES = ("two_stage_init_then_joint", "joint_only")


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-5
    step_tolerance: float = 1e-9
    stage: str = "two_stage_init_then_joint"
    seed: int = 0
    n_starts: int = 1
    h_init: str = "sample"
    retarget_s: bool = False
    se_kind: str = "sandwich"
    max_restarts: int = 5

    def __post_init__(self) -> None:
        if self.gradient_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")
        if self.se_kind not in ("sandwich", "hessian"):
            raise ValueError("se_kind must be 'sandwich' or 'hessian'")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "FitConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in mapping.items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            kind = types[key]
            if kind == "int":
                kwargs[key] = int(raw)
            elif kind == "float":
                kwargs[key] = float(raw)
            elif kind == "bool":
                if raw.lower() not in ("true", "false"):
                    raise ValueError(f"{key} must be true or false")
                kwargs[key] = raw.lower() == "true"
            else:
                kwargs[key] = raw
        return cls(**kwargs)

    def items(self):
        return list(asdict(self).items())


# ---------------------------------------------------------------------------
# objective


class Objective:
    """Negative log-likelihood as a function of the unconstrained vector.

    Calling the object returns ``-loglik`` (a large finite penalty when the
    mapped point is numerically singular), so it is total over R^29.
    ``mean`` divides by the number of innovation weeks; the optimizer and the
    convergence test work on that scale.
    """

    def __init__(self, panel: SpreadPanel, S, *, h_init="sample", q_init=None,
                 retarget_s: bool = False):
        if len(panel) < 2:
            raise PanelError("objective needs at least 2 weeks")
        self.panel = panel
        self.S = np.ascontiguousarray(S, dtype=float)
        self.h_init = h_init
        self.q_init = None if q_init is None else np.ascontiguousarray(q_init, dtype=float)
        self.retarget_s = retarget_s
        self._x = np.ascontiguousarray(panel.x)
        self._b = np.ascontiguousarray(panel.b)
        self.n = len(panel) - 1

    def params(self, theta) -> SystemParams:
        return inverse_transform(theta, self.S)

    def _innovations(self, nat: np.ndarray) -> np.ndarray:
        x, b = self._x, self._b
        r = x[1:] - nat[MU] - nat[PHI] * x[:-1]
        r[:, 4] -= nat[TAU] * b[1:]
        return np.ascontiguousarray(r)

    def _target(self, r, nat, h0) -> np.ndarray:
        if not self.retarget_s:
            return self.S
        h = np.empty_like(r)
        kernels.garch_recursion(r, nat[OMEGA], nat[KAPPA], nat[LAM], h0, h)
        return np.ascontiguousarray(np.corrcoef(r / np.sqrt(h), rowvar=False))

    def per_week(self, theta) -> np.ndarray:
        """Per-week log density; raises ``LikelihoodError`` on singular covariances."""
        nat = natural_from_theta(theta)
        r = self._innovations(nat)
        if isinstance(self.h_init, str) and self.h_init == "unconditional":
            h0 = nat[OMEGA] / (1.0 - nat[KAPPA] - nat[LAM])
        elif isinstance(self.h_init, str) and self.h_init == "sample":
            h0 = r.var(axis=0)
        else:
            h0 = np.broadcast_to(np.asarray(self.h_init, dtype=float), (5,))
        h0 = np.ascontiguousarray(h0, dtype=float)
        if not (np.all(np.isfinite(nat)) and np.all(h0 > 0) and _inside(nat)):
            raise LikelihoodError("parameters map outside the numerically valid region")
        S = self._target(r, nat, h0)
        q0 = S if self.q_init is None else self.q_init
        out = np.empty(self.n)
        bad = kernels.system_loglik(
            r, np.ascontiguousarray(nat[OMEGA]), np.ascontiguousarray(nat[KAPPA]),
            np.ascontiguousarray(nat[LAM]), h0, nat[ALPHA], nat[BETA], S, q0,
            nat[NU], t_log_constant(nat[NU]), COND_MAX, out,
        )
        if bad:
            raise LikelihoodError(f"singular conditional covariance at innovation row {bad - 1}")
        return out

    def loglik(self, theta) -> LogLikelihood:
        out = self.per_week(theta)
        return LogLikelihood(float(math.fsum(out)), out)

    def __call__(self, theta) -> float:
        try:
            total = math.fsum(self.per_week(theta))
        except (LikelihoodError, FloatingPointError, ValueError, OverflowError):
            return PENALTY
        if not math.isfinite(total):
            return PENALTY
        return -total

    def mean(self, theta) -> float:
        return self(theta) / self.n

    def mean_gradient(self, theta, rel: float = 1e-5) -> np.ndarray:
        return central_gradient(self.mean, theta, rel)


def _inside(nat) -> bool:
    """Strict constraints after rounding; far logits can round a pair sum to 1."""
    return bool(
        np.all(nat[OMEGA] > 0)
        and np.all(np.abs(nat[PHI]) < 1)
        and np.all(nat[KAPPA] + nat[LAM] < 1)
        and nat[ALPHA] + nat[BETA] < 1
        and nat[NU] > 2
    )


def neg_log_likelihood_objective(panel: SpreadPanel, S, **kwargs) -> Objective:
    """Build the total, penalized negative log-likelihood over transformed parameters."""
    return Objective(panel, S, **kwargs)


# ---------------------------------------------------------------------------
# initialization


def ols_mean(panel: SpreadPanel):
    """Per-equation OLS for (mu, phi) and, on the fifth equation, tau.

    Returns ``(mu, phi, tau, residuals)``.
    """
    x, b = panel.x, panel.b
    mu, phi = np.empty(5), np.empty(5)
    tau = 0.0
    resid = np.empty((len(panel) - 1, 5))
    for i in range(5):
        y = x[1:, i]
        cols = [np.ones_like(y), x[:-1, i]]
        if i == 4:
            cols.append(b[1:])
        X = np.column_stack(cols)
        coef, _, rank, sv = np.linalg.lstsq(X, y, rcond=None)
        if rank < X.shape[1] or sv[-1] <= sv[0] * 1e-10:
            raise RankDeficiencyError(f"OLS mean regression for {SPREAD_LABELS[i]} is rank deficient")
        mu[i], phi[i] = coef[0], coef[1]
        if i == 4:
            tau = float(coef[2])
        resid[:, i] = y - X @ coef
    return mu, phi, tau, resid


def _garch_negll(u, r2col, rcol, h0):
    omega = np.exp(u[0:1])
    kappa, lam = _pair(u[1], u[2])
    h = np.empty((rcol.shape[0], 1))
    kernels.garch_recursion(rcol, omega, kappa, lam, h0, h)
    h = h[:, 0]
    if not np.all(h > 0):
        return PENALTY
    return 0.5 * float(np.sum(np.log(h) + r2col / h)) / rcol.shape[0]


def _pair(u, v):
    m = max(0.0, u, v)
    eu, ev, e0 = math.exp(u - m), math.exp(v - m), math.exp(-m)
    d = e0 + eu + ev
    return np.array([eu / d]), np.array([ev / d])


def fit_univariate_garch(r) -> tuple[float, float, float]:
    """Gaussian QML GARCH(1,1) of one innovation series: (omega, kappa, lambda)."""
    r = np.asarray(r, dtype=float)
    rcol = np.ascontiguousarray(r[:, None])
    var = float(r.var())
    if not var > 0:
        raise RankDeficiencyError("innovation series has zero variance")
    h0 = np.array([var])
    r2 = r * r
    best = None
    for k0, l0 in ((0.05, 0.90), (0.20, 0.75), (0.45, 0.53), (0.10, 0.50)):
        slack = 1.0 - k0 - l0
        u0 = np.array([math.log(var * slack), math.log(k0 / slack), math.log(l0 / slack)])
        res = minimize(_garch_negll, u0, args=(r2, rcol, h0), method="BFGS",
                       options={"gtol": 1e-7, "maxiter": 500})
        if best is None or res.fun < best.fun:
            best = res
    omega = math.exp(best.x[0])
    kappa, lam = _pair(best.x[1], best.x[2])
    return omega, float(kappa[0]), float(lam[0])


def _interior(kappa: float, lam: float, floor: float = 1e-3, cap: float = 0.99):
    kappa, lam = max(kappa, floor), max(lam, floor)
    s = kappa + lam
    if s > cap:
        kappa, lam = kappa * cap / s, lam * cap / s
    return kappa, lam


def initialize(panel: SpreadPanel, h_init="sample") -> SystemParams:
    """Staged starting values: OLS means, univariate GARCH, targeted S."""
    if len(panel) < MIN_WEEKS:
        raise PreconditionError(f"need at least {MIN_WEEKS} weeks, got {len(panel)}")
    mu, phi, tau, resid = ols_mean(panel)
    phi = np.clip(phi, -0.99, 0.99)
    omega, kappa, lam = np.empty(5), np.empty(5), np.empty(5)
    for i in range(5):
        w, k, l = fit_univariate_garch(resid[:, i])
        omega[i] = w
        kappa[i], lam[i] = _interior(k, l)
    # residuals at the clipped mean parameters
    x, b = panel.x, panel.b
    r = x[1:] - mu - phi * x[:-1]
    r[:, 4] -= tau * b[1:]
    r = np.ascontiguousarray(r)
    nat = np.concatenate([mu, phi, [tau], omega, kappa, lam, [0.05, 0.90, 8.0]])
    provisional = unpack(nat, np.eye(5))
    h0 = np.ascontiguousarray(resolve_h_init(h_init, r, provisional.variance), dtype=float)
    h = np.empty_like(r)
    kernels.garch_recursion(r, omega, kappa, lam, h0, h)
    S = np.corrcoef(r / np.sqrt(h), rowvar=False)
    S = 0.5 * (S + S.T)
    np.fill_diagonal(S, 1.0)
    nat[ALPHA], nat[BETA] = _dcc_grid_start(r, h0, nat, S)
    return unpack(nat, S)


DCC_GRID = tuple((a, b) for a in (0.01, 0.03, 0.06) for b in (0.05, 0.5, 0.8, 0.9, 0.95))


def _dcc_grid_start(r, h0, nat, S):
    """Best (alpha, beta) on a coarse grid, other parameters fixed.

    beta is weakly identified when alpha is small, so the start matters; the
    grid lets constant-correlation data begin at low persistence.
    """
    out = np.empty(r.shape[0])
    best, best_ll = (0.05, 0.90), -np.inf
    for a, b in DCC_GRID:
        bad = kernels.system_loglik(
            r, nat[OMEGA], nat[KAPPA], nat[LAM], h0, a, b, S, S, nat[NU],
            t_log_constant(nat[NU]), COND_MAX, out,
        )
        if bad:
            continue
        ll = math.fsum(out)
        if ll > best_ll:
            best, best_ll = (a, b), ll
    return best


# ---------------------------------------------------------------------------
# standard errors


@dataclass(frozen=True)
class StandardErrors:
    se: np.ndarray  # natural scale, PARAM_NAMES order
    cov_natural: np.ndarray
    cov_theta: np.ndarray
    kind: str
    fixed: tuple[str, ...] = ()  # held at a constraint boundary, no SE


def sandwich_covariance(per_obs_loglik, x, kind: str = "sandwich", *,
                        hess_steps=None, grad_steps=None, names=None) -> np.ndarray:
    """Covariance of the QML estimator from per-observation log-likelihoods.

    ``A`` is the Hessian of the mean negative log-likelihood and ``B`` the
    mean outer product of per-observation scores; the sandwich estimate is
    ``A^-1 B A^-1 / n`` and the Hessian-only estimate ``A^-1 / n``.
    """
    x = np.asarray(x, dtype=float)
    n = len(per_obs_loglik(x))
    A = central_hessian(lambda p: -math.fsum(per_obs_loglik(p)) / n, x, steps=hess_steps)
    A = 0.5 * (A + A.T)
    if not np.all(np.isfinite(A)):
        raise PreconditionError("Hessian has non-finite entries")
    eig, vec = np.linalg.eigh(A)
    if eig[0] <= 0:
        worst = int(np.argmax(np.abs(vec[:, 0])))
        label = names[worst] if names is not None else f"index {worst}"
        raise IndefiniteHessianError(
            f"Hessian has eigenvalue {eig[0]:.3e}; eigenvector dominated by {label}"
        )
    A_inv = (vec / eig) @ vec.T
    if kind == "hessian":
        cov = A_inv / n
    elif kind == "sandwich":
        scores = central_jacobian(per_obs_loglik, x, steps=grad_steps)
        B = scores.T @ scores / n
        cov = A_inv @ B @ A_inv / n
    else:
        raise ValueError(f"unknown covariance kind {kind!r}")
    return 0.5 * (cov + cov.T)


def standard_errors(panel: SpreadPanel, params: SystemParams, *, h_init="sample",
                    kind: str = "sandwich", gradient_tolerance: float = 1e-5) -> StandardErrors:
    """Robust (or Hessian) standard errors of the natural parameters.

    Derivatives are taken with respect to the natural parameters directly.
    Parameters whose estimate sits on a constraint boundary (an integrated
    GARCH pair, say) are held fixed and get ``nan``; their names are listed
    in ``fixed``.
    At a stationary point this equals the transformed-space sandwich mapped
    back by the delta method, but stays well conditioned when a persistence
    sum approaches one and the logit coordinates flatten out.
    """
    obj = Objective(panel, params.correlation.S, h_init=h_init)
    theta = transform(params)
    gnorm = float(np.max(np.abs(obj.mean_gradient(theta))))
    if not gnorm <= 10.0 * gradient_tolerance:
        raise PreconditionError(
            f"gradient norm {gnorm:.3e} exceeds {10 * gradient_tolerance:.1e}; not a stationary point"
        )
    nat = pack(params)
    # rel=1 gives a quarter of the distance to the nearest constraint
    free = np.flatnonzero(natural_steps(nat, 1.0) > BOUNDARY_ROOM)
    fixed = tuple(PARAM_NAMES[i] for i in range(N_PARAMS) if i not in set(free))

    def per_obs(p):
        full = nat.copy()
        full[free] = p
        return obj.per_week(theta_from_natural(full))

    sub = sandwich_covariance(
        per_obs, nat[free], kind,
        hess_steps=natural_steps(nat, 1e-4)[free],
        grad_steps=natural_steps(nat, 1e-5)[free],
        names=[PARAM_NAMES[i] for i in free],
    )
    cov_nat = np.full((N_PARAMS, N_PARAMS), np.nan)
    cov_nat[np.ix_(free, free)] = sub
    J = transform_jacobian(theta)[np.ix_(free, free)]
    J_inv = np.linalg.inv(J)
    cov_theta = np.full((N_PARAMS, N_PARAMS), np.nan)
    cov_theta[np.ix_(free, free)] = J_inv @ sub @ J_inv.T
    se = np.full(N_PARAMS, np.nan)
    se[free] = np.sqrt(np.clip(np.diag(sub), 0.0, None))
    return StandardErrors(se, cov_nat, cov_theta, kind, fixed)


def significance_stars(estimate: float, se: float) -> str:
    """Two-sided normal test: *** 1%, ** 5%, * 10%."""
    if not (se > 0 and math.isfinite(se)):
        return ""
    p = 2.0 * norm.sf(abs(estimate) / se)
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


# ---------------------------------------------------------------------------
# fitting


@dataclass
class FitReport:
    params: SystemParams
    std_errors: np.ndarray
    loglik: float
    init_loglik: float
    iterations: int
    converged: bool
    gradient_norm: float
    comovements: ComovementSeries
    path: CorrelationPath
    config: FitConfig
    n_weeks: int
    history: list[float] = field(default_factory=list)
    se_error: str = ""
    message: str = ""

    @property
    def estimates(self) -> dict[str, float]:
        return dict(zip(PARAM_NAMES, pack(self.params)))

    @property
    def stars(self) -> dict[str, str]:
        return {
            name: significance_stars(est, se)
            for name, est, se in zip(PARAM_NAMES, pack(self.params), self.std_errors)
        }


class _Stop(Exception):
    pass


def _bfgs(obj: Objective, theta0, config: FitConfig, budget: int, free=None):
    """Minimize the mean objective over ``free`` coordinates; returns (theta, iters, history)."""
    theta0 = np.asarray(theta0, dtype=float)
    free = np.arange(theta0.size) if free is None else np.asarray(free)

    def full(z):
        th = theta0.copy()
        th[free] = z
        return th

    def f(z):
        return obj.mean(full(z))

    def g(z):
        return central_gradient(f, z)

    z = theta0[free].copy()
    history = [f(z)]
    iters = 0
    for _ in range(config.max_restarts + 1):
        if iters >= budget:
            break
        state = {"prev": z.copy(), "small_step": False}

        def callback(intermediate_result):
            zk = intermediate_result.x
            history.append(float(intermediate_result.fun))
            step = np.max(np.abs(zk - state["prev"])) / max(1.0, np.max(np.abs(state["prev"])))
            state["prev"] = zk.copy()
            if step < config.step_tolerance:
                state["small_step"] = True
                raise StopIteration

        res = minimize(
            f, z, jac=g, method="BFGS", callback=callback,
            options={"gtol": config.gradient_tolerance, "maxiter": budget - iters, "norm": np.inf},
        )
        iters += int(res.nit)
        if not res.fun < f(z):
            break
        z = res.x
        if state["small_step"] or np.max(np.abs(g(z))) <= config.gradient_tolerance:
            break
    return full(z), iters, history


def _jitter(theta, seed: int, k: int, scale: float = 0.1):
    rng = np.random.default_rng([seed, k])
    return theta + scale * rng.standard_normal(theta.size)


def fit(panel: SpreadPanel, config: FitConfig | None = None) -> FitReport:
    """Jointly maximize the Student-t quasi-likelihood over all 29 parameters.

    ``S`` is held at its targeted value (sample correlation of the initial
    standardized residuals) unless ``config.retarget_s`` is set.
    """
    config = config or FitConfig()
    if len(panel) < MIN_WEEKS:
        raise PreconditionError(f"need at least {MIN_WEEKS} weeks, got {len(panel)}")
    init = initialize(panel, config.h_init)
    S = init.correlation.S
    obj = Objective(panel, S, h_init=config.h_init, retarget_s=config.retarget_s)
    theta_init = transform(init)
    init_f = obj(theta_init)
    if init_f >= PENALTY:
        raise LikelihoodError("initial parameters give a singular likelihood")

    budget = config.max_iterations
    starts = [theta_init] + [_jitter(theta_init, config.seed, k) for k in range(1, config.n_starts)]
    best = None
    total_iters = 0
    for theta0 in starts:
        if obj(theta0) >= PENALTY:
            continue
        history: list[float] = []
        iters = 0
        if config.stage == "two_stage_init_then_joint":
            theta0, n1, h1 = _bfgs(obj, theta0, config, budget, free=[ALPHA, BETA, NU])
            iters += n1
            history.extend(h1)
        if iters < budget:
            theta0, n2, h2 = _bfgs(obj, theta0, config, budget - iters)
            iters += n2
            history.extend(h2)
        total_iters += iters
        value = obj(theta0)
        if best is None or value < best[1]:
            best = (theta0, value, iters, history)
    theta_hat, f_hat, iters, history = best
    if f_hat > init_f:
        theta_hat, f_hat = theta_init, init_f
    grad = obj.mean_gradient(theta_hat)
    gnorm = float(np.max(np.abs(grad)))
    converged = gnorm <= config.gradient_tolerance
    params = obj.params(theta_hat)

    se = np.full(N_PARAMS, np.nan)
    se_error = ""
    try:
        ses = standard_errors(panel, params, h_init=config.h_init, kind=config.se_kind,
                              gradient_tolerance=config.gradient_tolerance)
        se = ses.se
        if ses.fixed:
            se_error = "on a constraint boundary, no standard error: " + " ".join(ses.fixed)
    except ComoveError as exc:
        se_error = str(exc)
        logger.warning("standard errors unavailable: %s", exc)

    state = filter_states(panel, params, h_init=config.h_init)
    comov = extract_comovements(state.path, panel.week_end[1:])
    message = "converged" if converged else f"gradient norm {gnorm:.3e} above tolerance"
    return FitReport(
        params=params,
        std_errors=se,
        loglik=-f_hat,
        init_loglik=-init_f,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
        comovements=comov,
        path=state.path,
        config=config,
        n_weeks=len(panel),
        history=[-v * obj.n for v in history],
        se_error=se_error,
        message=message,
    )
