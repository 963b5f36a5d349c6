import datetime as dt
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from comove.data import SpreadPanel
from comove.estimation import (
    PENALTY,
    FitConfig,
    Objective,
    fit,
    initialize,
    ols_mean,
    sandwich_covariance,
    significance_stars,
    standard_errors,
)
from comove.exceptions import (
    IndefiniteHessianError,
    PreconditionError,
    RankDeficiencyError,
)
from comove.likelihood import log_likelihood
from comove.numdiff import central_gradient
from comove.reference import TABLE1, reference_params
from comove.simulation import SimSpec, simulate
from comove.transforms import PARAM_NAMES, ALPHA, pack, unpack, BETA, natural_from_theta, theta_from_natural, transform

from conftest import random_system_params


def weeks(T):
    return tuple(dt.date(2010, 1, 1) + dt.timedelta(weeks=i) for i in range(T))


@pytest.fixture(scope="module")
def panel_300(table1):
    return simulate(SimSpec(table1, T=300, seed=5, burn_in=100))


# -- OLS initializer ---------------------------------------------------------

def test_ols_recovers_phi(recovery_panel):
    _, phi, tau, _ = ols_mean(recovery_panel)
    np.testing.assert_allclose(phi, TABLE1["phi"], atol=0.1)


def test_ols_white_noise():
    rng = np.random.default_rng(0)
    panel = SpreadPanel(weeks(2000), rng.standard_normal((2000, 5)), rng.uniform(2, 4, 2000))
    _, phi, _, _ = ols_mean(panel)
    np.testing.assert_allclose(phi, 0.0, atol=0.15)


def test_constant_covariate_is_rank_deficient():
    rng = np.random.default_rng(1)
    panel = SpreadPanel(weeks(100), rng.standard_normal((100, 5)), np.full(100, 3.0))
    with pytest.raises(RankDeficiencyError, match="x5_pfb_tb"):
        ols_mean(panel)


def test_initialize_needs_enough_weeks():
    rng = np.random.default_rng(2)
    panel = SpreadPanel(weeks(20), rng.standard_normal((20, 5)), rng.uniform(2, 4, 20))
    with pytest.raises(PreconditionError):
        initialize(panel)


def test_initialize_is_valid(panel_300):
    p = initialize(panel_300)
    assert np.isfinite(log_likelihood(panel_300, p).total)
    np.testing.assert_array_equal(np.diag(p.correlation.S), 1.0)


# -- objective -----------------------------------------------------------------

def test_objective_is_negative_loglik(panel_300):
    p = reference_params()
    obj = Objective(panel_300, p.correlation.S)
    assert obj(transform(p)) == -log_likelihood(panel_300, p).total


def test_objective_well_defined(panel_300):
    rng = np.random.default_rng(3)
    S = reference_params().correlation.S
    obj = Objective(panel_300, S)
    for _ in range(10):
        theta = transform(random_system_params(rng))
        nat = natural_from_theta(theta)
        theta2 = theta_from_natural(nat)
        if np.array_equal(natural_from_theta(theta2), nat):
            assert obj(theta) == obj(theta2)


def test_penalty_path_toward_unit_persistence(panel_300):
    init = initialize(panel_300)
    obj = Objective(panel_300, init.correlation.S)
    theta = transform(init)
    values = []
    for gap in [1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-13]:
        s = 1 - gap
        a = 0.04 * s
        t = theta.copy()
        t[ALPHA], t[BETA] = math.log(a / gap), math.log((s - a) / gap)
        values.append(obj(t))
    values = np.array(values)
    assert np.all(np.isfinite(values)) and np.all(values < PENALTY)
    assert np.all(np.diff(values) >= 0)
    # increments die out rather than jump
    assert np.all(np.abs(np.diff(values))[3:] <= np.abs(np.diff(values))[2:-1] + 1e-9)


def test_singular_point_gets_penalty(panel_300):
    S = np.full((5, 5), 1 - 1e-13)
    np.fill_diagonal(S, 1.0)
    obj = Objective(panel_300, S)
    theta = transform(reference_params())
    assert obj(theta) == PENALTY


# -- fitting -------------------------------------------------------------------

def test_fit_improves_on_initializer(panel_300):
    rep = fit(panel_300, FitConfig())
    assert rep.loglik >= rep.init_loglik
    assert rep.converged == (rep.gradient_norm <= 1e-5)
    assert np.all(np.diff(rep.history) >= -1e-9)
    assert rep.history[-1] == pytest.approx(rep.loglik)
    assert len(rep.comovements) == len(panel_300) - 1
    # either usable standard errors or an explanation, never silent NaN
    missing = [n for n, v in zip(PARAM_NAMES, rep.std_errors) if np.isnan(v)]
    for name in missing:
        assert name in rep.se_error
    assert np.all(rep.std_errors[~np.isnan(rep.std_errors)] >= 0)


def test_single_iteration_not_converged(panel_300):
    rep = fit(panel_300, FitConfig(max_iterations=1))
    assert not rep.converged
    assert rep.loglik >= rep.init_loglik
    assert rep.iterations <= 1


def test_fit_deterministic(panel_300):
    a = fit(panel_300, FitConfig(max_iterations=60))
    b = fit(panel_300, FitConfig(max_iterations=60))
    assert a.loglik == b.loglik
    np.testing.assert_array_equal(a.std_errors, b.std_errors)
    np.testing.assert_array_equal(a.comovements.values, b.comovements.values)


def test_constant_correlation_data():
    p = reference_params(alpha=0.0, beta=0.0)
    panel = simulate(SimSpec(p, T=1000, seed=21, burn_in=100))
    rep = fit(panel, FitConfig())
    c = rep.params.correlation
    assert c.alpha + c.beta < 0.15


def test_recovery_fit_report(recovery_fit):
    rep = recovery_fit
    assert rep.converged
    assert rep.loglik >= rep.init_loglik
    assert np.all(np.diff(rep.history) >= -1e-9)
    se = rep.std_errors
    assert np.all(se[np.isfinite(se)] > 0)
    # only integrated GARCH pairs may lack an SE
    for name in (n for n, v in zip(PARAM_NAMES, se) if np.isnan(v)):
        assert name.startswith(("kappa", "lambda"))


def test_transform_invariance(recovery_panel, recovery_fit):
    """Optimizing in rescaled coordinates reaches the same maximum."""
    obj = Objective(recovery_panel, recovery_fit.params.correlation.S)
    theta0 = transform(initialize(recovery_panel))
    d = np.random.default_rng(7).uniform(0.5, 2.0, theta0.size)

    def f(z):
        return obj.mean(z * d)

    res = minimize(f, theta0 / d, jac=lambda z: central_gradient(f, z), method="BFGS",
                   options={"gtol": 1e-6, "maxiter": 3000, "norm": np.inf})
    assert abs(-res.fun * obj.n - recovery_fit.loglik) < 1e-4 * max(1.0, abs(recovery_fit.loglik)) \
        or abs(-res.fun * obj.n - recovery_fit.loglik) < 1e-4


def test_fit_rejects_short_panel():
    rng = np.random.default_rng(4)
    panel = SpreadPanel(weeks(10), rng.standard_normal((10, 5)), rng.uniform(2, 4, 10))
    with pytest.raises(PreconditionError):
        fit(panel)


def test_config_from_mapping():
    cfg = FitConfig.from_mapping({"max_iterations": "7", "retarget_s": "true", "h_init": "unconditional"})
    assert cfg.max_iterations == 7 and cfg.retarget_s and cfg.h_init == "unconditional"
    with pytest.raises(ValueError):
        FitConfig.from_mapping({"no_such_key": "1"})


# -- standard errors -----------------------------------------------------------

def test_sandwich_quadratic_closed_form():
    rng = np.random.default_rng(5)
    n = 200
    y = rng.standard_normal((n, 3)) @ np.array([[1.0, 0.2, 0], [0, 0.5, 0.1], [0, 0, 2.0]])
    M = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])
    xbar = y.mean(axis=0)

    def per_obs(x):
        d = y - x
        return -0.5 * np.einsum("ti,ij,tj->t", d, M, d)

    cov = sandwich_covariance(per_obs, xbar, "sandwich")
    Sigma = (y - xbar).T @ (y - xbar) / n
    np.testing.assert_allclose(cov, Sigma / n, rtol=1e-6, atol=1e-12)
    cov_h = sandwich_covariance(per_obs, xbar, "hessian")
    np.testing.assert_allclose(cov_h, np.linalg.inv(M) / n, rtol=1e-6)


def test_indefinite_hessian_named():
    def per_obs(x):
        return np.array([-(x[0] ** 2) + x[1] ** 2, -(x[0] ** 2) + x[1] ** 2])

    with pytest.raises(IndefiniteHessianError, match=r"eigenvalue -.*b"):
        sandwich_covariance(per_obs, np.zeros(2), names=["a", "b"])


def test_precondition_far_from_optimum(panel_300):
    p = reference_params()
    with pytest.raises(PreconditionError, match="gradient norm"):
        standard_errors(panel_300, p)


def test_recovery_standard_errors_plausible(recovery_fit):
    se = recovery_fit.std_errors
    assert 0.001 < se[26] < 0.05 and 0.001 < se[27] < 0.1
    assert 0.001 < se[10] < 0.1


def test_boundary_parameters_held_fixed(recovery_panel, recovery_fit):
    p = recovery_fit.params
    nat = pack(p)
    k, lam = nat[19], nat[24]
    nat[19], nat[24] = k / (k + lam) * (1 - 1e-12), lam / (k + lam) * (1 - 1e-12)
    res = standard_errors(recovery_panel, unpack(nat, p.correlation.S), gradient_tolerance=1e-3)
    assert set(res.fixed) >= {"kappa4", "lambda4"}
    assert np.isnan(res.se[19]) and np.isnan(res.se[24])
    assert np.isfinite(res.se[26])


@pytest.mark.parametrize("est,se,stars", [
    (3.0, 1.0, "***"), (2.0, 1.0, "**"), (1.7, 1.0, "*"), (1.0, 1.0, ""), (1.0, 0.0, ""),
    (-0.224, 0.026, "***"),
])
def test_significance_stars(est, se, stars):
    assert significance_stars(est, se) == stars


def test_gradient_error_is_pure_truncation(recovery_panel, recovery_fit):
    """Differences between step sizes shrink by 100x per 10x step: smooth, O(h^2)."""
    obj = Objective(recovery_panel, recovery_fit.params.correlation.S)
    theta = transform(recovery_fit.params)
    g4, g5, g6 = (central_gradient(obj.mean, theta, h) for h in (1e-4, 1e-5, 1e-6))
    big = np.abs(g4 - g5) > 1e-7
    assert big.any()
    ratio = (g4 - g5)[big] / (g5 - g6)[big]
    np.testing.assert_allclose(ratio, 100.0, rtol=0.2)
