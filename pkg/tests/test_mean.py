import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comove.estimation import ols_mean
from comove.mean import MeanParams, mean_filter, mean_unfilter
from comove.reference import TABLE1


def zero_params(**kw):
    p = {"mu": np.zeros(5), "phi": np.zeros(5), "tau": 0.0, **kw}
    return MeanParams(p["mu"], p["phi"], p["tau"])


def test_zero_params_shift_series():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((8, 5))
    b = rng.uniform(2, 4, 8)
    np.testing.assert_array_equal(mean_filter(x, b, zero_params()), x[1:])


def test_table1_equation1():
    mu = np.zeros(5)
    phi = np.zeros(5)
    mu[0], phi[0] = TABLE1["mu"][0], TABLE1["phi"][0]
    x = np.zeros((2, 5))
    x[0, 0], x[1, 0] = 1.0, 2.0
    r = mean_filter(x, np.zeros(2), MeanParams(mu, phi, 0.0))
    assert r[0, 0] == pytest.approx(2.0 - 0.914 - 0.888 * 1.0, abs=1e-15)
    assert r[0, 0] == pytest.approx(0.198, abs=1e-12)


def test_table1_equation5_with_tax_term():
    mu = np.zeros(5)
    phi = np.zeros(5)
    mu[4], phi[4] = TABLE1["mu"][4], TABLE1["phi"][4]
    x = np.zeros((2, 5))
    x[0, 4], x[1, 4] = 1.0, 1.5
    b = np.array([0.0, 3.0])
    r = mean_filter(x, b, MeanParams(mu, phi, TABLE1["tau"]))
    assert r[0, 4] == pytest.approx(0.281, abs=1e-12)


def test_covariate_only_enters_equation_five():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((6, 5))
    b = rng.uniform(1, 5, 6)
    r0 = mean_filter(x, b, zero_params())
    r1 = mean_filter(x, b, zero_params(tau=0.7))
    np.testing.assert_array_equal(r0[:, :4], r1[:, :4])
    np.testing.assert_allclose(r0[:, 4] - r1[:, 4], 0.7 * b[1:], rtol=1e-14)


def test_doubling_b_doubles_tax_contribution():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((6, 5))
    b = rng.uniform(1, 5, 6)
    p = zero_params(tau=-0.224)
    base = mean_filter(x, np.zeros(6), p)[:, 4]
    one = base - mean_filter(x, b, p)[:, 4]
    two = base - mean_filter(x, 2 * b, p)[:, 4]
    np.testing.assert_allclose(two, 2 * one, rtol=1e-14)


def test_unfilter_fixed_point():
    r = np.zeros((10, 5))
    x = mean_unfilter(r, zero_params(mu=np.full(5, 0.5)), x0=np.arange(5.0), b=np.ones(11))
    np.testing.assert_array_equal(x[1:], 0.5)


def test_unfilter_covariate_annihilation():
    rng = np.random.default_rng(3)
    r = rng.standard_normal((20, 5))
    x0 = rng.standard_normal(5)
    p0 = MeanParams(np.full(5, 0.2), np.full(5, 0.6), 0.0)
    p1 = MeanParams(np.full(5, 0.2), np.full(5, 0.6), 0.9)
    np.testing.assert_array_equal(
        mean_unfilter(r, p0, x0, np.zeros(21)), mean_unfilter(r, p1, x0, np.zeros(21))
    )


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 200))
def test_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    p = MeanParams(rng.uniform(-1, 1, 5), rng.uniform(-0.99, 0.99, 5), rng.uniform(-1, 1))
    r = rng.standard_normal((n, 5))
    b = rng.uniform(0, 5, n + 1)
    x = mean_unfilter(r, p, rng.standard_normal(5), b)
    assert np.max(np.abs(mean_filter(x, b, p) - r)) < 1e-12 * max(1.0, np.max(np.abs(x)))


def test_round_trip_seeded_absolute():
    rng = np.random.default_rng(2024)
    p = MeanParams(rng.uniform(-1, 1, 5), rng.uniform(-0.9, 0.9, 5), -0.224)
    r = rng.standard_normal((500, 5))
    b = rng.uniform(2, 4, 501)
    x = mean_unfilter(r, p, np.zeros(5), b)
    assert np.max(np.abs(mean_filter(x, b, p) - r)) < 1e-12


def test_phi_invariant():
    with pytest.raises(ValueError):
        MeanParams(np.zeros(5), [0.5, 0.5, 1.0, 0.5, 0.5], 0.0)


def test_too_short():
    from comove.exceptions import PanelError

    with pytest.raises(PanelError):
        mean_filter(np.zeros((1, 5)), np.zeros(1), zero_params())


def test_ols_intercept_shift(sim_panel_400):
    """Adding c to x_i moves the OLS intercept by c (1 - phi_i)."""
    from comove.data import SpreadPanel

    c = 2.5
    mu0, phi0, _, _ = ols_mean(sim_panel_400)
    shifted = SpreadPanel(sim_panel_400.week_end, sim_panel_400.x + c, sim_panel_400.b)
    mu1, phi1, _, _ = ols_mean(shifted)
    np.testing.assert_allclose(phi1, phi0, atol=1e-10)
    np.testing.assert_allclose(mu1 - mu0, c * (1 - phi0), atol=1e-9)
