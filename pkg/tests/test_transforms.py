import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comove.exceptions import TransformDomainError
from comove.numdiff import central_jacobian
from comove.reference import reference_params
from comove.transforms import (
    ALPHA,
    BETA,
    KAPPA,
    LAM,
    N_PARAMS,
    PARAM_NAMES,
    inverse_transform,
    natural_from_theta,
    natural_steps,
    pack,
    theta_from_natural,
    transform,
    transform_jacobian,
)

from conftest import random_system_params


def test_names():
    assert N_PARAMS == 29
    assert PARAM_NAMES[10] == "tau" and PARAM_NAMES[-3:] == ("alpha", "beta", "nu")


def test_round_trip_random():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        p = random_system_params(rng)
        nat = pack(p)
        back = pack(inverse_transform(transform(p), p.correlation.S))
        worst = max(worst, np.max(np.abs(back - nat) / np.maximum(1.0, np.abs(nat))))
    assert worst < 1e-12


@settings(max_examples=100, deadline=None)
@given(theta=st.lists(st.floats(-8, 8), min_size=29, max_size=29))
def test_inverse_lands_inside(theta):
    nat = natural_from_theta(theta)
    assert np.all(np.abs(nat[5:10]) < 1) and np.all(nat[11:16] > 0) and nat[-1] > 2
    for a, b in [*zip(nat[KAPPA], nat[LAM]), (nat[ALPHA], nat[BETA])]:
        assert a > 0 and b > 0 and a + b < 1


def test_zero_vector_is_interior():
    S = reference_params().correlation.S
    p = inverse_transform(np.zeros(N_PARAMS), S)
    nat = pack(p)
    np.testing.assert_allclose(nat[KAPPA], 1 / 3)
    assert nat[ALPHA] == pytest.approx(1 / 3) and nat[-1] == 3.0


def test_near_boundary_is_finite():
    nat = pack(reference_params())
    nat[16], nat[21] = 0.5, 0.499999
    theta = theta_from_natural(nat)
    assert np.all(np.isfinite(theta))
    assert theta[16] > 10
    back = natural_from_theta(theta)
    assert back[16] + back[21] == pytest.approx(0.999999, abs=1e-12)


@pytest.mark.parametrize("idx,value", [(5, 1.0), (11, 0.0), (16, 0.0), (ALPHA, 0.5), (28, 2.0)])
def test_boundary_rejected(idx, value):
    nat = pack(reference_params())
    if idx == ALPHA:
        nat[BETA] = 0.5
    nat[idx] = value
    with pytest.raises(TransformDomainError):
        theta_from_natural(nat)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(5):
        theta = transform(random_system_params(rng))
        J_fd = central_jacobian(natural_from_theta, theta, rel=1e-6)
        np.testing.assert_allclose(transform_jacobian(theta), J_fd, rtol=1e-6, atol=1e-9)


def test_extreme_theta_stable():
    theta = np.zeros(N_PARAMS)
    theta[ALPHA], theta[BETA] = 800.0, 790.0
    nat = natural_from_theta(theta)
    assert np.all(np.isfinite(nat))
    assert nat[ALPHA] + nat[BETA] <= 1.0


def test_natural_steps_stay_inside():
    nat = pack(reference_params())
    nat[ALPHA], nat[BETA] = 1e-6, 0.99
    steps = natural_steps(nat, 1e-4)
    assert steps[ALPHA] <= 0.25e-6
    assert nat[ALPHA] + nat[BETA] + steps[ALPHA] < 1
    assert np.all(steps > 0)
