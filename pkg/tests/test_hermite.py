import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hermite_qmc import (
    DegreeOverflowError,
    GaussianDensity,
    gauss_hermite,
    gaussian_density,
    hermite,
    hermite_derivative_factor,
    hermite_multi,
    hermite_weighted,
    hermite_weighted_table,
    sigma_bound,
)

from oracles import hermite_mp, hermite_weighted_mp


# documented examples

def test_hermite_examples():
    assert hermite(0, 1.7) == 1.0
    assert hermite(2, 0.0) == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
    assert hermite(3, 2.0) == pytest.approx(2 / math.sqrt(6), rel=1e-14)


def test_hermite_weighted_examples():
    assert hermite_weighted(0, 0.0) == pytest.approx((2 * math.pi) ** -0.25, rel=1e-15)
    assert hermite_weighted(1, 1.0) == pytest.approx((2 * math.pi) ** -0.25 * math.exp(-0.25), rel=1e-15)


def test_hermite_multi_examples():
    assert hermite_multi((0, 0), (3.1, -2.0)) == 1.0
    assert hermite_multi((1, 1), (0.7, -1.3)) == pytest.approx(0.7 * -1.3, rel=1e-15)
    assert hermite_multi((2, 0), (0.0, 5.0)) == pytest.approx(-1 / math.sqrt(2), rel=1e-15)


def test_hermite_multi_dimension_mismatch():
    with pytest.raises(ValueError):
        hermite_multi((1, 2), (0.5,))


def test_sigma_bound_examples():
    assert sigma_bound((0, 0, 0)) == 1.0
    assert sigma_bound((1,)) == 1.0
    assert sigma_bound((10**12,)) == pytest.approx(math.sqrt(math.pi) / 10, rel=1e-13)


def test_derivative_factor_examples():
    assert hermite_derivative_factor(5, 0) == 1.0
    assert hermite_derivative_factor(3, 3) == pytest.approx(math.sqrt(6), rel=1e-15)
    assert hermite_derivative_factor(2, 5) == 0.0


def test_derivative_factor_large_k_log_domain():
    k, tau = 10**6, 3
    expected = math.sqrt(k * (k - 1) * (k - 2))
    assert hermite_derivative_factor(k, tau) == pytest.approx(expected, rel=1e-12)


def test_degree_overflow():
    with pytest.raises(DegreeOverflowError):
        hermite(11, 0.3, max_degree=10)
    with pytest.raises(DegreeOverflowError):
        hermite(10**8 + 1, 0.3)
    with pytest.raises(ValueError):
        hermite(-1, 0.3)


# invariants

def test_explicit_low_degree_forms():
    x = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(hermite(0, x), 1.0, atol=1e-14)
    np.testing.assert_allclose(hermite(1, x), x, atol=1e-14)
    np.testing.assert_allclose(hermite(2, x), (x**2 - 1) / math.sqrt(2), atol=1e-14 * 25)
    np.testing.assert_allclose(hermite(3, x), (x**3 - 3 * x) / math.sqrt(6), atol=1e-14 * 125)


@pytest.mark.parametrize("k", [0, 1, 5, 17, 60, 150, 400])
@pytest.mark.parametrize("x", [-9.5, -2.25, 0.0, 0.3, 4.0, 13.0])
def test_against_mpmath(k, x):
    ref = float(hermite_mp(k, x))
    assert hermite(k, x) == pytest.approx(ref, rel=1e-11, abs=1e-14)
    refw = float(hermite_weighted_mp(k, x))
    assert hermite_weighted(k, x) == pytest.approx(refw, rel=1e-11, abs=1e-14)


def test_unweighted_overflow_gives_inf_weighted_stays_finite():
    k, x = 4000, 200.0
    assert math.isinf(hermite(k, x))
    val = hermite_weighted(k, x)
    assert math.isfinite(val) and abs(val) <= 1.0


def test_weighted_large_degree_matches_mpmath():
    k, x = 20000, 3.7
    ref = float(hermite_weighted_mp(k, x, dps=60))
    assert hermite_weighted(k, x) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_orthonormality_via_gauss_hermite():
    rule = gauss_hermite(31)
    x, w = rule.nodes[:, 0], rule.weights
    H = np.array([hermite(k, x) for k in range(31)])
    gram = (H * w) @ H.T
    np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)


def test_cramer_and_decay_bounds_grid():
    x = np.round(np.arange(-2000, 2001) * 0.01, 10)
    table = hermite_weighted_table(200, x)
    assert np.all(np.abs(table) <= 1.0)
    k = np.arange(1, 201)[:, None]
    bound = np.minimum(1.0, math.sqrt(math.pi) / k ** (1.0 / 12.0))
    assert np.all(np.abs(table[1:]) <= bound)


def test_weighted_table_matches_pointwise():
    x = np.array([-3.0, 0.1, 2.5])
    table = hermite_weighted_table(50, x)
    for k in (0, 1, 7, 50):
        np.testing.assert_allclose(table[k], hermite_weighted(k, x), rtol=1e-13, atol=1e-300)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(-50, 50))
def test_cramer_bound_random_large_k(k, x):
    val = hermite_weighted(k, x)
    assert abs(val) <= 1.0
    if k >= 1:
        assert abs(val) <= min(1.0, math.sqrt(math.pi) / k ** (1 / 12))


def _richardson_derivative(f, x, tau, h=1e-3):
    def central(step):
        if tau == 1:
            return (f(x + step) - f(x - step)) / (2 * step)
        if tau == 2:
            return (f(x + step) - 2 * f(x) + f(x - step)) / step**2
        return (f(x + 2 * step) - 2 * f(x + step) + 2 * f(x - step) - f(x - 2 * step)) / (2 * step**3)
    return (4 * central(h / 2) - central(h)) / 3


@pytest.mark.parametrize("tau", [1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2, 3, 5, 8, 12, 20])
def test_derivative_identity(k, tau):
    for x in (-2.0, -1.0, 0.0, 1.0, 2.0):
        numeric = _richardson_derivative(lambda t: hermite(k, t), x, tau)
        exact = hermite_derivative_factor(k, tau) * (hermite(k - tau, x) if k >= tau else 0.0)
        assert numeric == pytest.approx(exact, abs=1e-5, rel=1e-5)


def test_gaussian_density():
    g = GaussianDensity(3)
    assert g(np.zeros(3)) == pytest.approx((2 * math.pi) ** -1.5, rel=1e-15)
    x = np.array([0.3, -1.2, 2.0])
    assert g(x) == pytest.approx(np.prod(gaussian_density(x)), rel=1e-14)
    assert g.log(x) == pytest.approx(math.log(g(x)), rel=1e-14)
    assert np.all(g(np.random.default_rng(0).normal(size=(10, 3)) * 5) > 0)
    with pytest.raises(ValueError):
        g(np.zeros(2))
