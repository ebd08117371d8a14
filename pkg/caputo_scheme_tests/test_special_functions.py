import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from caputo_scheme.utils.special_functions import (
    DomainError,
    MLParams,
    SectorConfig,
    beta_function,
    gamma,
    gauss_2f1,
    gl_weights,
    incomplete_beta,
    lgamma,
    ml_derivative,
    mittag_leffler,
    rgamma,
)

ALPHAS = [0.1, 0.25, 0.5, 0.75, 0.9]


def test_gamma_known_values():
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)
    assert gamma(0.0) == math.inf
    assert gamma(-3.0) == math.inf


def test_gamma_family_matches_scipy():
    x = np.array([-4.5, -2.25, -0.7, 0.1, 0.3, 0.75, 1.0, 1.5, 2.7, 10.2, 33.3])
    np.testing.assert_allclose(gamma(x), special.gamma(x), rtol=1e-13)
    np.testing.assert_allclose(rgamma(x), special.rgamma(x), rtol=1e-13)
    big = np.array([50.5, 200.5, 1000.0])
    np.testing.assert_allclose(lgamma(big), special.gammaln(big), rtol=1e-13)


def test_rgamma_vanishes_at_poles():
    np.testing.assert_array_equal(rgamma(np.array([0.0, -1.0, -7.0])), 0.0)
    assert rgamma(170.5) == pytest.approx(special.rgamma(170.5), rel=1e-10)


def test_mittag_leffler_half_order_matches_quadrature_oracle():
    # E_{1/2}(-1) = e erfc(1), erfc evaluated by adaptive quadrature
    tail, _ = quad(lambda t: math.exp(-t * t), 1.0, math.inf, epsabs=1e-15)
    expected = math.e * 2 / math.sqrt(math.pi) * tail
    value = mittag_leffler(MLParams(0.5, 1.0), -1.0)
    assert abs(value - expected) <= 1e-8


@pytest.mark.parametrize("x", [0.3, 2.0, 5.0, 12.0, 25.0, 39.0, 60.0, 100.0])
def test_mittag_leffler_half_order_on_negative_axis(x):
    value = mittag_leffler(MLParams(0.5, 1.0), -x)
    assert value.real == pytest.approx(special.erfcx(x), rel=1e-10)
    assert abs(value.imag) <= 1e-12


def test_mittag_leffler_closed_forms():
    assert mittag_leffler(MLParams(1.0, 1.0), 2.5) == pytest.approx(math.exp(2.5), rel=1e-15)
    assert mittag_leffler(MLParams(1.0, 2.0), -2.0).real == pytest.approx((math.exp(-2.0) - 1) / -2.0, rel=1e-12)
    assert mittag_leffler(MLParams(0.4, 3.0), 0.0) == pytest.approx(0.5, rel=1e-14)
    assert mittag_leffler(MLParams(0.6, 0.0), 0.0) == 0


def test_mittag_leffler_complex_argument_series_and_integral_agree():
    # E_{1/2}(z) = exp(z^2) erfc(-z) holds off the real axis too
    p = MLParams(0.5, 1.0)
    for z in [-0.5 + 0.5j, -3.0 + 1.0j, -8.0 - 2.0j]:
        expected = special.wofz(-1j * z)  # w(-iz) = exp(z^2) erfc(-z)
        assert abs(mittag_leffler(p, z) - expected) <= 1e-9 * max(1.0, abs(expected))


def test_mittag_leffler_growth_sector_is_outside_domain():
    with pytest.raises(DomainError):
        mittag_leffler(MLParams(0.5, 1.0), 100.0)
    with pytest.raises(DomainError):
        mittag_leffler(MLParams(0.5, 1.0), complex(math.nan, 0.0))
    with pytest.raises(ValueError):
        MLParams(1.5, 1.0)


def test_ml_derivative_of_exponential():
    # d/dt exp(-2t) at t = 1/2
    assert ml_derivative(1, 1.0, -2.0, 0.5).real == pytest.approx(-2 * math.exp(-1.0), rel=1e-12)
    assert ml_derivative(2, 0.5, 0.0, 1.0) == 0
    with pytest.raises(ValueError):
        ml_derivative(0, 0.5, -1.0, 1.0)


def test_sector_membership():
    sector = SectorConfig(math.pi / 4)
    assert sector.contains(0)
    assert sector.contains(1 + 0.5j)
    assert not sector.contains(-1)
    with pytest.raises(ValueError):
        SectorConfig(2.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_gauss_2f1_at_one_matches_reflection_formula(alpha):
    value = gauss_2f1(alpha, alpha, 1 + alpha, 1.0)
    assert value == pytest.approx(alpha * math.pi / math.sin(alpha * math.pi), rel=1e-10)


def test_gauss_2f1_matches_scipy_inside_interval():
    x = np.linspace(0.0, 0.95, 11)
    for a, b, c in [(0.3, 0.7, 1.3), (0.25, 0.75, 1.25), (1.5, -0.4, 2.5)]:
        np.testing.assert_allclose(gauss_2f1(a, b, c, x), special.hyp2f1(a, b, c, x), rtol=1e-12)


def test_gauss_2f1_domain_errors():
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, -2.0, 0.3)
    with pytest.raises(DomainError):
        gauss_2f1(0.7, 0.6, 1.2, 1.0)
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, 1.5, 1.2)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_incomplete_beta_matches_adaptive_quadrature(alpha):
    p, q = alpha, 1 - alpha
    x = np.linspace(0.025, 0.975, 20)
    expected = [quad(lambda t: (1 - t) ** (q - 1), 0.0, xi, weight="alg", wvar=(p - 1, 0.0),
                     epsabs=1e-13, epsrel=1e-13)[0] for xi in x]
    np.testing.assert_allclose(incomplete_beta(p, q, x), expected, atol=1e-9, rtol=0)


def test_incomplete_beta_endpoints():
    assert incomplete_beta(0.3, 0.7, 0.0) == 0.0
    assert incomplete_beta(0.3, 0.7, 1.0) == pytest.approx(math.pi / math.sin(0.3 * math.pi), rel=1e-13)
    assert beta_function(2.0, 3.0) == pytest.approx(1 / 12, rel=1e-14)
    with pytest.raises(DomainError):
        incomplete_beta(0.3, 0.7, 1.5)
    with pytest.raises(DomainError):
        incomplete_beta(-0.3, 0.7, 0.5)


def test_gl_weights():
    w = gl_weights(0.4, 50)
    j = np.arange(51)
    np.testing.assert_allclose(w, (-1.0) ** j * special.binom(0.4, j), rtol=1e-12, atol=1e-16)
    assert w[0] == 1.0
    assert np.all(w[1:] < 0)
    assert gl_weights(0.4, 0).tolist() == [1.0]


@pytest.mark.parametrize("z", [3j, -3j, 3 * np.exp(1j * (math.pi / 2 + 1e-7)), 3 * np.exp(1j * (math.pi / 2 - 1e-7)),
                               0.8 * np.exp(1j * math.pi / 2), 12 * np.exp(-1j * (math.pi / 2 + 0.05))])
def test_mittag_leffler_on_and_near_the_ray_alpha_pi(z):
    expected = special.wofz(-1j * z)
    value = mittag_leffler(MLParams(0.5, 1.0), z)
    assert abs(value - expected) <= 1e-10 * max(1.0, abs(expected))


def test_mittag_leffler_ray_with_exponential_order():
    # E_{1,2}(z) = (exp(z) - 1) / z on the negative axis, which is the ray alpha*pi for alpha = 1
    assert mittag_leffler(MLParams(1.0, 2.0), -7.5).real == pytest.approx((math.exp(-7.5) - 1) / -7.5, rel=1e-10)


@pytest.mark.parametrize("z", [-2.0 + 0.3j, 5j, -20.0, 0.7 - 0.2j])
def test_mittag_leffler_tolerance_refinement_is_consistent(z):
    p = MLParams(0.6, 1.0)
    assert abs(mittag_leffler(p, z, tol=1e-8) - mittag_leffler(p, z, tol=1e-9)) <= 1e-8


@pytest.mark.parametrize("alpha", ALPHAS)
def test_mittag_leffler_decays_like_inverse_argument(alpha):
    # 1 / (1 + Gamma(1 - alpha) x) <= E_alpha(-x) <= 1 / (1 + x / Gamma(1 + alpha))
    x = np.logspace(-1, 3, 25)
    scaled = np.array([abs(mittag_leffler(MLParams(alpha, 1.0), -xi)) * xi for xi in x])
    assert np.all(scaled <= special.gamma(1 + alpha) + 1e-9)
    assert np.all(scaled >= x / (1 + special.gamma(1 - alpha) * x) - 1e-9)


def test_ml_derivative_matches_finite_differences():
    def relaxation(t):
        return mittag_leffler(MLParams(0.5, 1.0), -t ** 0.5).real

    h = 1e-5
    central = (relaxation(1 + h) - relaxation(1 - h)) / (2 * h)
    assert ml_derivative(1, 0.5, -1.0, 1.0).real == pytest.approx(central, rel=1e-6)

    h = 1e-4
    central = (ml_derivative(1, 0.25, -1.0, 2 + h) - ml_derivative(1, 0.25, -1.0, 2 - h)).real / (2 * h)
    assert ml_derivative(2, 0.25, -1.0, 2.0).real == pytest.approx(central, rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("p, q", [(0.3, 0.7), (0.75, 0.25), (1.5, 2.0)])
def test_incomplete_beta_increasing_and_reflection(p, q):
    x = np.linspace(0.01, 0.99, 50)
    values = incomplete_beta(p, q, x)
    assert np.all(np.diff(values) > 0)
    np.testing.assert_allclose(values, beta_function(p, q) - incomplete_beta(q, p, 1 - x), atol=1e-10, rtol=0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_gl_weight_partial_sums_positive_and_decreasing(alpha):
    partial = np.cumsum(gl_weights(alpha, 500))
    assert np.all(partial > 0)
    assert np.all(np.diff(partial) < 0)
