import math

import numpy as np
import pytest
from scipy.integrate import quad

from caputo_scheme.utils.coefficients import (
    FractionalOrder,
    a0_bounds,
    a_coeffs,
    ann_bounds,
    b_bounds,
    b_coeff,
    b_row,
    caputo_difference,
    check_corollary41,
    check_lemma41,
    coefficient_table,
    identity_sweep,
    inequality_sweep,
    midpoint_nodes,
    power_increments,
)
from caputo_scheme.utils.special_functions import gamma

ALPHAS = [0.1, 0.25, 0.5, 0.75, 0.9]


def test_fractional_order_validation():
    assert FractionalOrder(0.25).s_alpha == 0.25
    assert FractionalOrder(0.75, 0.05).s_alpha == pytest.approx(0.20)
    assert FractionalOrder.with_default_epsilon(0.95).epsilon == pytest.approx(0.025)
    with pytest.raises(ValueError):
        FractionalOrder(1.0)
    with pytest.raises(ValueError):
        FractionalOrder(0.7, 0.3)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_first_row_is_plus_minus_gamma(alpha):
    a = a_coeffs(alpha, 1)
    assert a[0] == pytest.approx(-gamma(1 + alpha), rel=1e-13)
    assert a[1] == pytest.approx(gamma(1 + alpha), rel=1e-13)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("n", [1, 2, 7, 64, 250])
def test_row_identities(alpha, n):
    table = coefficient_table(alpha, n)
    assert table.sum_residual() <= 1e-12
    assert abs(math.fsum(table.b) - math.pi / math.sin(alpha * math.pi)) <= 1e-10
    assert table.sign_pattern_ok()
    assert np.all(table.b > 0)


def test_b_coeff_agrees_with_row_and_brackets():
    alpha, n = 0.35, 12
    row = b_row(alpha, n)
    for j in range(1, n + 1):
        assert b_coeff(alpha, j, n) == pytest.approx(row[j - 1], rel=1e-12)
        lower, upper = b_bounds(alpha, j, n)
        assert lower < row[j - 1] < upper
    assert b_bounds(alpha, n, n)[1] == math.inf


def b_by_quadrature(alpha: float, j: int, n: int) -> float:
    # integral of x^(alpha-1) (n-x)^(-alpha) over [j-1, j]; endpoint singularities go into the weight
    if j == 1 and n == 1:
        return quad(lambda x: 1.0, 0.0, 1.0, weight="alg", wvar=(alpha - 1, -alpha), epsabs=1e-14)[0]
    if j == 1:
        return quad(lambda x: (n - x) ** -alpha, 0.0, 1.0, weight="alg", wvar=(alpha - 1, 0.0), epsabs=1e-14)[0]
    if j == n:
        return quad(lambda x: x ** (alpha - 1), n - 1.0, n, weight="alg", wvar=(0.0, -alpha), epsabs=1e-14)[0]
    return quad(lambda x: x ** (alpha - 1) * (n - x) ** -alpha, j - 1.0, j, epsabs=1e-14, epsrel=1e-13)[0]


def test_b_coeff_matches_quadrature_of_the_kernel():
    assert b_coeff(0.5, 2, 3) == pytest.approx(b_by_quadrature(0.5, 2, 3), abs=1e-9)
    for alpha in ALPHAS:
        for n in (1, 4, 9):
            for j in range(1, n + 1):
                assert b_coeff(alpha, j, n) == pytest.approx(b_by_quadrature(alpha, j, n), abs=1e-9)


def test_beta_sum_by_quadrature():
    total = math.fsum(b_by_quadrature(0.3, j, 7) for j in range(1, 8))
    assert total == pytest.approx(math.pi / math.sin(0.3 * math.pi), abs=1e-9)
    assert math.fsum(b_row(0.3, 7)) == pytest.approx(total, abs=1e-9)


def test_b_bounds_vectorised_over_a_row():
    alpha, n = 0.6, 20
    lower, upper = b_bounds(alpha, np.arange(1, n + 1), n)
    assert upper[-1] == math.inf
    for j in (1, 7, n):
        assert (lower[j - 1], upper[j - 1]) == b_bounds(alpha, j, n)
    with pytest.raises(ValueError):
        b_bounds(alpha, np.arange(0, 3), n)


def test_b_coeff_index_out_of_range():
    with pytest.raises(ValueError):
        b_coeff(0.5, 0, 4)
    with pytest.raises(ValueError):
        b_coeff(0.5, 5, 4)
    with pytest.raises(ValueError):
        a_coeffs(0.5, 0)


@pytest.mark.parametrize("alpha", [0.2, 0.6])
def test_a0_and_ann_bounds(alpha):
    for n in [2, 10, 100]:
        table = coefficient_table(alpha, n)
        lo, hi = a0_bounds(alpha, n)
        assert lo <= abs(table.a[0]) <= hi
        lo, hi = ann_bounds(alpha, n)
        assert lo <= table.a_nn <= hi


def test_power_increments_without_cancellation():
    j = np.array([1.0, 2.0, 10.0, 1e6])
    np.testing.assert_allclose(power_increments(0.3, j), j ** 0.3 - (j - 1) ** 0.3, rtol=1e-9)
    assert power_increments(0.3, np.array([1.0]))[0] == 1.0


def test_coefficient_rows_are_read_only():
    table = coefficient_table(0.4, 5)
    with pytest.raises(ValueError):
        table.a[0] = 0.0


@pytest.mark.parametrize("alpha", [0.3, 0.7])
def test_caputo_difference_exact_on_affine_in_t_alpha(alpha):
    dt = 0.05
    t = np.arange(21) * dt
    values = 2.0 - 3.0 * t ** alpha
    derivative = caputo_difference(alpha, values, dt)
    np.testing.assert_allclose(derivative, -3.0 * gamma(1 + alpha), rtol=1e-11)


def test_midpoint_nodes():
    alpha = 0.4
    nodes = np.linspace(0.0, 1.0, 11)
    s = midpoint_nodes(alpha, nodes)
    assert np.all((nodes[:-1] < s) & (s < nodes[1:]))
    np.testing.assert_allclose(s ** alpha, (nodes[:-1] ** alpha + nodes[1:] ** alpha) / 2, rtol=1e-13)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.6, 0.9])
def test_lemma41_holds_from_two(alpha):
    order = FractionalOrder.with_default_epsilon(alpha)
    for n in range(2, 40):
        check = check_lemma41(alpha, order.epsilon, n)
        assert check.passed
        assert check.margin > 0


def test_corollary41_holds_below_one_half():
    for n in range(2, 40):
        assert check_corollary41(0.3, 0.05, n).passed
    with pytest.raises(ValueError):
        check_corollary41(0.5, 0.05, 3)


def test_inequality_arguments_are_validated():
    with pytest.raises(ValueError):
        check_lemma41(0.6, 0.4, 5)
    with pytest.raises(ValueError):
        check_lemma41(0.6, 0.05, 1)


def test_quick_sweeps_pass():
    row = identity_sweep(0.25, 60)
    assert row["passed"]
    assert row["sum_a_max"] <= 1e-12
    row = inequality_sweep(0.25, 0.05, 60)
    assert row["first_pass_41"] == 2
    assert row["all_pass_41"] and row["all_pass_corollary"]
    assert inequality_sweep(0.75, 0.05, 10)["min_margin_corollary"] is None


@pytest.mark.slow
@pytest.mark.parametrize("alpha", ALPHAS)
def test_full_coefficient_sweep(alpha):
    row = identity_sweep(alpha, 1000)
    assert row["passed"], row


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_full_inequality_sweep(alpha):
    order = FractionalOrder.with_default_epsilon(alpha)
    row = inequality_sweep(alpha, order.epsilon, 1000)
    assert row["all_pass_41"]
    assert row["first_pass_41"] == 2
    assert row["min_margin_41"] > 0
    if alpha < 0.5:
        assert row["all_pass_corollary"]
