import math

import numpy as np
import pytest
import sympy as sp

from lucas_wavelet import lucas_poly
from lucas_wavelet.lucas_poly import DensePolynomial


POINTS = np.array([0.3, -1.2, 0.5 + 0.7j, 0.8j, 2.0])


def test_first_lucas_polynomials():
    assert lucas_poly.lucas_coefficients(0).coeffs == (2,)
    assert lucas_poly.lucas_coefficients(1).coeffs == (0, 1)
    assert lucas_poly.lucas_coefficients(2).coeffs == (2, 0, 1)
    assert lucas_poly.lucas_coefficients(3).coeffs == (0, 3, 0, 1)
    assert lucas_poly.lucas_coefficients(4).coeffs == (2, 0, 4, 0, 1)


def test_lucas_numbers_at_one():
    # L*_s(1) are the Lucas numbers
    values = [lucas_poly.lucas_eval_recurrence(s, 1.0) for s in range(8)]
    assert np.allclose(values, [2, 1, 3, 4, 7, 11, 18, 29])


@pytest.mark.parametrize("s", range(13))
def test_recurrence_matches_closed_form(s):
    recurrence = lucas_poly.lucas_eval_recurrence(s, POINTS)
    closed = lucas_poly.lucas_eval_closed(s, POINTS)
    assert np.max(np.abs(recurrence - closed)
                  / np.maximum(1, np.abs(recurrence))) <= 1e-10


def test_recurrence_keeps_scalar_shape():
    value = lucas_poly.lucas_eval_recurrence(2, 1.5)
    assert np.ndim(value) == 0
    assert value == pytest.approx(4.25)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        lucas_poly.lucas_eval_recurrence(-1, 0.5)
    with pytest.raises(ValueError):
        lucas_poly.lucas_coefficients(-2)


def test_non_finite_argument_rejected():
    with pytest.raises(ValueError):
        lucas_poly.lucas_eval_recurrence(3, float("nan"))


@pytest.mark.parametrize("s", range(1, 9))
def test_hyperbolic_characterization(s):
    for theta in (-0.7, 0.2, 1.1):
        assert lucas_poly.hyperbolic_check(s, theta) <= 1e-9


def test_hyperbolic_needs_positive_order():
    with pytest.raises(ValueError):
        lucas_poly.hyperbolic_check(0, 0.3)


@pytest.mark.parametrize("s", range(13))
def test_lucas_differential_equation(s):
    assert np.max(np.abs(lucas_poly.lucas_ode_residual(s, POINTS))) <= 1e-9


@pytest.mark.parametrize("s", range(1, 11))
def test_zeros(s):
    zeros = lucas_poly.lucas_zeros(s)
    assert zeros.shape == (s,)
    assert np.allclose(zeros.real, 0)
    assert np.max(np.abs(lucas_poly.lucas_eval_recurrence(s, zeros))) <= 1e-8


def test_constant_has_no_zeros():
    with pytest.raises(ValueError):
        lucas_poly.lucas_zeros(0)


@pytest.mark.parametrize("s", range(6))
def test_rodrigues_formula(s):
    theta = np.array([-1.3, 0.0, 0.4, 1.7])
    expected = lucas_poly.lucas_eval_recurrence(s, theta)
    value = lucas_poly.rodrigues_eval(s, theta)
    assert np.max(np.abs(value - expected)
                  / np.maximum(1, np.abs(expected))) <= 1e-8


def test_rodrigues_rejects_complex_points():
    with pytest.raises(ValueError):
        lucas_poly.rodrigues_eval(2, 0.5 + 1j)


def test_generating_function_converges_geometrically():
    errors = [lucas_poly.generating_check(0.5, 0.3, terms)
              for terms in (5, 10, 20, 40)]
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] <= 1e-12


def test_generating_function_outside_disc():
    with pytest.raises(ValueError):
        lucas_poly.generating_check(2.0, 0.5, 10)
    with pytest.raises(ValueError):
        lucas_poly.generating_check(0.5, 0.3, 0)


@pytest.mark.parametrize("m, n", [(m, n) for m in range(7) for n in range(m + 1)])
def test_product_identity_is_exact(m, n):
    assert lucas_poly.product_expand(m, n) == 0


def test_product_identity_needs_ordered_arguments():
    with pytest.raises(ValueError):
        lucas_poly.product_expand(1, 2)


def test_shifted_polynomials():
    expected = {
        0: (2,),
        1: (-2 * sp.I, 2),
        2: (-2, -8 * sp.I, 4),
        3: (2 * sp.I, -18, -24 * sp.I, 8),
    }
    for s, coeffs in expected.items():
        assert lucas_poly.shifted_coefficients(s).coeffs == coeffs


@pytest.mark.parametrize("s", range(13))
def test_chebyshev_bridge(s):
    assert lucas_poly.chebyshev_bridge(s, np.linspace(-1, 1, 41)) <= 1e-10


def test_lucas_orthogonality():
    for s in range(6):
        for h in range(6):
            value = lucas_poly.lucas_orthogonality(s, h)
            if s != h:
                expected = 0
            elif s == 0:
                expected = math.pi
            else:
                expected = math.pi / 2
            assert abs(value - expected) <= 1e-10


def test_shifted_orthogonality():
    for s in range(6):
        for h in range(6):
            value = lucas_poly.shifted_orthogonality(s, h)
            expected = (math.pi * lucas_poly.alpha_weight(s) / 2
                        if s == h else 0)
            assert abs(value - expected) <= 1e-10


def test_alpha_weight():
    assert lucas_poly.alpha_weight(0) == 2
    assert lucas_poly.alpha_weight(5) == 1
    with pytest.raises(ValueError):
        lucas_poly.alpha_weight(-1)


def test_dense_polynomial_arithmetic():
    p = DensePolynomial.from_coefficients([1, 2])
    q = DensePolynomial.from_coefficients([0, 0, 3])
    assert (p + q).coeffs == (1, 2, 3)
    assert (q - p).coeffs == (-1, -2, 3)
    assert (p * q).coeffs == (0, 0, 3, 6)
    assert (2 * p).coeffs == (2, 4)
    assert q.derivative().coeffs == (0, 6)
    assert q.derivative(3).degree == 0
    assert q.compose(p).coeffs == (3, 12, 12)
    assert p(2.0) == pytest.approx(5.0)
    assert q.max_abs_coefficient() == 3


def test_unshifted_wavelet_form_matches_shifted_form():
    # L*_s(2^(k+1) i theta - 2 (2h + 1) i) against Q*_s(2^k i theta - 2h i)
    k, h = 1, 1
    theta = np.linspace(1.0, 1.99, 7)
    for s in range(6):
        unshifted = lucas_poly.lucas_eval_recurrence(
            s, 2 ** (k + 1) * 1j * theta - (2 * h + 1) * 2j)
        shifted = lucas_poly.shifted_coefficients(s)(
            2 ** k * 1j * theta - 2 * h * 1j)
        assert np.allclose(unshifted, shifted)
