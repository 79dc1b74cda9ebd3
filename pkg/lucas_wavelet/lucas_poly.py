"""Lucas polynomials L*_s and shifted Lucas polynomials Q*_s

Coefficient work (recurrence, composition, differentiation, products) is done
exactly with sympy polynomials over the Gaussian integers or rationals. Floating
point complex arithmetic only enters when a polynomial is evaluated.
"""
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
import sympy as sp
from numpy.polynomial import chebyshev, polynomial


logger = logging.getLogger(__name__)
X = sp.Symbol("x")

# Gauss-Chebyshev nodes used for the orthogonality checks along the imaginary
# segment; exact for products up to degree 2 * 64 - 1
ORTHOGONALITY_NODES = 64


def alpha_weight(s):
    """alpha_s: 2 for the constant polynomial, 1 for every s >= 1"""
    if s < 0:
        raise ValueError("alpha_s is undefined for s = {}".format(s))
    return 2 if s == 0 else 1


@dataclass(frozen=True)
class DensePolynomial:
    """A polynomial in one variable with exact coefficients

    ``coeffs`` is ascending by degree. Evaluation uses Horner's scheme on the
    complex floating point image of the coefficients.
    """
    poly: sp.Poly

    @classmethod
    def from_coefficients(cls, coeffs):
        # sympy expects a descending dense list
        return cls(sp.Poly(list(reversed(list(coeffs))) or [0], X))

    @property
    def coeffs(self):
        return tuple(reversed(self.poly.all_coeffs()))

    @property
    def degree(self):
        return 0 if self.poly.is_zero else self.poly.degree()

    @functools.cached_property
    def numeric(self):
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __call__(self, theta):
        return polynomial.polyval(_as_complex(theta), self.numeric)[()]

    def __add__(self, other):
        return DensePolynomial(self.poly + other.poly)

    def __sub__(self, other):
        return DensePolynomial(self.poly - other.poly)

    def __mul__(self, other):
        if isinstance(other, DensePolynomial):
            return DensePolynomial(self.poly * other.poly)
        return DensePolynomial(self.poly * other)

    __rmul__ = __mul__

    def derivative(self, order=1):
        if order == 0:
            return self
        return DensePolynomial(self.poly.diff((X, order)))

    def compose(self, inner):
        """Return self(inner(x))"""
        return DensePolynomial(self.poly.compose(inner.poly))

    def max_abs_coefficient(self):
        return max(abs(complex(c)) for c in self.coeffs)


def _as_complex(theta):
    values = np.asarray(theta, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise ValueError("Argument {} is not finite".format(theta))
    return values


def _check_order(s):
    if s < 0:
        raise ValueError("Polynomial order must be nonnegative, got {}".format(
            s))


def lucas_eval_recurrence(s, theta):
    """Evaluate L*_s(theta) with L*_s = theta L*_{s-1} + L*_{s-2}

    :param s: Polynomial order
    :param theta: Complex scalar or array of evaluation points
    :return: L*_s(theta) with the shape of ``theta``
    """
    _check_order(s)
    theta = _as_complex(theta)
    previous, current = np.full_like(theta, 2.0), theta
    if s == 0:
        return previous[()]
    for _ in range(s - 1):
        previous, current = current, theta * current + previous
    return current[()]


def lucas_eval_closed(s, theta):
    """2^-s [(theta - r)^s + (theta + r)^s] with r the principal sqrt of
    theta^2 + 4; flipping the branch only swaps the two terms"""
    _check_order(s)
    theta = _as_complex(theta)
    root = np.sqrt(theta ** 2 + 4)
    return (2.0 ** -s * ((theta - root) ** s + (theta + root) ** s))[()]


@functools.lru_cache(maxsize=None)
def lucas_coefficients(s):
    """Exact coefficients of L*_s, built by the recurrence on polynomials"""
    _check_order(s)
    previous = DensePolynomial(sp.Poly(2, X))
    if s == 0:
        return previous
    current = DensePolynomial(sp.Poly(X, X))
    for _ in range(s - 1):
        previous, current = current, DensePolynomial(
            current.poly * X + previous.poly)
    return current


def hyperbolic_check(s, theta):
    """|L*_s(2 sinh theta) - 2 sinh(s theta)| for odd s, with cosh for even
    s"""
    if s < 1:
        raise ValueError("hyperbolic characterization needs s >= 1, "
                         "got {}".format(s))
    value = lucas_eval_recurrence(s, 2.0 * math.sinh(theta))
    target = (2.0 * math.sinh(s * theta) if s % 2
              else 2.0 * math.cosh(s * theta))
    return float(abs(value - target))


def lucas_ode_residual(s, theta):
    """Residual of (theta^2 + 4) y'' + theta y' - s^2 y for y = L*_s, with
    the derivatives taken from the exact coefficients"""
    p = lucas_coefficients(s)
    theta = _as_complex(theta)
    return ((theta ** 2 + 4) * p.derivative(2)(theta)
            + theta * p.derivative(1)(theta)
            - s ** 2 * p(theta))[()]


def lucas_zeros(s):
    """The s purely imaginary zeros 2i cos((2j + 1) pi / (2s)) of L*_s"""
    if s < 1:
        raise ValueError("L*_{} has no zeros".format(s))
    index = np.arange(s)
    return 2.0 * 1j * np.cos((2 * index + 1) * np.pi / (2 * s))


def rodrigues_eval(s, theta):
    """Evaluate L*_s(theta) through Rodrigues' formula

    2 s!/(2s)! (theta^2 + 4)^(1/2) d^s/dtheta^s (theta^2 + 4)^(s - 1/2)

    The m-th derivative is carried as P_m(theta) (theta^2 + 4)^(s - 1/2 - m)
    with P_m exact, using
    d/dtheta [P q^a] = (P' q + 2 a theta P) q^(a - 1).

    :param s: Polynomial order
    :param theta: Real evaluation point(s)
    :return: complex value(s) of L*_s(theta)
    :raises ValueError: if theta has a nonzero imaginary part
    """
    _check_order(s)
    theta = np.asarray(theta)
    if np.iscomplexobj(theta) and np.any(np.imag(theta) != 0):
        raise ValueError(
            "Rodrigues' formula is only evaluated at real points, got "
            "{}".format(theta))
    theta = np.real(theta).astype(float)

    q = sp.Poly(X ** 2 + 4, X)
    exponent = sp.Rational(2 * s - 1, 2)
    p = sp.Poly(1, X, domain=sp.QQ)
    for _ in range(s):
        p = p.diff(X) * q + sp.Poly(2 * exponent * X, X) * p
        exponent -= 1
    # exponent is now -1/2, which cancels the leading (theta^2 + 4)^(1/2)
    logger.debug("Rodrigues numerator for s={} is {}".format(s, p.as_expr()))
    scale = 2.0 * math.factorial(s) / math.factorial(2 * s)
    return (scale * DensePolynomial(p)(theta))[()]


def generating_check(theta, t, terms):
    """|sum_{s < terms} L*_s(theta) t^s - (2 - theta t)/(1 - theta t - t^2)|

    :raises ValueError: outside |t| (|theta| + |t|) < 1 or if terms < 1
    """
    if terms < 1:
        raise ValueError("At least one term is required")
    if abs(t) * (abs(theta) + abs(t)) >= 1:
        raise ValueError(
            "Generating series does not converge for theta={}, t={}".format(
                theta, t))
    theta, t = complex(theta), complex(t)
    total = 0j
    previous, current = 2.0 + 0j, theta
    power = 1.0 + 0j
    for s in range(terms):
        total += (previous if s == 0 else current) * power
        if s >= 1:
            previous, current = current, theta * current + previous
        power *= t
    closed = (2 - theta * t) / (1 - theta * t - t ** 2)
    return abs(total - closed)


def product_expand(m, n):
    """Largest coefficient of L*_m L*_n - L*_{m+n} - (-1)^n L*_{m-n}; the
    identity makes this exactly zero"""
    if not m >= n >= 0:
        raise ValueError("Expected m >= n >= 0, got m={}, n={}".format(m, n))
    deviation = (lucas_coefficients(m) * lucas_coefficients(n)
                 - lucas_coefficients(m + n)
                 - (-1) ** n * lucas_coefficients(m - n))
    return deviation.max_abs_coefficient()


@functools.lru_cache(maxsize=None)
def shifted_coefficients(s):
    """Q*_s(t) = L*_s(2t - 2i), with exact Gaussian integer coefficients"""
    argument = DensePolynomial(sp.Poly(2 * X - 2 * sp.I, X))
    return lucas_coefficients(s).compose(argument)


def chebyshev_bridge(s, u):
    """|L*_s(2iu) - 2 i^s T_s(u)|"""
    _check_order(s)
    basis = np.zeros(s + 1)
    basis[s] = 1.0
    target = 2.0 * 1j ** s * chebyshev.chebval(u, basis)
    return float(np.max(np.abs(lucas_eval_recurrence(s, 2j * np.asarray(u))
                               - target)))


def _segment_inner(f, g):
    u, w = chebyshev.chebgauss(ORTHOGONALITY_NODES)
    return complex(np.sum(w * f(u) * np.conj(g(u))) / 4.0)


def lucas_orthogonality(s, h):
    """<L*_s, L*_h> along theta = 2iu, u in [-1, 1], weight
    (1 - u^2)^(-1/2) / 4; gives 0, pi/2 or pi"""
    return _segment_inner(
        lambda u: lucas_eval_recurrence(s, 2j * u),
        lambda u: lucas_eval_recurrence(h, 2j * u))


def shifted_orthogonality(s, h):
    """<Q*_s, Q*_h> along t = i(u + 1), same weight; gives 0 or
    pi alpha_s / 2"""
    return _segment_inner(
        lambda u: shifted_coefficients(s)(1j * (u + 1)),
        lambda u: shifted_coefficients(h)(1j * (u + 1)))
