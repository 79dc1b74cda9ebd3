"""The truncated shifted Lucas wavelet family on [0, 2]

phi_{h,s}(x) = 2^((k+1)/2) sqrt(2 / (pi alpha_s)) Q*_s(2^k i x - 2h i)
on h / 2^(k-1) <= x < (h + 1) / 2^(k-1), zero elsewhere.

Every block is handled in its local variable u = 2^k x - 2h - 1 in [-1, 1),
where Q*_s(i(u + 1)) = L*_s(2iu) = 2 i^s T_s(u). The inner product on block h
carries the weight w_h = WEIGHT_SCALE (1 - u^2)^(-1/2).
"""
import dataclasses
import functools
import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import sympy as sp
from numpy.polynomial import chebyshev, polynomial

from .config import default_quad_order
from .lucas_poly import (
    DensePolynomial,
    X,
    alpha_weight,
    shifted_coefficients,
)
from .utils import QuadratureWarning


logger = logging.getLogger(__name__)

# c_w, chosen so that <phi_{0,0}, phi_{0,0}> = 1 at k = 0. With the
# normalization above it makes the whole family orthonormal for every k.
WEIGHT_SCALE = 0.125
DOMAIN_LENGTH = 2.0


class NonFiniteSampleError(ValueError):
    pass


class WaveletIndex(NamedTuple):
    k: int
    h: int
    s: int

    def flat(self, S):
        return self.h * S + self.s


@dataclass(frozen=True)
class BasisConfig:
    """Resolution k, order S, problem-domain length l and the number of
    Gauss-Chebyshev nodes per subinterval"""
    k: int
    S: int
    l: float = DOMAIN_LENGTH
    quad_order: Optional[int] = None

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative, got {}".format(self.k))
        if self.S < 1:
            raise ValueError("S must be positive, got {}".format(self.S))
        if not 0 < self.l <= DOMAIN_LENGTH:
            raise ValueError(
                "Domain length must lie in (0, 2], got {}".format(self.l))
        if self.quad_order is None:
            object.__setattr__(self, "quad_order", default_quad_order(self.S))
        if self.quad_order < 1:
            raise ValueError("quad_order must be positive, got {}".format(
                self.quad_order))
        if self.quad_order < 8 * self.S:
            warnings.warn(
                "quad_order {} is below 8 * S = {}".format(
                    self.quad_order, 8 * self.S),
                QuadratureWarning)

    @property
    def blocks(self):
        return 2 ** self.k

    @property
    def dimension(self):
        return self.blocks * self.S

    def index(self, j):
        if not 0 <= j < self.dimension:
            raise ValueError("Flat index {} outside [0, {})".format(
                j, self.dimension))
        return WaveletIndex(self.k, j // self.S, j % self.S)

    def check_index(self, idx):
        if (idx.k != self.k or not 0 <= idx.h < self.blocks
                or not 0 <= idx.s < self.S):
            raise ValueError("Index {} is not valid for k={}, S={}".format(
                idx, self.k, self.S))
        return idx

    def for_length(self, l):
        return self if l == self.l else dataclasses.replace(self, l=l)

    def to_canonical(self, theta):
        """Map a problem coordinate in [0, l] onto [0, 2]"""
        return np.asarray(theta, dtype=float) * (DOMAIN_LENGTH / self.l)

    @functools.cached_property
    def norms(self):
        return np.array([
            2.0 ** ((self.k + 1) / 2.0) * np.sqrt(
                2.0 / (np.pi * alpha_weight(s)))
            for s in range(self.S)])

    @functools.cached_property
    def local_coefficients(self):
        """Row s holds the ascending coefficients, in u, of phi_{h,s} on any
        block h"""
        shift = DensePolynomial(sp.Poly(sp.I * X + sp.I, X))
        table = np.zeros((self.S, self.S), dtype=complex)
        for s in range(self.S):
            local = shifted_coefficients(s).compose(shift).numeric
            table[s, :local.size] = self.norms[s] * local
        table.setflags(write=False)
        return table

    @functools.cached_property
    def quadrature(self):
        """Canonical nodes and inner product weights for all blocks"""
        u, w = chebyshev.chebgauss(self.quad_order)
        nodes = np.concatenate([
            (u + 1 + 2 * h) / self.blocks for h in range(self.blocks)])
        weights = np.tile(WEIGHT_SCALE * w / self.blocks, self.blocks)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        logger.debug("Built {} quadrature nodes for k={}, S={}".format(
            nodes.size, self.k, self.S))
        return nodes, weights


def _locate(cfg, x, closed):
    scaled = x * cfg.blocks
    h = np.floor(scaled / 2.0).astype(int)
    valid = (x >= 0) & (x < DOMAIN_LENGTH)
    if closed:
        right = x == DOMAIN_LENGTH
        h = np.where(right, cfg.blocks - 1, h)
        valid = valid | right
    h = np.where(valid, h, 0)
    return h, scaled - 2 * h - 1, valid


def basis_matrix(cfg, xs, closed=False, order=0):
    """Evaluate every basis function (or its derivative of the given order)
    at the canonical points ``xs``

    :param cfg: BasisConfig
    :param xs: Points in [0, 2]; points outside every support give zeros
    :param closed: Evaluate the last block at x = 2 instead of returning 0
    :param order: Derivative order
    :return: complex array of shape (len(xs), cfg.dimension)
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    h, u, valid = _locate(cfg, xs, closed)
    coefficients = np.asarray(cfg.local_coefficients)
    if order:
        coefficients = (polynomial.polyder(coefficients, m=order, axis=1)
                        * float(cfg.blocks) ** order)
    local = polynomial.polyvander(u, coefficients.shape[1] - 1) @ coefficients.T

    result = np.zeros((xs.size, cfg.dimension), dtype=complex)
    rows = np.nonzero(valid)[0]
    columns = h[rows, None] * cfg.S + np.arange(cfg.S)
    result[rows[:, None], columns] = local[rows]
    return result


def basis_derivative_matrix(cfg, xs, order=1, closed=False):
    return basis_matrix(cfg, xs, closed=closed, order=order)


def basis_vector(cfg, theta, closed=False):
    """Psi(theta) in flat-index order"""
    return basis_matrix(cfg, [theta], closed=closed)[0]


def support(cfg, idx):
    cfg.check_index(idx)
    return (2.0 * idx.h / cfg.blocks, 2.0 * (idx.h + 1) / cfg.blocks)


def wavelet_eval(cfg, idx, theta):
    cfg.check_index(idx)
    return basis_vector(cfg, theta)[idx.flat(cfg.S)]


def as_coefficients(cfg, E):
    E = np.asarray(E, dtype=complex)
    if E.shape != (cfg.dimension,):
        raise ValueError(
            "Coefficient vector has shape {}, expected ({},)".format(
                E.shape, cfg.dimension))
    return E


def sample(f, xs):
    """Evaluate ``f`` on the nodes, broadcasting constants and rejecting
    non-finite values"""
    values = np.broadcast_to(np.asarray(f(xs), dtype=complex), xs.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise NonFiniteSampleError(
            "Function is not finite at x = {}".format(xs[np.argmax(bad)]))
    return values


def inner_product(cfg, f, g):
    """<f, g> = sum_h integral f conj(g) w_h over each support"""
    xs, ws = cfg.quadrature
    return complex(np.sum(sample(f, xs) * np.conj(sample(g, xs)) * ws))


def weighted_norm(cfg, f):
    return float(np.sqrt(max(inner_product(cfg, f, f).real, 0.0)))


def gram_matrix(cfg):
    xs, ws = cfg.quadrature
    psi = basis_matrix(cfg, xs)
    return (psi * ws[:, None]).T @ np.conj(psi)


def project(cfg, f):
    """Expansion coefficients E_{h,s} = <f, phi_{h,s}>"""
    xs, ws = cfg.quadrature
    return np.conj(basis_matrix(cfg, xs)).T @ (sample(f, xs) * ws)


def synthesize(cfg, E, theta, closed=False):
    """E^T Psi(theta) for a scalar or an array of canonical points"""
    E = as_coefficients(cfg, E)
    values = basis_matrix(cfg, theta, closed=closed) @ E
    return values[0] if np.ndim(theta) == 0 else values
