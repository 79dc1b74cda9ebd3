"""Operational matrices on the truncated wavelet basis"""
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
import scipy.linalg
from numpy.polynomial import legendre, polynomial

from .lucas_poly import alpha_weight
from .utils import format_complex_cell
from .wavelet_basis import (
    DOMAIN_LENGTH,
    WEIGHT_SCALE,
    as_coefficients,
    basis_matrix,
)


logger = logging.getLogger(__name__)

VALID_KINDS = ("differentiation", "power", "product", "stretch")


@dataclass(frozen=True)
class OperationalMatrix:
    entries: np.ndarray
    kind: str
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError("Unknown operational matrix kind {}".format(
                self.kind))
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("Operational matrix must be square, got {}".format(
                entries.shape))
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def dimension(self):
        return self.entries.shape[0]


def derivative_block(cfg):
    """The S x S block F with phi'_s = sum_lambda F[s, lambda] phi_lambda

    Row s of the coefficient table has degree s, so the table B is lower
    triangular and F B = B' is solved exactly by back substitution.
    """
    table = np.asarray(cfg.local_coefficients)
    derived = np.zeros_like(table)
    if cfg.S > 1:
        derived[:, :-1] = polynomial.polyder(table, axis=1) * cfg.blocks
    # F B = B'  <=>  B^T F^T = B'^T
    return scipy.linalg.solve_triangular(table.T, derived.T, lower=False).T


def build_D(cfg):
    block = derivative_block(cfg)
    logger.debug("Derivative block for k={}, S={}:\n{}".format(
        cfg.k, cfg.S, block))
    return OperationalMatrix(
        np.kron(np.eye(cfg.blocks), block),
        "differentiation",
        {"k": cfg.k, "S": cfg.S})


def expected_block_magnitudes(cfg):
    """|F_{Y,lambda}| = 2^(k+1) (Y - 1) sqrt(alpha_{Y-1} / alpha_{lambda-1})
    for Y > lambda with Y + lambda odd (1-based), zero elsewhere"""
    magnitudes = np.zeros((cfg.S, cfg.S))
    for row in range(cfg.S):
        for column in range(row):
            if (row + column) % 2:
                magnitudes[row, column] = (
                    2.0 ** (cfg.k + 1) * row
                    * np.sqrt(alpha_weight(row) / alpha_weight(column)))
    return magnitudes


def power_D(D, n):
    if D.kind != "differentiation":
        raise ValueError("Expected a differentiation matrix, got {}".format(
            D.kind))
    if n < 1:
        raise ValueError("Power must be positive, got {}".format(n))
    if n == 1:
        return D
    return OperationalMatrix(
        np.linalg.matrix_power(D.entries, n),
        "power",
        dict(D.meta, n=n))


def build_product_tensor(cfg):
    """C[i, j, m] = <phi_i phi_j, phi_m>"""
    xs, ws = cfg.quadrature
    psi = basis_matrix(cfg, xs)
    return np.einsum("qi,qj,qm,q->ijm", psi, psi, np.conj(psi), ws)


def build_product_matrix(C, E):
    """E~ with Psi Psi^T E ~= E~ Psi, i.e. E~[j, m] = sum_i E_i C[i, j, m]"""
    E = np.asarray(E, dtype=complex)
    if C.ndim != 3 or C.shape[0] != E.size:
        raise ValueError(
            "Product tensor of shape {} does not match a vector of length "
            "{}".format(C.shape, E.size))
    return OperationalMatrix(np.einsum("i,ijm->jm", E, C), "product")


def split_quadrature(cfg, breakpoints, order=None):
    """Nodes and weights for the weighted inner product with extra cuts

    On each block the weighted integral becomes a plain integral over
    t = arccos(u) in [0, pi]; every breakpoint inside the block cuts that
    interval and each piece gets its own Gauss-Legendre rule.
    """
    order = cfg.quad_order if order is None else order
    gl_nodes, gl_weights = legendre.leggauss(order)
    breakpoints = np.asarray(breakpoints, dtype=float)
    nodes, weights = [], []
    for h in range(cfg.blocks):
        u_cuts = breakpoints * cfg.blocks - 2 * h - 1
        u_cuts = u_cuts[(u_cuts > -1) & (u_cuts < 1)]
        t_cuts = np.unique(np.concatenate(([0.0, np.pi], np.arccos(u_cuts))))
        for a, b in zip(t_cuts[:-1], t_cuts[1:]):
            t = 0.5 * (b - a) * gl_nodes + 0.5 * (a + b)
            nodes.append((np.cos(t) + 1 + 2 * h) / cfg.blocks)
            weights.append(
                WEIGHT_SCALE * 0.5 * (b - a) * gl_weights / cfg.blocks)
    return np.concatenate(nodes), np.concatenate(weights)


def build_stretch(cfg, alpha):
    """P_alpha[j, m] = <phi_j(alpha .), phi_m>

    phi_j(alpha x) ~= sum_m P_alpha[j, m] phi_m(x), so the coefficients of
    f(alpha x) are P_alpha^T E.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1], got {}".format(alpha))
    # phi_j(alpha x) jumps where alpha x crosses a block boundary
    boundaries = DOMAIN_LENGTH * np.arange(1, cfg.blocks) / cfg.blocks
    xs, ws = split_quadrature(cfg, boundaries / alpha)
    stretched = basis_matrix(cfg, alpha * xs)
    psi = basis_matrix(cfg, xs)
    return OperationalMatrix(
        (stretched * ws[:, None]).T @ np.conj(psi),
        "stretch",
        {"alpha": alpha})


def dump_matrix(op):
    """Tab-separated ``a+bi`` cells, one matrix row per line"""
    return "\n".join(
        "\t".join(format_complex_cell(value) for value in row)
        for row in op.entries)


def transform_coefficients(cfg, op, E):
    """Coefficients of the transformed function: E^T op Psi = (op^T E)^T Psi

    With D this differentiates, with P_alpha it stretches the argument.
    """
    return op.entries.T @ as_coefficients(cfg, E)
