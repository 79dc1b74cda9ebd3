"""Coefficient decay, remainder and error bounds, and measured convergence"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional

import numpy as np
import scipy.integrate

from .tau_solver import NewtonOptions, SolverError, newton_solve
from .utils import stopwatch
from .wavelet_basis import (
    DOMAIN_LENGTH,
    BasisConfig,
    as_coefficients,
    basis_matrix,
    project,
    sample,
)


logger = logging.getLogger(__name__)

# relative slack when comparing a projected coefficient with its bound
BOUND_SLACK = 1e-12
MIN_SWEEP_S = 3


@dataclass
class BoundReport:
    N: float
    coefficients: np.ndarray
    coeff_bounds: np.ndarray
    error_bound: Optional[float]
    measured_error: Optional[float]
    calibration: float = 1.0
    violations: List = field(default_factory=list)
    satisfied: Dict[str, bool] = field(default_factory=dict)


class SweepRow(NamedTuple):
    k: int
    S: int
    max_error: float
    l2w_error: float
    bound: Optional[float]
    runtime_ms: Optional[float]
    converged: bool


def coeff_bound(h, s, N, max_rho_prime=0.0):
    """Upper bound on |E_{h,s}| for a function with |rho''| <= N

    :param h: Block index
    :param s: Order, at least 1
    :param N: Bound on the second derivative
    :param max_rho_prime: Bound on the first derivative, used for s = 1
    :return: 2 N sqrt(pi) / ((h + 1)^(5/2) (s^2 - 1)) for s > 1,
             sqrt(pi) max_rho_prime / (h + 1)^(3/2) for s = 1
    """
    if h < 0:
        raise ValueError("Block index must be nonnegative, got {}".format(h))
    if s < 1:
        raise ValueError("No coefficient bound for s = {}".format(s))
    if N <= 0:
        raise ValueError("N must be positive, got {}".format(N))
    if max_rho_prime < 0:
        raise ValueError("max_rho_prime must be nonnegative, got {}".format(
            max_rho_prime))
    if s == 1:
        return math.sqrt(math.pi) * max_rho_prime / (h + 1) ** 1.5
    return 2 * N * math.sqrt(math.pi) / ((h + 1) ** 2.5 * (s ** 2 - 1))


def _weighted_l2(cfg, E, f):
    xs, ws = cfg.quadrature
    difference = basis_matrix(cfg, xs) @ E - sample(f, xs)
    return float(np.sqrt(np.sum(np.abs(difference) ** 2 * ws)))


def decay_audit(cfg, f, f2_bound, f1_bound, calibration=1.0):
    """Project ``f`` (canonical coordinates on [0, 2]) and compare every
    coefficient with s >= 1 against ``calibration`` times coeff_bound

    Violations are logged and listed in the report, never raised.
    """
    E = project(cfg, f)
    magnitudes = np.abs(E).reshape(cfg.blocks, cfg.S)
    bounds = np.full((cfg.blocks, cfg.S), np.nan)
    violations = []
    for h in range(cfg.blocks):
        for s in range(1, cfg.S):
            bounds[h, s] = calibration * coeff_bound(h, s, f2_bound, f1_bound)
            if magnitudes[h, s] > bounds[h, s] * (1 + BOUND_SLACK) + BOUND_SLACK:
                violations.append((h, s))
                logger.warning(
                    "|E_{},{}| = {} exceeds its bound {}".format(
                        h, s, magnitudes[h, s], bounds[h, s]))

    error_bound = (error_estimate(cfg.k, cfg.S, f2_bound, corrected=True)
                   if cfg.S > 2 else None)
    measured = _weighted_l2(cfg, E, f)
    satisfied = {"coefficients": not violations}
    if error_bound is not None:
        satisfied["error"] = measured <= error_bound
    return BoundReport(
        N=f2_bound,
        coefficients=magnitudes,
        coeff_bounds=bounds,
        error_bound=error_bound,
        measured_error=measured,
        calibration=calibration,
        violations=violations,
        satisfied=satisfied)


def _block_factor(k):
    return 1.0 / (2.0 ** (5 * (2 ** k - 1) - 2) * 5 * math.log(2))


def _literal_bracket(S):
    return (((S ** 2 - 2 * S) * math.log(S) - S ** 2 * math.log(S - 2)
             + (2 * math.log(S - 2) - 2) * S + 2)
            / (4 * S * (S - 2)))


def _tail_bracket(S):
    """integral from S - 1 to infinity of (x^2 - 1)^-2"""
    return ((2 * S - 2 - (S ** 2 - 2 * S) * math.log(S / (S - 2)))
            / (4 * S * (S - 2)))


def error_estimate(k, S, N, corrected=False):
    """Bound on the weighted L2 error of the truncated expansion

    The literal bracket equals minus the integral-test tail of
    sum 1 / (s^2 - 1)^2, so it is negative for every S > 2 and the literal
    result is nan. ``corrected`` uses the tail itself.

    :param k: Resolution level
    :param S: Order, at least 3
    :param N: Bound on |rho''|
    :param corrected: Use the positive integral-test tail
    :return: float, nan when the radicand is negative
    """
    if k < 0:
        raise ValueError("k must be nonnegative, got {}".format(k))
    if S <= 2:
        raise ValueError("The error estimate needs S > 2, got {}".format(S))
    if N <= 0:
        raise ValueError("N must be positive, got {}".format(N))
    bracket = _tail_bracket(S) if corrected else _literal_bracket(S)
    radicand = N ** 2 * math.pi * _block_factor(k) * bracket
    if radicand < 0:
        logger.warning(
            "Error estimate for k={}, S={} has a negative radicand {}".format(
                k, S, radicand))
        return float("nan")
    return math.sqrt(radicand)


class PowerTail(object):
    """f(theta) = scale * theta^-power"""

    def __init__(self, power, scale=1.0):
        if scale <= 0:
            raise ValueError("scale must be positive, got {}".format(scale))
        self.power = power
        self.scale = scale

    def __call__(self, theta):
        return self.scale * np.asarray(theta, dtype=float) ** -self.power

    def tail_integral(self, h):
        if self.power <= 1:
            raise ValueError(
                "theta^-{} is not integrable at infinity".format(self.power))
        if h <= 0:
            raise ValueError(
                "theta^-{} is not integrable at 0".format(self.power))
        return self.scale * h ** (1 - self.power) / (self.power - 1)


class ExpTail(object):
    """f(theta) = scale * exp(-rate theta)"""

    def __init__(self, rate, scale=1.0):
        if scale <= 0:
            raise ValueError("scale must be positive, got {}".format(scale))
        self.rate = rate
        self.scale = scale

    def __call__(self, theta):
        return self.scale * np.exp(-self.rate * np.asarray(theta, dtype=float))

    def tail_integral(self, h):
        if self.rate <= 0:
            raise ValueError(
                "exp(-{} theta) is not integrable at infinity".format(
                    self.rate))
        return self.scale * math.exp(-self.rate * h) / self.rate


def _check_decreasing(f, h):
    points = h + np.array([0.0, 1.0, 2.0, 4.0, 8.0, 16.0])
    values = np.array([float(f(p)) for p in points])
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("Tail function must be positive on [{}, inf)".format(h))
    if np.any(np.diff(values) > 0):
        raise ValueError("Tail function must be decreasing on [{}, inf)".format(
            h))


def remainder_bound(f, h):
    """integral from h to infinity of f, which bounds sum_{n > h} f(n)

    Closed forms are used for PowerTail and ExpTail, adaptive quadrature
    otherwise.

    :raises ValueError: if f is not positive and decreasing or its tail is
                        not integrable
    """
    if h < 0:
        raise ValueError("h must be nonnegative, got {}".format(h))
    if hasattr(f, "tail_integral"):
        return f.tail_integral(h)
    _check_decreasing(f, h)
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            value, error = scipy.integrate.quad(lambda t: float(f(t)), h,
                                                np.inf, limit=200)
        except scipy.integrate.IntegrationWarning as e:
            raise ValueError("Tail integral from {} does not converge: "
                             "{}".format(h, e))
    if not np.isfinite(value):
        raise ValueError("Tail integral from {} is not finite".format(h))
    logger.debug("Tail integral from {} is {} (+- {})".format(h, value, error))
    return value


def tail_sum(f, h, K):
    """sum_{n = h + 1}^{K} f(n)"""
    return float(sum(float(f(n)) for n in range(h + 1, K + 1)))


def empirical_error(cfg, E, exact, grid_n, length=None):
    """Max error on a uniform grid and weighted L2 error against ``exact``

    :param cfg: BasisConfig
    :param E: Coefficient vector
    :param exact: Exact solution in problem coordinates
    :param grid_n: Number of uniform grid points, at least 2
    :param length: Problem domain length, cfg.l by default
    :return: dict with ``max`` and ``l2w``
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2, got {}".format(grid_n))
    E = as_coefficients(cfg, E)
    length = cfg.l if length is None else length
    scale = length / DOMAIN_LENGTH
    xs = np.linspace(0.0, DOMAIN_LENGTH, grid_n)
    values = basis_matrix(cfg, xs, closed=True) @ E
    exact_values = sample(lambda x: exact(scale * x), xs)
    return {
        "max": float(np.max(np.abs(values - exact_values))),
        "l2w": _weighted_l2(cfg, E, lambda x: exact(scale * x)),
    }


def convergence_sweep(prob, k_list, S_list, opts=None, quad_order=None,
                      timing=True):
    """Solve ``prob`` for every (k, S) and measure the error of each cell

    Cells are ordered by (k, S). A cell whose solve fails is kept with
    ``converged`` False and nan errors.

    :param prob: ProblemSpec, normally with a known exact solution
    :param k_list: Resolution levels
    :param S_list: Orders, each at least 3
    :param opts: NewtonOptions
    :param quad_order: Nodes per subinterval, max(64, 8 S) when None
    :param timing: Record runtime_ms for each cell
    :return: list of SweepRow
    """
    if not k_list or not S_list:
        raise ValueError("The sweep needs at least one k and one S")
    if min(S_list) < MIN_SWEEP_S:
        raise ValueError("Every S must be at least {}, got {}".format(
            MIN_SWEEP_S, min(S_list)))
    opts = NewtonOptions() if opts is None else opts
    rows = []
    for k in sorted(set(k_list)):
        for S in sorted(set(S_list)):
            cfg = BasisConfig(k, S, l=prob.domain_length, quad_order=quad_order)
            bound = None
            if prob.second_derivative_bound:
                bound = error_estimate(k, S, prob.second_derivative_bound,
                                       corrected=True)
            max_error = l2w_error = float("nan")
            converged = True
            with stopwatch() as elapsed:
                try:
                    report = newton_solve(cfg, prob, opts)
                except SolverError as e:
                    converged = False
                    logger.warning("Sweep cell k={}, S={} failed: {}".format(
                        k, S, e))
            if converged and report.errors_vs_exact is not None:
                max_error = report.errors_vs_exact["max"]
                l2w_error = report.errors_vs_exact["l2w"]
            rows.append(SweepRow(k, S, max_error, l2w_error, bound,
                                 elapsed["ms"] if timing else None, converged))
            logger.debug("Sweep cell {}".format(rows[-1]))
    return rows
