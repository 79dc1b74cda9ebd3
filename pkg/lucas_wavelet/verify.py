"""Property suites run by ``lucaswave verify``"""
import logging
import math
import warnings
from collections import OrderedDict
from typing import NamedTuple

import numpy as np

from . import lucas_poly
from .analysis import (
    ExpTail,
    PowerTail,
    coeff_bound,
    decay_audit,
    error_estimate,
    remainder_bound,
    tail_sum,
)
from .op_matrices import (
    build_D,
    build_product_matrix,
    build_product_tensor,
    build_stretch,
    derivative_block,
    expected_block_magnitudes,
    transform_coefficients,
)
from .problems import builtin_problem
from .tau_solver import newton_solve, problem_projection
from .utils import QuadratureWarning
from .wavelet_basis import (
    BasisConfig,
    basis_derivative_matrix,
    basis_matrix,
    gram_matrix,
    project,
)


logger = logging.getLogger(__name__)

DEFAULT_K = (0, 1)
DEFAULT_S = tuple(range(1, 9))
INTERIOR_POINTS = 200
TAIL_TERMS = 200

# |t| (|theta| + |t|) = 0.24 < 1, inside the disc where the series converges
GENERATING_THETA = 0.5
GENERATING_T = 0.3

SHIFTED_LIST = {
    0: (2,),
    1: (-2j, 2),
    2: (-2, -8j, 4),
    3: (2j, -18, -24j, 8),
}


class SuiteResult(NamedTuple):
    name: str
    passed: bool
    detail: str


class CheckFailed(Exception):
    pass


def _check(condition, message, *args):
    if not condition:
        raise CheckFailed(message.format(*args))


def _config(k, S, quad_order=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureWarning)
        return BasisConfig(k, S, quad_order=quad_order)


def polynomial_suite(options):
    points = np.array([0.3, -1.2, 0.5 + 0.7j, 0.8j, -1.5 - 0.4j])
    for s in range(13):
        recurrence = lucas_poly.lucas_eval_recurrence(s, points)
        closed = lucas_poly.lucas_eval_closed(s, points)
        error = np.max(np.abs(recurrence - closed)
                       / np.maximum(1.0, np.abs(recurrence)))
        _check(error <= 1e-10, "closed form differs at s={}: {}", s, error)
        residual = np.max(np.abs(lucas_poly.lucas_ode_residual(s, points)))
        _check(residual <= 1e-9, "ODE residual at s={}: {}", s, residual)
        bridge = lucas_poly.chebyshev_bridge(s, np.linspace(-1, 1, 21))
        _check(bridge <= 1e-10, "Chebyshev bridge at s={}: {}", s, bridge)
    for s in range(1, 11):
        zeros = lucas_poly.lucas_zeros(s)
        value = np.max(np.abs(lucas_poly.lucas_eval_recurrence(s, zeros)))
        _check(value <= 1e-8, "L*_{} does not vanish at its zeros: {}", s, value)
    for s in range(6):
        real_points = np.real(points[:2])
        expected = lucas_poly.lucas_eval_recurrence(s, real_points)
        rodrigues = lucas_poly.rodrigues_eval(s, real_points)
        error = np.max(np.abs(rodrigues - expected)
                       / np.maximum(1.0, np.abs(expected)))
        _check(error <= 1e-8, "Rodrigues formula at s={}: {}", s, error)
    for s in range(1, 9):
        for theta in (-0.7, 0.2, 1.1):
            error = lucas_poly.hyperbolic_check(s, theta)
            _check(error <= 1e-9, "hyperbolic form at s={}, theta={}: {}",
                   s, theta, error)
    previous = None
    for terms in (10, 20, 40):
        error = lucas_poly.generating_check(GENERATING_THETA, GENERATING_T,
                                            terms)
        _check(previous is None or error <= previous,
               "generating series does not converge: {} terms give {}",
               terms, error)
        previous = error
    _check(previous <= 1e-10, "generating series error {}", previous)
    for m in range(7):
        for n in range(m + 1):
            deviation = lucas_poly.product_expand(m, n)
            _check(deviation == 0, "product identity fails for ({}, {})", m, n)
    for s, expected in SHIFTED_LIST.items():
        coeffs = tuple(complex(c) for c in
                       lucas_poly.shifted_coefficients(s).coeffs)
        _check(coeffs == tuple(complex(c) for c in expected),
               "Q*_{} has coefficients {}", s, coeffs)
    for s in range(6):
        for h in range(6):
            value = lucas_poly.shifted_orthogonality(s, h)
            target = math.pi * lucas_poly.alpha_weight(s) / 2 if s == h else 0
            _check(abs(value - target) <= 1e-10,
                   "<Q*_{}, Q*_{}> = {}", s, h, value)
    return "13 orders checked"


def gram_suite(options):
    worst = 0.0
    for k in options["k_list"]:
        for S in options["S_list"]:
            cfg = _config(k, S, options["quad_order"])
            _check(cfg.quad_order >= 8 * S,
                   "quad_order {} is below 8 S = {} for k={}, S={}",
                   cfg.quad_order, 8 * S, k, S)
            error = np.max(np.abs(gram_matrix(cfg) - np.eye(cfg.dimension)))
            _check(error <= 1e-10, "|Gram - I| = {} for k={}, S={}",
                   error, k, S)
            worst = max(worst, error)
    return "max |Gram - I| = {:.3g}".format(worst)


def differentiation_suite(options):
    xs = (np.arange(INTERIOR_POINTS) + 0.5) * 2.0 / INTERIOR_POINTS
    worst = 0.0
    for k in options["k_list"]:
        for S in options["S_list"]:
            cfg = _config(k, S, options["quad_order"])
            D = build_D(cfg).entries
            error = np.max(np.abs(basis_derivative_matrix(cfg, xs)
                                  - basis_matrix(cfg, xs) @ D.T))
            _check(error <= 1e-9, "|Psi' - D Psi| = {} for k={}, S={}",
                   error, k, S)
            expected = expected_block_magnitudes(cfg)
            deviation = np.max(np.abs(np.abs(derivative_block(cfg)) - expected)
                               / np.maximum(1.0, expected))
            _check(deviation <= 1e-12,
                   "D block magnitudes off by {} for k={}, S={}",
                   deviation, k, S)
            nilpotent = np.max(np.abs(np.linalg.matrix_power(D, S)))
            _check(nilpotent <= 1e-12, "|D^S| = {} for k={}, S={}",
                   nilpotent, k, S)
            worst = max(worst, error)
    return "max |Psi' - D Psi| = {:.3g}".format(worst)


def product_suite(options):
    for k in options["k_list"]:
        for S in options["S_list"]:
            if S < 3:
                continue
            cfg = _config(k, S, options["quad_order"])
            E = project(cfg, lambda x: x)
            product = build_product_matrix(build_product_tensor(cfg), E)
            error = np.max(np.abs(product.entries.T @ E
                                  - project(cfg, lambda x: x ** 2)))
            _check(error <= 1e-9, "product reconstruction {} for k={}, S={}",
                   error, k, S)
            identity = np.max(np.abs(build_stretch(cfg, 1.0).entries
                                     - np.eye(cfg.dimension)))
            _check(identity <= 1e-10, "|P_1 - I| = {} for k={}, S={}",
                   identity, k, S)
            stretched = transform_coefficients(
                cfg, build_stretch(cfg, 0.5), project(cfg, lambda x: x ** 2))
            error = np.max(np.abs(stretched
                                  - project(cfg, lambda x: 0.25 * x ** 2)))
            _check(error <= 1e-9, "stretch of x^2 off by {} for k={}, S={}",
                   error, k, S)
    return "product and stretch reconstructions exact"


def bounds_suite(options):
    _check(abs(coeff_bound(0, 2, 1) - 2 * math.sqrt(math.pi) / 3) <= 1e-12,
           "coeff_bound(0, 2, 1) = {}", coeff_bound(0, 2, 1))
    _check(abs(coeff_bound(0, 1, 1, 1) - math.sqrt(math.pi)) <= 1e-12,
           "coeff_bound(0, 1, 1, 1) = {}", coeff_bound(0, 1, 1, 1))
    for tail, start in ((PowerTail(2), 1), (PowerTail(5), 1), (ExpTail(1), 0),
                        (ExpTail(0.5), 2)):
        bound = remainder_bound(tail, start)
        partial = tail_sum(tail, start, TAIL_TERMS)
        _check(partial <= bound, "tail sum {} exceeds bound {}", partial, bound)
    _check(math.isnan(error_estimate(0, 3, 1)),
           "literal error estimate at S=3 should be flagged")
    estimates = [error_estimate(k, 6, 1, corrected=True) for k in range(4)]
    _check(all(np.isfinite(estimates)) and
           all(a > b for a, b in zip(estimates, estimates[1:])),
           "corrected error estimate not decreasing in k: {}", estimates)
    audits = (
        (np.sin, 1.0, 1.0),
        (lambda x: np.exp(-x ** 2), 2.0, 1.0),
        (lambda x: x ** 3 / 6, 2.0, 2.0),
    )
    for k in options["k_list"]:
        for S in options["S_list"]:
            cfg = _config(k, S, options["quad_order"])
            for f, f2_bound, f1_bound in audits:
                report = decay_audit(cfg, f, f2_bound, f1_bound)
                _check(not report.violations,
                       "coefficient bound violated at {} for k={}, S={}",
                       report.violations, k, S)
    return "bounds hold on the test family"


def problem_suite(options):
    quad_order = options["quad_order"]
    pantograph = builtin_problem("pantograph-2")
    report = newton_solve(_config(0, 3, quad_order), pantograph)
    _check(report.errors_vs_exact["max"] <= 1e-10 and report.newton_iters <= 2,
           "pantograph-2: error {}, {} iterations",
           report.errors_vs_exact["max"], report.newton_iters)
    stretched = newton_solve(_config(0, 3, quad_order), pantograph,
                             delay="stretch")
    difference = np.max(np.abs(stretched.E - report.E))
    _check(difference <= 1e-9, "stretch and pointwise delay differ by {}",
           difference)

    lane_emden = builtin_problem("lane-emden-1")
    cfg = _config(0, 3, quad_order)
    report = newton_solve(cfg, lane_emden)
    z_error = np.max(np.abs(report.E - problem_projection(
        cfg, lane_emden, lambda theta: -theta ** 2)))
    _check(report.errors_vs_exact["max"] <= 1e-8 and report.newton_iters <= 10,
           "lane-emden-1: error {}, {} iterations",
           report.errors_vs_exact["max"], report.newton_iters)
    _check(z_error <= 1e-8, "lane-emden-1: z coefficients off by {}", z_error)

    cosine = builtin_problem("cosine")
    coarse, fine = [
        newton_solve(_config(0, S, quad_order), cosine).errors_vs_exact["max"]
        for S in (4, 8)]
    _check(fine * 10 <= coarse, "cosine error {} at S=4 and {} at S=8",
           coarse, fine)
    return "worked problems reproduced"


SUITES = OrderedDict([
    ("polynomials", polynomial_suite),
    ("gram", gram_suite),
    ("differentiation", differentiation_suite),
    ("products", product_suite),
    ("bounds", bounds_suite),
    ("problems", problem_suite),
])


def run_suites(k_list=DEFAULT_K, S_list=DEFAULT_S, quad_order=None,
               names=None):
    """Run the named suites (all by default) and return their SuiteResults

    A failing check or an unexpected exception fails only its own suite.
    """
    options = {"k_list": list(k_list), "S_list": list(S_list),
               "quad_order": quad_order}
    results = []
    for name in names or SUITES:
        try:
            detail = SUITES[name](options)
            passed = True
        except CheckFailed as e:
            passed, detail = False, str(e)
        except Exception as e:
            logger.debug("Suite {} raised".format(name), exc_info=True)
            passed, detail = False, "{}: {}".format(type(e).__name__, e)
        logger.debug("Suite {}: {} ({})".format(name, passed, detail))
        results.append(SuiteResult(name, passed, detail))
    return results
