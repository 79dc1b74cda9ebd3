"""Tau discretization and Newton solve of rho'' = G(theta, rho, rho', rho(alpha theta))

The unknown is expanded on the canonical interval [0, 2] through
theta = (l / 2) x. The residual is projected onto the first 2^k S - 2 basis
functions and the two supplementary conditions fill the remaining rows.
"""
import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial

from .op_matrices import build_D, build_stretch
from .wavelet_basis import (
    DOMAIN_LENGTH,
    basis_matrix,
    basis_vector,
    project,
    synthesize,
)


logger = logging.getLogger(__name__)

CONDITION_ROWS = 2
MAX_HALVINGS = 30
REPORT_GRID_POINTS = 101
# Jacobians worse conditioned than this are treated as singular
SINGULAR_CONDITION = 1e14
DELAY_MODES = ("pointwise", "stretch")


class SolverError(Exception):
    pass


class NonConvergence(SolverError):
    def __init__(self, message, report=None):
        super(NonConvergence, self).__init__(message)
        self.report = report


class SingularJacobian(SolverError):
    pass


class NonFiniteRhs(SolverError):
    def __init__(self, message, theta=None):
        super(NonFiniteRhs, self).__init__(message)
        self.theta = theta


@dataclass(frozen=True)
class InitialConditions:
    A1: complex = 0.0
    A2: complex = 0.0


@dataclass(frozen=True)
class BoundaryConditions:
    """rho(0) = B1 and rho'(l) = B2"""
    B1: complex = 0.0
    B2: complex = 0.0


@dataclass(frozen=True)
class LogTransform:
    """Solve for z with rho = exp(z). ``rhs`` is the z-equation right-hand
    side when it is known in closed form."""
    rhs: Optional[Callable] = None


@dataclass(frozen=True)
class ProblemSpec:
    """rho'' = rhs(theta, rho, rho', rho(alpha theta)) on [0, domain_length]

    ``rhs`` is called with numpy arrays and may return a scalar for constant
    right-hand sides.
    """
    rhs: Callable
    conditions: Union[InitialConditions, BoundaryConditions]
    alpha: float = 1.0
    domain_length: float = 1.0
    transform: Optional[LogTransform] = None
    exact: Optional[Callable] = None
    linear: bool = False
    second_derivative_bound: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        if not isinstance(self.conditions,
                          (InitialConditions, BoundaryConditions)):
            raise ValueError(
                "conditions must be InitialConditions or BoundaryConditions, "
                "got {!r}".format(self.conditions))
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1], got {}".format(
                self.alpha))
        if not 0 < self.domain_length <= DOMAIN_LENGTH:
            raise ValueError("Domain length must lie in (0, 2], got {}".format(
                self.domain_length))


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 50
    fd_step: float = 1e-7


@dataclass
class SolveReport:
    E: np.ndarray
    residual_norm: float
    newton_iters: int
    condition_residuals: Tuple[float, float]
    max_imag: float
    errors_vs_exact: Optional[Dict[str, float]]
    cfg: object
    problem: ProblemSpec
    transformed: bool = False
    converged: bool = True
    system_norm: float = 0.0

    def evaluate_raw(self, theta):
        """The synthesized expansion (z for log-transformed problems)"""
        return synthesize(self.cfg, self.E, self.cfg.to_canonical(theta),
                          closed=True)

    def evaluate(self, theta):
        values = self.evaluate_raw(theta)
        return np.exp(values) if self.transformed else values

    def grid(self, points=REPORT_GRID_POINTS):
        return np.linspace(0.0, self.problem.domain_length, points)

    def monomial_coefficients(self):
        """Ascending coefficients in theta of the expansion on each block"""
        scale = self.problem.domain_length / DOMAIN_LENGTH
        table = np.asarray(self.cfg.local_coefficients)
        blocks = []
        for h in range(self.cfg.blocks):
            local = self.E[h * self.cfg.S:(h + 1) * self.cfg.S] @ table
            # u = 2^k theta / scale - 2h - 1
            u = Polynomial([-(2 * h + 1), self.cfg.blocks / scale])
            blocks.append(Polynomial(local)(u).coef)
        return blocks


def apply_log_transform(prob):
    """The problem for z = log(rho)

    rho = e^z turns rho'' = G into z'' = e^-z G(theta, e^z, e^z z', e^z(alpha
    theta)) - z'^2 with z(0) = log(A1) and z'(0) = A2 / A1.
    """
    if prob.transform is None:
        raise ValueError("Problem {} does not request a log transform".format(
            prob.name))
    if not isinstance(prob.conditions, InitialConditions):
        raise ValueError(
            "The log transform turns boundary conditions nonlinear and is "
            "only supported for initial value problems")
    A1, A2 = complex(prob.conditions.A1), complex(prob.conditions.A2)
    if A1 == 0:
        raise ValueError("rho(0) = 0 has no logarithm")

    rhs = prob.transform.rhs
    if rhs is None:
        original = prob.rhs

        def rhs(theta, z, dz, z_delay):
            ez = np.exp(z)
            return (np.exp(-z) * original(theta, ez, ez * dz, np.exp(z_delay))
                    - dz ** 2)

    exact = None
    if prob.exact is not None:
        def exact(theta):
            return np.log(np.asarray(prob.exact(theta), dtype=complex))

    return dataclasses.replace(
        prob,
        rhs=rhs,
        conditions=InitialConditions(np.log(A1), A2 / A1),
        transform=None,
        exact=exact,
        linear=False,
        name="{} (log)".format(prob.name))


def problem_projection(cfg, prob, f):
    """Coefficients of a function given in problem coordinates"""
    cfg = cfg.for_length(prob.domain_length)
    scale = prob.domain_length / DOMAIN_LENGTH
    return project(cfg, lambda x: f(scale * x))


def tested_indices(cfg):
    """Flat indices of the test functions: all but the two highest orders
    of every block. With k = 0 these are the first S - 2 functions."""
    return [h * cfg.S + s for h in range(cfg.blocks)
            for s in range(cfg.S - CONDITION_ROWS)]


def interface_rows(cfg, D):
    """Rows r with r E the jump of rho, then of rho', at each interior block
    boundary

    D is block diagonal, so nothing else ties neighbouring blocks together.
    """
    table = np.asarray(cfg.local_coefficients)
    right_end = table.sum(axis=1)
    left_end = table @ (-1.0) ** np.arange(cfg.S)
    rows = []
    for h in range(cfg.blocks - 1):
        jump = np.zeros(cfg.dimension, dtype=complex)
        jump[h * cfg.S:(h + 1) * cfg.S] = right_end
        jump[(h + 1) * cfg.S:(h + 2) * cfg.S] = -left_end
        rows.extend([jump, D @ jump])
    return np.array(rows, dtype=complex).reshape(-1, cfg.dimension)


class _TauSystem(object):
    """Everything about a (cfg, problem) pair that does not depend on E"""

    def __init__(self, cfg, prob, delay="pointwise"):
        if delay not in DELAY_MODES:
            raise ValueError("Unknown delay evaluation {}".format(delay))
        self.cfg = cfg.for_length(prob.domain_length)
        if self.cfg.dimension < CONDITION_ROWS + 1 or self.cfg.S < 2:
            raise ValueError(
                "The tau system needs 2^k S >= 3 and S >= 2, got k={}, "
                "S={}".format(self.cfg.k, self.cfg.S))
        self.prob = prob
        self.scale = prob.domain_length / DOMAIN_LENGTH
        self.nodes, self.weights = self.cfg.quadrature
        self.theta = self.scale * self.nodes

        D = build_D(self.cfg).entries
        psi = basis_matrix(self.cfg, self.nodes)
        self.psi = psi
        self.dpsi = psi @ D.T
        self.d2psi = psi @ (D @ D).T
        if delay == "pointwise":
            self.delay_psi = basis_matrix(self.cfg, prob.alpha * self.nodes)
        else:
            self.delay_psi = psi @ build_stretch(self.cfg, prob.alpha).entries.T
        self.test = (np.conj(psi[:, tested_indices(self.cfg)])
                     * self.weights[:, None])
        self.interface = interface_rows(self.cfg, D)

        left = basis_vector(self.cfg, 0.0)
        if isinstance(prob.conditions, InitialConditions):
            self.value_row, self.slope_row = left, D @ left
            self.targets = (prob.conditions.A1, prob.conditions.A2)
        else:
            right = basis_vector(self.cfg, DOMAIN_LENGTH, closed=True)
            self.value_row, self.slope_row = left, D @ right
            self.targets = (prob.conditions.B1, prob.conditions.B2)

    def residual(self, E):
        """rho'' - G at the quadrature nodes, in problem units"""
        rho = self.psi @ E
        slope = (self.dpsi @ E) / self.scale
        curvature = (self.d2psi @ E) / self.scale ** 2
        with np.errstate(all="ignore"):
            g = np.asarray(
                self.prob.rhs(self.theta, rho, slope, self.delay_psi @ E),
                dtype=complex)
        g = np.broadcast_to(g, self.theta.shape)
        bad = ~np.isfinite(g)
        if np.any(bad):
            theta = float(self.theta[np.argmax(bad)])
            raise NonFiniteRhs(
                "Right-hand side of {} is not finite at theta = {}".format(
                    self.prob.name, theta),
                theta=theta)
        return curvature - g

    def tau_equations(self, E):
        return np.concatenate(
            (self.test.T @ self.residual(E), self.interface @ E))

    def condition_rows(self, E):
        return (self.value_row @ E - self.targets[0],
                (self.slope_row @ E) / self.scale - self.targets[1])

    def equations(self, E):
        return np.concatenate(
            (self.tau_equations(E), np.array(self.condition_rows(E))))

    def jacobian(self, E, F, fd_step):
        J = np.empty((F.size, E.size), dtype=complex)
        for j in range(E.size):
            # forward differences with a unit step are exact for affine maps
            step = 1.0 if self.prob.linear else fd_step * (1 + abs(E[j]))
            shifted = E.copy()
            shifted[j] += step
            J[:, j] = (self.equations(shifted) - F) / step
        return J

    def residual_norm(self, E):
        return float(np.sqrt(np.sum(np.abs(self.residual(E)) ** 2
                                    * self.weights)))


def assemble_tau_equations(cfg, prob, E, delay="pointwise"):
    """The 2^k S - 2 residual equations

    These are the projections <R, phi_j> of
    R = E^T D^2 Psi - G(theta, E^T Psi, E^T D Psi, E^T Psi(alpha theta))
    onto tested_indices, followed by the interface_rows applied to E.
    """
    system = _TauSystem(cfg, prob, delay=delay)
    return system.tau_equations(np.asarray(E, dtype=complex))


def condition_rows(cfg, prob, E):
    """Initial: (rho(0) - A1, rho'(0) - A2); boundary: (rho(0) - B1,
    rho'(l) - B2)"""
    system = _TauSystem(cfg, prob)
    return system.condition_rows(np.asarray(E, dtype=complex))


def _newton_step(J, F):
    condition = np.linalg.cond(J)
    if not np.isfinite(condition) or condition > SINGULAR_CONDITION:
        raise SingularJacobian(
            "Jacobian is singular (condition number {:.3g}); try a different "
            "S or initial guess".format(condition))
    return scipy.linalg.solve(J, -F)


def _build_report(system, original, E, iterations, converged, transformed):
    report = SolveReport(
        E=E,
        residual_norm=system.residual_norm(E),
        newton_iters=iterations,
        condition_residuals=tuple(
            float(abs(x)) for x in system.condition_rows(E)),
        max_imag=0.0,
        errors_vs_exact=None,
        cfg=system.cfg,
        problem=original,
        transformed=transformed,
        converged=converged,
        system_norm=float(np.max(np.abs(system.equations(E)))))
    grid = report.grid()
    values = report.evaluate(grid)
    report.max_imag = float(np.max(np.abs(np.imag(values))))
    if original.exact is not None:
        exact = np.asarray(original.exact(grid), dtype=complex)
        node_error = (report.evaluate(system.theta)
                      - np.asarray(original.exact(system.theta), dtype=complex))
        report.errors_vs_exact = {
            "max": float(np.max(np.abs(values - exact))),
            "l2w": float(np.sqrt(np.sum(np.abs(node_error) ** 2
                                       * system.weights))),
        }
    return report


def newton_solve(cfg, prob, opts=None, delay="pointwise", initial=None):
    """Solve the stacked tau and condition equations by damped Newton

    :param cfg: BasisConfig; its domain length is replaced by the problem's
    :param prob: ProblemSpec, log-transformed first when it asks for it
    :param opts: NewtonOptions
    :param delay: "pointwise" evaluates Psi(alpha theta) at the nodes,
                  "stretch" goes through the P_alpha matrix
    :param initial: Starting coefficients, zero by default
    :return: SolveReport
    :raises NonConvergence: after max_iter iterations or when no damping
                            reduces the residual; ``report`` holds the best
                            iterate
    :raises SingularJacobian: when the Newton matrix cannot be inverted
    """
    opts = NewtonOptions() if opts is None else opts
    transformed = prob.transform is not None
    solved = apply_log_transform(prob) if transformed else prob
    system = _TauSystem(cfg, solved, delay=delay)

    E = (np.zeros(system.cfg.dimension, dtype=complex) if initial is None
         else np.array(initial, dtype=complex))
    F = system.equations(E)
    norm = float(np.max(np.abs(F)))
    iterations = 0
    logger.debug("Solving {} with k={}, S={}: initial |F| = {}".format(
        solved.name, system.cfg.k, system.cfg.S, norm))

    while norm > opts.tol:
        if iterations >= opts.max_iter:
            raise NonConvergence(
                "No convergence after {} iterations, |F| = {:.3g}".format(
                    iterations, norm),
                report=_build_report(system, prob, E, iterations, False,
                                     transformed))
        delta = _newton_step(system.jacobian(E, F, opts.fd_step), F)
        damping = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = E + damping * delta
            try:
                trial_F = system.equations(trial)
            except NonFiniteRhs as e:
                logger.debug("Rejected step with damping {}: {}".format(
                    damping, e))
            else:
                trial_norm = float(np.max(np.abs(trial_F)))
                if trial_norm < norm:
                    break
            damping /= 2.0
        else:
            raise NonConvergence(
                "Damped Newton step failed to reduce |F| = {:.3g}".format(norm),
                report=_build_report(system, prob, E, iterations, False,
                                     transformed))
        E, F, norm = trial, trial_F, trial_norm
        iterations += 1
        logger.debug("Newton iteration {}: |F| = {} (damping {})".format(
            iterations, norm, damping))

    return _build_report(system, prob, E, iterations, True, transformed)
