import math

import numpy as np
import pytest

from lucas_wavelet import analysis
from lucas_wavelet.analysis import ExpTail, PowerTail
from lucas_wavelet.problems import builtin_problem
from lucas_wavelet.tau_solver import InitialConditions, ProblemSpec
from lucas_wavelet.wavelet_basis import BasisConfig, project, synthesize


def test_coeff_bound_values():
    assert analysis.coeff_bound(0, 2, 1) == pytest.approx(
        2 * math.sqrt(math.pi) / 3, abs=1e-12)
    assert analysis.coeff_bound(0, 2, 1) == pytest.approx(1.18164, abs=1e-5)
    assert analysis.coeff_bound(1, 3, 1) == pytest.approx(
        2 * math.sqrt(math.pi) / (2 ** 2.5 * 8), abs=1e-12)
    assert analysis.coeff_bound(1, 3, 1) == pytest.approx(0.07834, abs=1e-5)
    assert analysis.coeff_bound(0, 1, 1, 1) == pytest.approx(
        math.sqrt(math.pi), abs=1e-12)


def test_coeff_bound_is_decreasing():
    for h in range(4):
        values = [analysis.coeff_bound(h, s, 1) for s in range(2, 10)]
        assert values == sorted(values, reverse=True)
    for s in range(2, 6):
        values = [analysis.coeff_bound(h, s, 1) for h in range(6)]
        assert values == sorted(values, reverse=True)


def test_coeff_bound_scales_with_N():
    assert analysis.coeff_bound(2, 4, 3) == pytest.approx(
        3 * analysis.coeff_bound(2, 4, 1))


@pytest.mark.parametrize("args", [(0, 0, 1), (-1, 2, 1), (0, 2, 0),
                                  (0, 1, 1, -1)])
def test_coeff_bound_rejects(args):
    with pytest.raises(ValueError):
        analysis.coeff_bound(*args)


@pytest.mark.parametrize("tail, h, expected", [
    (PowerTail(2), 1, 1.0),
    (ExpTail(1), 0, 1.0),
    (PowerTail(5), 1, 0.25),
    (PowerTail(3, scale=2.0), 2, 0.25),
])
def test_remainder_closed_forms(tail, h, expected):
    assert analysis.remainder_bound(tail, h) == pytest.approx(expected)


def test_remainder_by_quadrature():
    bound = analysis.remainder_bound(lambda t: 1.0 / (1.0 + t) ** 2, 0)
    assert bound == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("tail, h", [
    (PowerTail(2), 1),
    (PowerTail(3), 2),
    (PowerTail(1.5), 1),
    (ExpTail(1), 0),
    (ExpTail(0.2), 3),
    (lambda t: math.exp(-t) / (1 + t), 0),
])
def test_remainder_dominates_tail_sums(tail, h):
    bound = analysis.remainder_bound(tail, h)
    for K in (h + 1, h + 10, h + 100, h + 1000):
        assert analysis.tail_sum(tail, h, K) <= bound


def test_known_tail_sums():
    assert analysis.tail_sum(PowerTail(2), 1, 100000) == pytest.approx(
        math.pi ** 2 / 6 - 1, abs=1e-4)
    assert analysis.tail_sum(ExpTail(1), 0, 200) == pytest.approx(
        1 / (math.e - 1))


@pytest.mark.parametrize("tail, h", [
    (PowerTail(1), 1),
    (PowerTail(0.5), 1),
    (PowerTail(2), 0),
    (ExpTail(0), 0),
    (lambda t: t + 1.0, 0),
    (lambda t: -1.0 / (1 + t) ** 2, 0),
])
def test_remainder_rejects(tail, h):
    with pytest.raises(ValueError):
        analysis.remainder_bound(tail, h)


def test_literal_error_estimate_is_flagged():
    assert math.isnan(analysis.error_estimate(0, 3, 1))
    assert math.isnan(analysis.error_estimate(0, 6, 1))


def test_literal_bracket_is_negated_tail():
    for S in range(3, 12):
        assert analysis._literal_bracket(S) == pytest.approx(
            -analysis._tail_bracket(S))


def test_tail_bracket_is_the_integral():
    for S in (3, 6, 10):
        expected = analysis.remainder_bound(
            lambda t: 1.0 / (t ** 2 - 1) ** 2, S - 1)
        assert analysis._tail_bracket(S) == pytest.approx(expected, rel=1e-7)


def test_corrected_error_estimate():
    by_k = [analysis.error_estimate(k, 6, 1, corrected=True) for k in range(4)]
    assert all(np.isfinite(by_k))
    assert by_k == sorted(by_k, reverse=True)
    by_S = [analysis.error_estimate(0, S, 1, corrected=True)
            for S in range(3, 12)]
    assert all(value > 0 for value in by_S)
    assert by_S == sorted(by_S, reverse=True)
    assert analysis.error_estimate(1, 5, 2, corrected=True) == pytest.approx(
        2 * analysis.error_estimate(1, 5, 1, corrected=True))


@pytest.mark.parametrize("args", [(0, 2, 1), (0, 1, 1), (-1, 4, 1),
                                  (0, 4, 0)])
def test_error_estimate_rejects(args):
    with pytest.raises(ValueError):
        analysis.error_estimate(*args)


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("S", [2, 5, 8])
@pytest.mark.parametrize("f, f2_bound, f1_bound", [
    (np.sin, 1.0, 1.0),
    (lambda x: np.exp(-x ** 2), 2.0, 1.0),
    (lambda x: x ** 3 / 6, 2.0, 2.0),
])
def test_decay_audit_has_no_violations(k, S, f, f2_bound, f1_bound):
    report = analysis.decay_audit(BasisConfig(k, S), f, f2_bound, f1_bound)
    assert report.violations == []
    assert report.satisfied["coefficients"]
    assert np.all(np.isnan(report.coeff_bounds[:, 0]))


def test_decay_audit_of_constant():
    report = analysis.decay_audit(BasisConfig(0, 6), lambda x: 3.0, 1.0, 0.0)
    assert np.max(report.coefficients[:, 1:]) <= 1e-12
    assert report.measured_error <= 1e-12


def test_decay_audit_of_quadratic():
    report = analysis.decay_audit(BasisConfig(0, 6), lambda x: x ** 2, 2.0,
                                  4.0)
    assert np.max(report.coefficients[:, 3:]) <= 1e-12
    assert not report.violations


def test_decay_audit_reports_error_bound():
    report = analysis.decay_audit(BasisConfig(0, 8), np.sin, 1.0, 1.0)
    assert report.error_bound == pytest.approx(
        analysis.error_estimate(0, 8, 1.0, corrected=True))
    assert report.satisfied["error"]
    assert analysis.decay_audit(BasisConfig(0, 2), np.sin, 1.0,
                                1.0).error_bound is None


def test_decay_audit_reports_violations():
    report = analysis.decay_audit(BasisConfig(0, 4), np.sin, 1.0, 1.0,
                                  calibration=1e-6)
    assert report.violations
    assert not report.satisfied["coefficients"]


def test_empirical_error_of_own_expansion():
    cfg = BasisConfig(1, 4)
    E = project(cfg, np.cos)
    errors = analysis.empirical_error(
        cfg, E, lambda t: synthesize(cfg, E, t, closed=True), 21)
    assert errors["max"] <= 1e-12
    assert errors["l2w"] <= 1e-12


def test_empirical_error_of_polynomial():
    cfg = BasisConfig(0, 4)
    E = project(cfg, lambda x: x ** 3)
    errors = analysis.empirical_error(cfg, E, lambda t: t ** 3, 11)
    assert errors["max"] <= 1e-12
    errors = analysis.empirical_error(cfg, E, lambda t: t ** 3 + 1, 11)
    assert errors["max"] == pytest.approx(1.0)


def test_empirical_error_needs_two_points():
    cfg = BasisConfig(0, 3)
    with pytest.raises(ValueError):
        analysis.empirical_error(cfg, np.zeros(3), np.sin, 1)


def test_pantograph_sweep():
    rows = analysis.convergence_sweep(builtin_problem("pantograph-2"), [0],
                                      [5, 3, 4])
    assert [(row.k, row.S) for row in rows] == [(0, 3), (0, 4), (0, 5)]
    for row in rows:
        assert row.converged
        assert row.max_error <= 1e-10
        assert row.bound > 0
        assert row.runtime_ms >= 0


def test_lane_emden_sweep():
    rows = analysis.convergence_sweep(builtin_problem("lane-emden-1"), [0],
                                      range(3, 6))
    assert all(row.converged for row in rows)
    assert max(row.max_error for row in rows) <= 1e-8


def test_cosine_sweep_converges():
    rows = analysis.convergence_sweep(builtin_problem("cosine"), [0],
                                      [4, 6, 8], timing=False)
    errors = [row.max_error for row in rows]
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] * 10 <= errors[0]
    assert all(row.runtime_ms is None for row in rows)


def test_sweep_keeps_failed_cells():
    prob = ProblemSpec(rhs=lambda t, rho, drho, delay: np.log(rho),
                       conditions=InitialConditions(0, 0),
                       exact=lambda t: t)
    rows = analysis.convergence_sweep(prob, [0], [3, 4])
    assert len(rows) == 2
    assert not any(row.converged for row in rows)
    assert all(math.isnan(row.max_error) for row in rows)
    assert all(row.bound is None for row in rows)


@pytest.mark.parametrize("k_list, S_list", [([], [3]), ([0], []), ([0], [2, 3])])
def test_sweep_rejects(k_list, S_list):
    with pytest.raises(ValueError):
        analysis.convergence_sweep(builtin_problem("cosine"), k_list, S_list)
