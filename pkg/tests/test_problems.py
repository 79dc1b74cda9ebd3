import os.path

import numpy as np
import pytest
import sympy as sp

from lucas_wavelet import problems, tau_solver
from lucas_wavelet.problems import DRHO, RHO, THETA, ProblemFileError
from lucas_wavelet.wavelet_basis import BasisConfig


PROBLEM_DIR = os.path.join(os.path.dirname(__file__), "problems")

COSINE = """\
conditions = initial
A1 = 1
A2 = 0
rhs = -rho
"""


@pytest.mark.parametrize("name", sorted(problems.BUILTIN_PROBLEMS))
def test_builtins_parse(name):
    prob = problems.builtin_problem(name)
    assert prob.name == name
    assert prob.exact is not None
    assert prob.second_derivative_bound > 0


def test_builtin_attributes():
    pantograph = problems.builtin_problem("pantograph-2")
    assert pantograph.alpha == 0.5
    assert pantograph.linear
    assert pantograph.transform is None
    lane_emden = problems.builtin_problem("lane-emden-1")
    assert not lane_emden.linear
    assert lane_emden.transform is not None
    assert lane_emden.conditions == tau_solver.InitialConditions(1, 0)


def test_unknown_builtin():
    with pytest.raises(ValueError) as excinfo:
        problems.builtin_problem("blasius")
    assert "pantograph-2" in str(excinfo.value)


def test_problem_file_matches_builtin():
    path = os.path.join(PROBLEM_DIR, "pantograph.txt")
    from_file = problems.load_problem(path)
    assert from_file.name == "pantograph"
    builtin = problems.load_problem("pantograph-2")
    cfg = BasisConfig(0, 3)
    assert np.allclose(tau_solver.newton_solve(cfg, from_file).E,
                       tau_solver.newton_solve(cfg, builtin).E, atol=1e-12)


def test_missing_key_is_named():
    path = os.path.join(PROBLEM_DIR, "missing_a2.txt")
    with pytest.raises(ProblemFileError) as excinfo:
        problems.parse_problem_file(path)
    assert "A2" in str(excinfo.value)
    assert excinfo.value.source == path


@pytest.mark.parametrize("text, line, message", [
    (COSINE + "beta = 2\n", 5, "Unknown key beta"),
    (COSINE + "A1 = 2\n", 5, "Duplicate key A1"),
    (COSINE + "order = 3\n", 5, "second order"),
    ("A1 = 1\nA2 = 0\nrhs = rho +* 2\n", 3, "Cannot parse"),
    ("A1 = 1\nA2 = 0\nrhs = tan(rho)\n", 3, "Unsupported function"),
    ("A1 = 1\nA2 = 0\nrhs = y*rho\n", 3, "Unknown name"),
    ("A1 = 1\nA2 = zero\nrhs = rho\n", 2, "A2 must be a number"),
    ("A1 = 1\nA2 = 0\nrhs\n", 3, "key = value"),
    ("conditions = boundary\nB1 = 0\nB2 = 1\nrhs = 2\ntransform = log\n",
     5, "log transform"),
    ("conditions = boundary\nA1 = 0\nB1 = 0\nB2 = 1\nrhs = 2\n", 2,
     "does not apply"),
    (COSINE + "transform = square\n", 5, "transform must be"),
    (COSINE + "alpha = 1j\n", 5, "must be real"),
])
def test_problem_file_errors(text, line, message):
    with pytest.raises(ProblemFileError) as excinfo:
        problems.parse_problem_text(text, source="bad.txt")
    assert excinfo.value.line == line
    assert message in str(excinfo.value)
    assert str(excinfo.value).startswith("bad.txt:{}: ".format(line))


def test_python_code_is_not_evaluated(tmp_path):
    marker = tmp_path / "marker"
    text = ("A1 = 1\nA2 = 0\nrhs = __import__('pathlib').Path({!r}).touch() "
            "or rho\n".format(str(marker)))
    with pytest.raises(ProblemFileError) as excinfo:
        problems.parse_problem_text(text, source="bad.txt")
    assert excinfo.value.line == 3
    assert not marker.exists()


@pytest.mark.parametrize("text", [
    "x.func",
    "().__class__",
    "rho.__class__.__bases__",
    "sqrt(rho)",
    "pi*rho",
    "E*rho",
    "lambda: rho",
    "rho!",
    "[rho]",
    "rho; rho",
    "'rho'",
    "()",
])
def test_expression_grammar_is_closed(text):
    with pytest.raises(ValueError):
        problems.parse_expression(text)


def test_expression_grammar_accepts_numbers():
    assert float(problems.parse_expression("1.5e2 + .5", symbols=())) == \
        150.5
    assert problems.parse_expression("2**3 + 2^3", symbols=()) == 16
    assert problems.parse_expression("1j", symbols=()) == sp.I


def test_invalid_alpha_is_reported():
    with pytest.raises(ProblemFileError) as excinfo:
        problems.parse_problem_text(COSINE + "alpha = 2\n", source="bad.txt")
    assert "alpha" in str(excinfo.value)


def test_comments_and_blank_lines():
    text = "# a comment\n\nA1 = 1  # rho(0)\n   \nA2 = 0\nrhs = -rho # G\n"
    prob = problems.parse_problem_text(text)
    assert prob.conditions == tau_solver.InitialConditions(1, 0)
    assert prob.rhs(0.5, 2.0, 0.0, 0.0) == -2.0


def test_boundary_conditions():
    prob = problems.parse_problem_text(
        "conditions = boundary\nB1 = 1\nB2 = 4\nl = 2\nrhs = 2\n"
        "exact = x^2 + 1\n")
    assert prob.conditions == tau_solver.BoundaryConditions(1, 4)
    report = tau_solver.newton_solve(BasisConfig(0, 3), prob)
    assert report.errors_vs_exact["max"] <= 1e-10


def test_complex_condition_values():
    prob = problems.parse_problem_text("A1 = 1 + 2*I\nA2 = 0\nrhs = -rho\n")
    assert prob.conditions.A1 == 1 + 2j


def test_parse_expression():
    expr = problems.parse_expression("x^2 + sin(rho) * drho")
    assert sp.simplify(expr - (THETA ** 2 + sp.sin(RHO) * DRHO)) == 0
    with pytest.raises(ValueError):
        problems.parse_expression("rho", symbols=(THETA,))


@pytest.mark.parametrize("text, linear", [
    ("(3/4)*rho + rho_delay - x^2 + 2", True),
    ("-(6/x)*drho - 14*rho", True),
    ("sin(x)*rho + exp(x)", True),
    ("rho^2", False),
    ("rho*drho", False),
    ("-4*rho*log(rho)", False),
])
def test_is_linear(text, linear):
    assert problems.is_linear(problems.parse_expression(text)) == linear


def test_log_transform_expression():
    rhs = problems.parse_expression("-(6/x)*drho - 14*rho - 4*rho*log(rho)")
    z_rhs = problems.log_transform_expression(rhs)
    expected = -6 * DRHO / THETA - 14 - 4 * RHO - DRHO ** 2
    assert sp.simplify(z_rhs - expected) == 0


def test_compiled_rhs_broadcasts():
    rhs = problems.compile_rhs(problems.parse_expression("x + rho"))
    values = rhs(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 0.0, 0.0)
    assert np.allclose(values, [1.0, 3.0])
    exact = problems.compile_exact(problems.parse_expression(
        "2", symbols=(THETA,)))
    assert exact(np.zeros(4)).shape == (4,)


def test_singular_rhs_is_reported_at_solve_time():
    prob = problems.parse_problem_text("A1 = 0\nA2 = 0\nrhs = log(rho)\n")
    with pytest.raises(tau_solver.NonFiniteRhs):
        tau_solver.newton_solve(BasisConfig(0, 3), prob)
