"""Built-in problems and the line-oriented problem file format

A problem file holds ``key = value`` lines; ``#`` starts a comment::

    order = 2
    alpha = 0.5
    l = 1
    conditions = initial
    A1 = 0
    A2 = 0
    rhs = (3/4)*rho + rho_delay - x^2 + 2
    exact = x^2

``rhs`` may use x (the independent variable), rho, drho (rho'), rho_delay
(rho(alpha x)), the operators + - * / ^, parentheses and the functions sin,
cos, exp and log.
"""
import logging
import os.path
import re

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from tokenize import TokenError

from .tau_solver import (
    BoundaryConditions,
    InitialConditions,
    LogTransform,
    ProblemSpec,
)


logger = logging.getLogger(__name__)

THETA, RHO, DRHO, RHO_DELAY = sp.symbols("x rho drho rho_delay", real=True)
RHS_SYMBOLS = (THETA, RHO, DRHO, RHO_DELAY)
ALLOWED_FUNCTIONS = (sp.sin, sp.cos, sp.exp, sp.log)
FUNCTION_NAMES = {function.__name__: function for function in ALLOWED_FUNCTIONS}
TRANSFORMATIONS = standard_transformations + (convert_xor,)
# numbers (with an optional imaginary j suffix), names, operators, whitespace
TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?[jJ]?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<operator>\*\*|[-+*/^()])
""", re.VERBOSE)

VALID_KEYS = ("order", "alpha", "l", "conditions", "A1", "A2", "B1", "B2",
              "transform", "rhs", "exact", "second_derivative_bound")
CONDITION_KEYS = {
    "initial": ("A1", "A2"),
    "boundary": ("B1", "B2"),
}
VALID_TRANSFORMS = ("none", "log")

BUILTIN_PROBLEMS = {
    "pantograph-2": """\
# Linear pantograph equation with exact solution x^2
order = 2
alpha = 0.5
l = 1
conditions = initial
A1 = 0
A2 = 0
rhs = (3/4)*rho + rho_delay - x^2 + 2
exact = x^2
second_derivative_bound = 2
""",
    "lane-emden-1": """\
# Lane-Emden equation rho'' + (6/x) rho' + 14 rho = -4 rho log(rho),
# solved for z = log(rho)
order = 2
l = 1
conditions = initial
A1 = 1
A2 = 0
transform = log
rhs = -(6/x)*drho - 14*rho - 4*rho*log(rho)
exact = exp(-x^2)
second_derivative_bound = 2
""",
    "cosine": """\
order = 2
l = 1
conditions = initial
A1 = 1
A2 = 0
rhs = -rho
exact = cos(x)
second_derivative_bound = 1
""",
}


class ProblemFileError(ValueError):
    def __init__(self, message, source="<string>", line=None):
        location = source if line is None else "{}:{}".format(source, line)
        super(ProblemFileError, self).__init__("{}: {}".format(
            location, message))
        self.source = source
        self.line = line


def _check_tokens(text, names):
    """Reject anything outside the expression grammar before sympy sees it"""
    position = 0
    tokens = []
    while position < len(text):
        match = TOKEN.match(text, position)
        if match is None:
            raise ValueError("Unexpected {!r} at column {} in {!r}".format(
                text[position], position + 1, text))
        if match.lastgroup != "space":
            tokens.append((match.lastgroup, match.group()))
        position = match.end()
    for (kind, value), following in zip(tokens, tokens[1:] + [(None, None)]):
        if kind != "name" or value in names:
            continue
        if following == ("operator", "("):
            raise ValueError("Unsupported function {} in {!r}".format(
                value, text))
        raise ValueError("Unknown name(s) {} in {!r}".format(value, text))


def _parser_globals():
    # a fresh dict per parse; eval adds __builtins__ to it
    names = dict(FUNCTION_NAMES)
    names.update(Integer=sp.Integer, Float=sp.Float, Rational=sp.Rational,
                 Symbol=sp.Symbol, I=sp.I)
    return names


def parse_expression(text, symbols=RHS_SYMBOLS):
    """Parse ``text`` into a sympy expression over ``symbols``

    Only numbers, the given symbols, I, sin, cos, exp, log, parentheses and
    + - * / ^ are accepted; nothing else reaches the parser.

    :raises ValueError: on syntax errors, unknown names or functions
    """
    local_dict = {str(symbol): symbol for symbol in symbols}
    _check_tokens(text, set(local_dict) | set(FUNCTION_NAMES) | {"I"})
    try:
        expr = parse_expr(text, local_dict=local_dict,
                          global_dict=_parser_globals(),
                          transformations=TRANSFORMATIONS)
    except (SyntaxError, TokenError, TypeError) as e:
        raise ValueError("Cannot parse {!r}: {}".format(text, e))
    if not isinstance(expr, sp.Expr):
        raise ValueError("{!r} is not an expression".format(text))
    unknown = expr.free_symbols - set(symbols)
    if unknown:
        raise ValueError("Unknown name(s) {} in {!r}".format(
            ", ".join(sorted(str(s) for s in unknown)), text))
    for function in expr.atoms(sp.Function):
        if not isinstance(function, ALLOWED_FUNCTIONS):
            raise ValueError("Unsupported function {} in {!r}".format(
                function.func, text))
    return expr


def is_linear(expr):
    """True when expr is affine in rho, drho and rho_delay"""
    unknowns = RHS_SYMBOLS[1:]
    return all(sp.simplify(sp.diff(expr, a, b)) == 0
               for a in unknowns for b in unknowns)


def log_transform_expression(expr):
    """The right-hand side of the equation for z = log(rho)

    z'' = e^-z G(x, e^z, e^z z', e^z(alpha x)) - z'^2, with z, z' and
    z(alpha x) taking the places of rho, drho and rho_delay.
    """
    substituted = expr.subs({
        RHO: sp.exp(RHO),
        DRHO: sp.exp(RHO) * DRHO,
        RHO_DELAY: sp.exp(RHO_DELAY),
    }, simultaneous=True)
    transformed = sp.exp(-RHO) * substituted - DRHO ** 2
    return sp.simplify(sp.expand_log(sp.expand(transformed), force=True))


def compile_rhs(expr):
    return sp.lambdify(RHS_SYMBOLS, expr, modules="numpy")


def compile_exact(expr):
    function = sp.lambdify(THETA, expr, modules="numpy")

    def exact(theta):
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(function(theta), theta.shape)

    return exact


def _number(value, key, source, line, real=True):
    try:
        number = complex(parse_expression(value, symbols=()))
    except (ValueError, TypeError) as e:
        raise ProblemFileError("{} must be a number: {}".format(key, e),
                               source, line)
    if real:
        if number.imag != 0:
            raise ProblemFileError("{} must be real, got {}".format(key, value),
                                   source, line)
        return number.real
    return number if number.imag else number.real


def _read_entries(text, source):
    entries = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProblemFileError("Expected key = value, got {!r}".format(
                line), source, number)
        key, value = [part.strip() for part in line.split("=", 1)]
        if key not in VALID_KEYS:
            raise ProblemFileError("Unknown key {}".format(key), source, number)
        if key in entries:
            raise ProblemFileError("Duplicate key {} (first set on line "
                                   "{})".format(key, entries[key][1]),
                                   source, number)
        if not value:
            raise ProblemFileError("Empty value for {}".format(key), source,
                                   number)
        entries[key] = (value, number)
    return entries


def _require(entries, key, source):
    if key not in entries:
        raise ProblemFileError("Missing required key {}".format(key), source)
    return entries[key]


def parse_problem_text(text, source="<string>", name=None):
    """Build a ProblemSpec from problem file text

    :param text: The file contents
    :param source: Name used in error messages
    :param name: Problem name, ``source`` by default
    :return: ProblemSpec
    :raises ProblemFileError: with the offending line number where there is
                              one
    """
    entries = _read_entries(text, source)

    if "order" in entries:
        value, line = entries["order"]
        if value != "2":
            raise ProblemFileError(
                "Only second order problems are supported, got order "
                "{}".format(value), source, line)

    kind, kind_line = entries.get("conditions", ("initial", None))
    if kind not in CONDITION_KEYS:
        raise ProblemFileError("conditions must be initial or boundary, got "
                               "{}".format(kind), source, kind_line)
    for other, keys in CONDITION_KEYS.items():
        if other == kind:
            continue
        for key in keys:
            if key in entries:
                raise ProblemFileError(
                    "{} does not apply to {} conditions".format(key, kind),
                    source, entries[key][1])
    values = []
    for key in CONDITION_KEYS[kind]:
        value, line = _require(entries, key, source)
        values.append(_number(value, key, source, line, real=False))
    first, second = values
    conditions = (InitialConditions(first, second) if kind == "initial"
                  else BoundaryConditions(first, second))

    rhs_text, rhs_line = _require(entries, "rhs", source)
    try:
        rhs = parse_expression(rhs_text)
    except ValueError as e:
        raise ProblemFileError(str(e), source, rhs_line)

    transform = None
    transform_name, transform_line = entries.get("transform", ("none", None))
    if transform_name not in VALID_TRANSFORMS:
        raise ProblemFileError("transform must be log or none, got {}".format(
            transform_name), source, transform_line)
    if transform_name == "log":
        if kind != "initial":
            raise ProblemFileError(
                "The log transform is only supported with initial "
                "conditions", source, transform_line)
        z_rhs = log_transform_expression(rhs)
        logger.debug("Log transformed right-hand side: {}".format(z_rhs))
        transform = LogTransform(rhs=compile_rhs(z_rhs))

    exact = None
    if "exact" in entries:
        exact_text, exact_line = entries["exact"]
        try:
            exact = compile_exact(parse_expression(exact_text,
                                                   symbols=(THETA,)))
        except ValueError as e:
            raise ProblemFileError(str(e), source, exact_line)

    numbers = {}
    for key in ("alpha", "l", "second_derivative_bound"):
        if key in entries:
            numbers[key] = _number(entries[key][0], key, source,
                                   entries[key][1])

    try:
        return ProblemSpec(
            rhs=compile_rhs(rhs),
            conditions=conditions,
            alpha=numbers.get("alpha", 1.0),
            domain_length=numbers.get("l", 1.0),
            transform=transform,
            exact=exact,
            linear=is_linear(rhs),
            second_derivative_bound=numbers.get("second_derivative_bound"),
            name=source if name is None else name)
    except ValueError as e:
        raise ProblemFileError(str(e), source)


def parse_problem_file(path):
    with open(path) as f:
        text = f.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_problem_text(text, source=path, name=name)


def builtin_problem(name):
    if name not in BUILTIN_PROBLEMS:
        raise ValueError("Unknown built-in problem {}; choose from {}".format(
            name, ", ".join(sorted(BUILTIN_PROBLEMS))))
    return parse_problem_text(BUILTIN_PROBLEMS[name], source=name)


def load_problem(name_or_path):
    """A built-in problem by name, otherwise a problem file"""
    if name_or_path in BUILTIN_PROBLEMS:
        return builtin_problem(name_or_path)
    return parse_problem_file(name_or_path)
