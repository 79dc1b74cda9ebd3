import configparser
import csv
import io
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import click
import numpy as np

from .analysis import MIN_SWEEP_S, convergence_sweep
from .config import (
    CONFIG_PATHS,
    CONFIG_SECTION,
    DEFAULTS,
    FLOAT_SETTINGS,
    INT_SETTINGS,
    VALID_FORMATS,
)
from .op_matrices import build_D, build_stretch, dump_matrix, power_D
from .problems import BUILTIN_PROBLEMS, ProblemFileError, load_problem
from .tau_solver import NewtonOptions, NonConvergence, SolverError, newton_solve
from .utils import format_real, parse_int_list
from .verify import DEFAULT_K, DEFAULT_S, run_suites
from .wavelet_basis import BasisConfig


logging.basicConfig(
    format="%(asctime)s %(levelname)-8s [%(filename)s:%(lineno)d] "
           "%(message)s",
    datefmt="%Y-%m-%d:%H:%M:%S")
logger = logging.getLogger()
logger.setLevel(logging.ERROR)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGENCE = 2
EXIT_VERIFY = 3
SWEEP_COLUMNS = ("k", "S", "max_error", "l2w_error", "bound", "runtime_ms")
NOT_CONVERGED = "NC"
VALID_MATRICES = ("D", "stretch")


class RunConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


@dataclass
class RunConfig:
    subcommand: str
    problem: Optional[str] = None
    k_list: List[int] = field(default_factory=list)
    S_list: List[int] = field(default_factory=list)
    tol: float = DEFAULTS["tol"]
    max_iter: int = DEFAULTS["max_iter"]
    fd_step: float = DEFAULTS["fd_step"]
    quad_order: Optional[int] = DEFAULTS["quad_order"]
    format: str = DEFAULTS["format"]
    grid_points: int = DEFAULTS["grid_points"]
    timing: bool = True
    matrix: str = "D"
    power: int = 1
    alpha: float = 0.5

    @property
    def newton_options(self):
        return NewtonOptions(self.tol, self.max_iter, self.fd_step)


def validate_config_file(ctx, param, filenames):
    del ctx, param  # we don't use these arguments
    if filenames is None:
        # the site and user config files are optional
        filenames = CONFIG_PATHS
    else:
        filenames = [filenames]
        if not os.path.exists(filenames[0]):
            raise RunConfigError("Config file {} not found".format(
                filenames[0]))

    config = configparser.ConfigParser()
    for filename in filenames:
        try:
            with open(filename, "r") as f:
                config.read_file(f)
        except FileNotFoundError:
            pass
        except configparser.Error:
            raise RunConfigError(
                "Config file {} is not a valid INI file.".format(filename))
    if not config.has_section(CONFIG_SECTION):
        config.add_section(CONFIG_SECTION)

    result = {}
    for key, value in config.items(CONFIG_SECTION):
        if key not in DEFAULTS:
            raise RunConfigError(
                "Unknown setting `{}` in config file".format(key))
        try:
            if key in FLOAT_SETTINGS:
                value = float(value)
            elif key in INT_SETTINGS:
                value = int(value)
        except ValueError:
            raise RunConfigError(
                "Setting `{}` in config file must be a number, got {}".format(
                    key, value))
        result[key] = value

    if result.get("format", DEFAULTS["format"]) not in VALID_FORMATS:
        raise RunConfigError("`format` in config file must be one of {}".format(
            ", ".join(VALID_FORMATS)))
    logger.debug("Config : {}".format(result))
    return result


def validate_int_list(ctx, param, value):
    del ctx  # we don't use this argument
    if value is None:
        return None
    try:
        return parse_int_list(value)
    except ValueError as e:
        raise RunConfigError("Invalid {} list {}: {}".format(
            param.opts[0], value, e))


def _setting(options, config, key):
    """Order of precedence : command line, config file, built-in default"""
    value = options.get(key)
    if value is not None:
        return value
    return config.get(key, DEFAULTS[key])


def _option(options, key, default):
    value = options.get(key)
    return default if value is None else value


def build_run_config(subcommand, config, **options):
    rc = RunConfig(
        subcommand=subcommand,
        problem=options.get("problem"),
        k_list=options.get("k_list") or [],
        S_list=options.get("S_list") or [],
        tol=_setting(options, config, "tol"),
        max_iter=_setting(options, config, "max_iter"),
        fd_step=_setting(options, config, "fd_step"),
        quad_order=_setting(options, config, "quad_order"),
        format=_setting(options, config, "format"),
        grid_points=_setting(options, config, "grid_points"),
        timing=options.get("timing", True),
        matrix=_option(options, "matrix", "D"),
        power=_option(options, "power", 1),
        alpha=_option(options, "alpha", 0.5))
    if subcommand in ("solve", "sweep"):
        if not rc.k_list or not rc.S_list:
            raise RunConfigError("At least one k and one S are required")
        if min(rc.S_list) < MIN_SWEEP_S:
            raise RunConfigError("S must be >= {}, got {}".format(
                MIN_SWEEP_S, min(rc.S_list)))
    if min(rc.k_list or [0]) < 0:
        raise RunConfigError("k must be >= 0")
    if rc.tol <= 0 or rc.fd_step <= 0 or rc.max_iter < 1:
        raise RunConfigError("tol, fd_step and max_iter must be positive")
    if rc.grid_points < 2:
        raise RunConfigError("grid_points must be >= 2")
    if rc.quad_order is not None and rc.quad_order < 1:
        raise RunConfigError("quad_order must be positive")
    if rc.power < 1:
        raise RunConfigError("--power must be >= 1, got {}".format(rc.power))
    if rc.matrix == "stretch" and not 0 < rc.alpha <= 1:
        raise RunConfigError("--alpha must lie in (0, 1], got {}".format(
            rc.alpha))
    logger.debug("Run config : {}".format(rc))
    return rc


def format_rows(header, rows, fmt):
    """Render rows of strings as CSV or as aligned columns"""
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue().rstrip("\n")
    widths = [max(len(str(row[i])) for row in [header] + list(rows))
              for i in range(len(header))]
    return "\n".join(
        "  ".join(str(cell).ljust(width) for cell, width in zip(row, widths))
        .rstrip()
        for row in [header] + list(rows))


def _load(rc):
    try:
        return load_problem(rc.problem)
    except (ProblemFileError, ValueError) as e:
        raise RunConfigError(str(e))
    except IOError as e:
        raise RunConfigError("Cannot read problem file {}: {}".format(
            rc.problem, e))


def _config(rc, k, S):
    try:
        return BasisConfig(k, S, quad_order=rc.quad_order)
    except ValueError as e:
        raise RunConfigError(str(e))


def render_report(report, rc):
    cfg = report.cfg
    summary = [
        ("problem", report.problem.name),
        ("k", str(cfg.k)),
        ("S", str(cfg.S)),
        ("converged", "yes" if report.converged else "no"),
        ("newton_iters", str(report.newton_iters)),
        ("residual_norm", format_real(report.residual_norm)),
        ("condition_residual_1", format_real(report.condition_residuals[0])),
        ("condition_residual_2", format_real(report.condition_residuals[1])),
        ("max_imag", format_real(report.max_imag)),
    ]
    sections = [format_rows(("quantity", "value"), summary, rc.format)]

    coefficients = []
    for j, value in enumerate(report.E):
        idx = cfg.index(j)
        coefficients.append((str(j), str(idx.h), str(idx.s),
                             format_real(value.real), format_real(value.imag)))
    sections.append(format_rows(("index", "h", "s", "re", "im"),
                                coefficients, rc.format))

    monomials = []
    for h, block in enumerate(report.monomial_coefficients()):
        for power, value in enumerate(block):
            monomials.append((str(h), str(power), format_real(value.real),
                              format_real(value.imag)))
    sections.append(format_rows(("block", "power", "re", "im"), monomials,
                                rc.format))

    if report.problem.exact is not None:
        grid = report.grid(rc.grid_points)
        values = report.evaluate(grid)
        exact = np.broadcast_to(report.problem.exact(grid), grid.shape)
        errors = [(format_real(theta), format_real(value.real),
                   format_real(value.imag), format_real(float(np.real(target))),
                   format_real(abs(value - target)))
                  for theta, value, target in zip(grid, values, exact)]
        sections.append(format_rows(
            ("theta", "rho_re", "rho_im", "exact", "error"), errors, rc.format))
    return "\n\n".join(sections)


def run_solve(rc, output=None):
    prob = _load(rc)
    cfg = _config(rc, rc.k_list[0], rc.S_list[0])
    try:
        report = newton_solve(cfg, prob, rc.newton_options)
    except NonConvergence as e:
        click.echo("Solver did not converge: {}".format(e), err=True)
        if e.report is not None:
            click.echo(render_report(e.report, rc), file=output)
        return EXIT_NONCONVERGENCE
    except SolverError as e:
        click.echo("Solver failed: {}".format(e), err=True)
        return EXIT_NONCONVERGENCE
    click.echo(render_report(report, rc), file=output)
    return EXIT_OK


def sweep_csv(rows):
    table = []
    for row in rows:
        errors = ((format_real(row.max_error), format_real(row.l2w_error))
                  if row.converged else (NOT_CONVERGED, NOT_CONVERGED))
        table.append((str(row.k), str(row.S)) + errors
                     + (format_real(row.bound), format_real(row.runtime_ms)))
    return format_rows(SWEEP_COLUMNS, table, "csv")


def run_sweep(rc, output=None):
    prob = _load(rc)
    try:
        rows = convergence_sweep(prob, rc.k_list, rc.S_list,
                                 opts=rc.newton_options,
                                 quad_order=rc.quad_order, timing=rc.timing)
    except ValueError as e:
        raise RunConfigError(str(e))
    click.echo(sweep_csv(rows), file=output)
    return EXIT_OK if all(row.converged for row in rows) else \
        EXIT_NONCONVERGENCE


def run_verify(rc, output=None):
    results = run_suites(rc.k_list or DEFAULT_K, rc.S_list or DEFAULT_S,
                         quad_order=rc.quad_order)
    for result in results:
        click.echo("{} {}: {}".format(
            "PASS" if result.passed else "FAIL", result.name, result.detail),
            file=output)
    return EXIT_OK if all(result.passed for result in results) else \
        EXIT_VERIFY


def run_dump(rc, output=None):
    cfg = _config(rc, rc.k_list[0], rc.S_list[0])
    if rc.matrix == "D":
        op = power_D(build_D(cfg), rc.power)
    else:
        try:
            op = build_stretch(cfg, rc.alpha)
        except ValueError as e:
            raise RunConfigError(str(e))
    click.echo(dump_matrix(op), file=output)
    return EXIT_OK


problem_option = click.option(
    "-p",
    "--problem",
    default="pantograph-2",
    show_default=True,
    metavar="<name|path>",
    help="Built-in problem ({}) or problem file".format(
        ", ".join(sorted(BUILTIN_PROBLEMS))))
output_option = click.option(
    "-o",
    "--output",
    type=click.File("w"),
    default="-",
    metavar="<path>",
    help="Write results to a file instead of stdout")
solver_options = [
    click.option("--tol", type=float, help="Newton tolerance on the stacked "
                                           "system"),
    click.option("--max-iter", type=int, help="Newton iteration limit"),
    click.option("--fd-step", type=float, help="Finite difference step"),
    click.option("--quad-order", type=int,
                 help="Gauss-Chebyshev nodes per subinterval"),
]


def add_options(options):
    def decorator(f):
        for option in reversed(options):
            f = option(f)
        return f
    return decorator


@click.group()
@click.option(
    "-c",
    "--config",
    default=None,
    help="Relative path to config file",
    metavar="<path>",
    callback=validate_config_file)
@click.option("-v", "--verbose", is_flag=True, help="Print debugging messages")
@click.pass_context
def main(ctx, config, verbose):
    """Solve second order ODEs with the shifted Lucas wavelet tau method"""
    if verbose:
        logger.setLevel(logging.DEBUG)
    ctx.obj = config


@main.command()
@problem_option
@click.option("--k", "k", type=int, default=0, show_default=True,
              help="Resolution level")
@click.option("--S", "S", type=int, default=3, show_default=True,
              help="Polynomial order per subinterval")
@add_options(solver_options)
@click.option("-f", "--format", "fmt", type=click.Choice(VALID_FORMATS),
              help="Output format")
@click.option("--grid-points", type=int,
              help="Points in the error table")
@output_option
@click.pass_obj
def solve(config, problem, k, S, tol, max_iter, fd_step, quad_order, fmt,
          grid_points, output):
    """Solve one problem and print its coefficients and errors"""
    rc = build_run_config(
        "solve", config, problem=problem, k_list=[k], S_list=[S], tol=tol,
        max_iter=max_iter, fd_step=fd_step, quad_order=quad_order, format=fmt,
        grid_points=grid_points)
    sys.exit(run_solve(rc, output))


@main.command()
@problem_option
@click.option("--k", "k_list", default="0", show_default=True,
              callback=validate_int_list,
              help="Resolution levels, e.g. 0,1 or 0..2")
@click.option("--S", "S_list", default="3..6", show_default=True,
              callback=validate_int_list,
              help="Orders, e.g. 3,4,5 or 3..8")
@add_options(solver_options)
@click.option("--timing/--no-timing", default=True,
              help="Record the runtime of each cell")
@output_option
@click.pass_obj
def sweep(config, problem, k_list, S_list, tol, max_iter, fd_step, quad_order,
          timing, output):
    """Measure errors over a grid of (k, S) and print them as CSV"""
    rc = build_run_config(
        "sweep", config, problem=problem, k_list=k_list, S_list=S_list,
        tol=tol, max_iter=max_iter, fd_step=fd_step, quad_order=quad_order,
        timing=timing)
    sys.exit(run_sweep(rc, output))


@main.command()
@click.option("--k", "k_list", default="0,1", show_default=True,
              callback=validate_int_list, help="Resolution levels")
@click.option("--S", "S_list", default="1..8", show_default=True,
              callback=validate_int_list, help="Orders")
@click.option("--quad-order", type=int,
              help="Gauss-Chebyshev nodes per subinterval")
@output_option
@click.pass_obj
def verify(config, k_list, S_list, quad_order, output):
    """Run the property suites and report PASS or FAIL for each"""
    rc = build_run_config("verify", config, k_list=k_list, S_list=S_list,
                          quad_order=quad_order)
    sys.exit(run_verify(rc, output))


@main.command("dump-matrices")
@click.option("--k", "k", type=int, default=0, show_default=True,
              help="Resolution level")
@click.option("--S", "S", type=int, default=3, show_default=True,
              help="Polynomial order per subinterval")
@click.option("-m", "--matrix", type=click.Choice(VALID_MATRICES),
              default="D", show_default=True, help="Matrix to dump")
@click.option("--power", type=int, default=1, show_default=True,
              help="Dump D^n")
@click.option("--alpha", type=float, default=0.5, show_default=True,
              help="Stretch factor for the stretch matrix")
@click.option("--quad-order", type=int,
              help="Gauss-Chebyshev nodes per subinterval")
@output_option
@click.pass_obj
def dump_matrices(config, k, S, matrix, power, alpha, quad_order, output):
    """Print an operational matrix as tab-separated a+bi cells"""
    if S < 1:
        raise RunConfigError("S must be >= 1")
    rc = build_run_config(
        "dump-matrices", config, k_list=[k], S_list=[S], quad_order=quad_order,
        matrix=matrix, power=power, alpha=alpha)
    sys.exit(run_dump(rc, output))


if __name__ == "__main__":
    main()
