"""
Command line: eval, verify, zeros, trace, hessian-table.

Reports go to stdout as JSON; errors go to stderr as JSON with the exit
code of the exception (2 bad input, 3 numerical failure, 1 verification
failure). A report with pass=false also exits 1.
"""

import csv
import functools
import io
import json
import logging
from dataclasses import replace
from pathlib import Path

import click

from torus_zeros.config.run_config import RunConfig, init_run_config
from torus_zeros.exceptions.base import TorusZerosException
from torus_zeros.exceptions.validation import InvalidFormatException
from torus_zeros.models.enums import DegeneracyCurveId, OutputFormat, Suite
from torus_zeros.models.report import Report
from torus_zeros.services.curve_service import ALL, CurveService
from torus_zeros.services.evaluation_service import SYMBOLS, EvaluationService
from torus_zeros.services.hessian_service import TABLE_COLUMNS, HessianTableService
from torus_zeros.services.verification_service import VerificationService
from torus_zeros.services.zero_service import ZeroService
from torus_zeros.utils.logger import bind_run
from torus_zeros.utils.parsing import parse_complex, parse_extended, parse_grid, parse_region

logger = logging.getLogger(__name__)

TOL_PREFIX = "--tol."


def _tolerance_overrides(args: list[str]) -> dict[str, float]:
    """--tol.<name> VALUE or --tol.<name>=VALUE pairs from the extra arguments."""
    overrides = {}
    rest = list(args)
    while rest:
        arg = rest.pop(0)
        if not arg.startswith(TOL_PREFIX):
            raise click.UsageError(f"unexpected argument {arg!r}")
        name, _, value = arg[len(TOL_PREFIX) :].partition("=")
        if not value:
            if not rest:
                raise click.UsageError(f"{arg} needs a value")
            value = rest.pop(0)
        try:
            overrides[name] = float(value)
        except ValueError:
            raise click.BadParameter(f"{value!r} is not a number", param_hint=arg)
    return overrides


def _build_config(ctx: click.Context, region, grid, seed, threads, out) -> RunConfig:
    config = RunConfig.from_env()
    changes = {}
    if region:
        changes["region"] = parse_region(region)
    if grid:
        changes["grid"] = parse_grid(grid)
    if seed is not None:
        changes["seed"] = seed
    if threads is not None:
        changes["thread_count"] = threads
    if out:
        changes["output_dir"] = Path(out)
    config = replace(config, **changes).with_tolerances(_tolerance_overrides(ctx.args))
    config = init_run_config(config)
    bind_run(config, ctx.info_name)
    return config


def run_options(command):
    """Options shared by every subcommand; --tol.<name> arrives as extra arguments."""

    @click.option("--region", help="re_min:re_max:im_min:im_max")
    @click.option("--grid", help="NXxNY, e.g. 400x400")
    @click.option("--seed", type=int)
    @click.option("--threads", type=int, envvar="TORUS_ZEROS_THREADS")
    @click.option("--out", type=click.Path(file_okay=False), help="directory for curve files")
    @click.option(
        "--format",
        "fmt",
        type=click.Choice([f.value for f in OutputFormat]),
        default=OutputFormat.JSON.value,
        show_default=True,
    )
    @click.pass_context
    @functools.wraps(command)
    def wrapper(ctx, region, grid, seed, threads, out, fmt, **kwargs):
        try:
            config = _build_config(ctx, region, grid, seed, threads, out)
            report = command(config=config, fmt=OutputFormat(fmt), **kwargs)
        except TorusZerosException as e:
            logger.error(f"{ctx.info_name} failed: {e.to_log_dict()}", exc_info=True)
            click.echo(json.dumps(e.to_dict(), default=str), err=True)
            ctx.exit(e.exit_code)
        if report is not None:
            ctx.exit(0 if report.passed else 1)

    return wrapper


def _subcommand(name: str):
    return cli.command(name, context_settings={"ignore_unknown_options": True, "allow_extra_args": True})


def _emit_json(report: Report, fmt: OutputFormat) -> Report:
    if fmt is not OutputFormat.JSON:
        raise InvalidFormatException(field="format", expected_format="json", provided_value=fmt.value)
    click.echo(report.to_json(), nl=False)
    return report


@click.group()
def cli():
    """Elliptic and modular special functions: evaluation, verification suites, zero scans, curves."""


@_subcommand("eval")
@click.argument("symbol", type=click.Choice(sorted(SYMBOLS)))
@click.option("--tau", required=True, help="a+bi")
@click.option("--z", "z_text", help="a+bi, for z-dependent symbols")
@click.option("--k", type=click.IntRange(0, 3))
@click.option("--C", "c_text", default="inf", show_default=True)
@click.option("--level", type=click.IntRange(0, 1), default=0, show_default=True)
@run_options
def eval_command(config, fmt, symbol, tau, z_text, k, c_text, level):
    """Evaluate SYMBOL at tau (and z)."""
    report = EvaluationService(config).evaluate(
        symbol,
        tau=parse_complex(tau, field="tau"),
        z=parse_complex(z_text, field="z") if z_text else None,
        k=k,
        C=parse_extended(c_text),
        level=level,
    )
    return _emit_json(report, fmt)


@_subcommand("verify")
@click.argument("suite", type=click.Choice([s.value for s in Suite]))
@run_options
def verify_command(config, fmt, suite):
    """Run a seeded verification suite."""
    return _emit_json(VerificationService(config).run(suite), fmt)


@_subcommand("zeros")
@click.option("--k", "k_text", default="all", show_default=True, help="0..3 or all")
@click.option("--C", "c_text", default="inf", show_default=True)
@run_options
def zeros_command(config, fmt, k_text, c_text):
    """Locate the zeros of f_{k,C} in the region and certify them simple."""
    service = ZeroService(config)
    if k_text == "all":
        return _emit_json(service.scan_all(), fmt)
    try:
        k = int(k_text)
    except ValueError:
        raise click.BadParameter(f"{k_text!r} is not 0..3 or all", param_hint="--k")
    return _emit_json(service.scan(k, parse_extended(c_text)), fmt)


@_subcommand("trace")
@click.argument("curve", type=click.Choice([c.value for c in DegeneracyCurveId] + [ALL]))
@run_options
def trace_command(config, fmt, curve):
    """Trace a degeneracy curve (or all five) and write CSV/SVG files."""
    report = CurveService(config).trace(curve, fmt=fmt)
    click.echo(report.to_json(), nl=False)
    return report


@_subcommand("hessian-table")
@click.option("--tau", "tau_texts", multiple=True, help="a+bi; repeatable, seeded samples when absent")
@run_options
def hessian_table_command(config, fmt, tau_texts):
    """Determinants of the trivial-critical-point Hessians next to their closed forms."""
    taus = [parse_complex(t, field="tau") for t in tau_texts] or None
    report = HessianTableService(config).table(taus)
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        w = csv.writer(buffer, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for row in report.records:
            w.writerow([row[c] if isinstance(row[c], str) else format(row[c], ".17g") for c in TABLE_COLUMNS])
        click.echo(buffer.getvalue(), nl=False)
        return report
    return _emit_json(report, fmt)
