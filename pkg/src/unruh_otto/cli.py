"""
Unruh Otto Engine CLI

Command-line interface for cycle assessments, parameter scans, the reference
tables and the quadrature oracle.

Usage:
    unruh-otto eval --motion antiparallel -A 1 -W 0.2 --alpha-h 0.2 --alpha-c 0.1 --b2 0.9
    unruh-otto --out surface.csv scan --preset antiparallel-nonmax
    unruh-otto scan --axis A=0.1:10:40 --axis W=0.05:2:40 --fix alpha_H=0.5 --fix alpha_C=0.4 --fix b2=0.9
    unruh-otto table1
    unruh-otto table2 --steps 20
    unruh-otto oracle --mode 1d

Exit codes: 0 success, 1 check failure or numerical failure, 2 invalid input.
"""

import json
import logging
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click

from . import __version__
from .config import EngineSettings, LogFormat, OutputFormat
from .cycle import (
    EngineParams,
    EntangledState,
    ScenarioGrid,
    assess,
    classify_scenarios,
    compliant_alpha_cool,
    threshold_table,
)
from .errors import ConfigError, DomainError, NoConvergence, QuadratureDivergence, ValidationError
from .kinematics import ClockConvention, MotionKind
from .logging_config import setup_logging
from .metrics import get_metrics
from .oracle import (
    OracleMode,
    antiparallel_checkpoints,
    builtin_checkpoints,
    parse_checkpoints,
    run_checkpoints,
)
from .response import excitation_ratio, response_set, set_lerch_rel_tol
from .scan import PRESETS, Output, Table, preset, run_scan, spec_from_options, write_result, write_table
from .utils import parse_axis

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2

MOTIONS = [m.value for m in MotionKind]


def _fail(message: str, code: int) -> None:
    click.echo(click.style(f"Error: {message}", fg="red"), err=True)
    sys.exit(code)


def handle_errors(func):
    """Map package exceptions onto exit codes with a one-line message on stderr."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValidationError, ConfigError, DomainError) as e:
            _fail(f"{type(e).__name__}: {e}", EXIT_USAGE)
        except (QuadratureDivergence, NoConvergence) as e:
            _fail(f"{type(e).__name__}: {e}", EXIT_FAILURE)
        except OSError as e:
            _fail(f"I/O error: {e}", EXIT_FAILURE)

    return wrapper


def _output_format(ctx, default: OutputFormat) -> str:
    settings: EngineSettings = ctx.obj["settings"]
    return (settings.scan.format or default).value


def _emit(ctx, table: Table, default: OutputFormat) -> None:
    write_table(table, _output_format(ctx, default), ctx.obj["out"], click.get_text_stream("stdout"))


def _parse_fixed(values: Tuple[str, ...]) -> Dict[str, float]:
    fixed = {}
    for item in values:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise ValidationError(f"fixed value must look like name=value, got {item!r}")
        try:
            fixed[name.strip()] = float(raw)
        except ValueError as e:
            raise ValidationError(f"invalid fixed value {item!r}: {e}") from e
    return fixed


@click.group()
@click.version_option(version=__version__, prog_name="unruh-otto")
@click.option("--format", "-f", "fmt", type=click.Choice([f.value for f in OutputFormat]), help="Output format")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write results to a file instead of stdout")
@click.option("--workers", "-j", type=int, help="Worker processes (0: one per processor)")
@click.option("--config", "-c", "config_file", type=click.Path(), help="Path to a key = value config file")
@click.option("--clock", type=click.Choice([c.value for c in ClockConvention]), help="Anti-parallel clock-ratio convention")
@click.option("--log-format", type=click.Choice([f.value for f in LogFormat]), help="Log record format on stderr")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.option("--debug", "-d", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(
    ctx,
    fmt: Optional[str],
    out: Optional[str],
    workers: Optional[int],
    config_file: Optional[str],
    clock: Optional[str],
    log_format: Optional[str],
    verbose: bool,
    debug: bool,
):
    """
    Unruh Otto Engine - cycle feasibility of an entangled accelerated detector pair.

    Examples:

        unruh-otto eval --motion antiparallel -A 1 -W 0.2 --alpha-h 0.2 --b2 0.9

        unruh-otto --format json scan --preset parallel-symmetric

        unruh-otto table2 --steps 20

        unruh-otto oracle --antiparallel-set
    """
    ctx.ensure_object(dict)
    overrides = {"format": fmt, "workers": workers, "clock": clock, "log_format": log_format, "debug": debug or None}
    try:
        settings = EngineSettings.load(config_file, overrides)
    except ConfigError as e:
        _fail(str(e), EXIT_USAGE)

    errors = settings.validate()
    if errors:
        for error in errors:
            click.echo(click.style(f"Config error: {error}", fg="red"), err=True)
        sys.exit(EXIT_USAGE)

    if settings.debug:
        level = "DEBUG"
    elif verbose:
        level = "INFO"
    else:
        level = settings.log_level
    setup_logging(level, json_format=settings.log_format == LogFormat.JSON)
    set_lerch_rel_tol(settings.scan.lerch_rel_tol)

    ctx.obj["settings"] = settings
    ctx.obj["out"] = out
    ctx.obj["verbose"] = verbose
    logger.debug(f"Settings: {settings.as_dict()}")

    if verbose:
        ctx.call_on_close(lambda: click.echo(json.dumps({"metrics": get_metrics()}, default=str), err=True))


@cli.command("eval")
@click.option("--motion", "-m", type=click.Choice(MOTIONS), default=MotionKind.PARALLEL.value, show_default=True)
@click.option("-A", "A", type=float, required=True, help="Dimensionless acceleration of detector A")
@click.option("-W", "W", type=float, required=True, help="Dimensionless gap during the hot stage")
@click.option("--alpha-h", "alpha_H", type=float, required=True, help="Acceleration ratio during heating")
@click.option("--alpha-c", "alpha_C", type=float, help="Acceleration ratio during cooling (default: compliant with alpha-h)")
@click.option("--b2", type=float, required=True, help="Coefficient of |g_A e_B> in the initial state")
@click.option("--b1", type=float, help="Coefficient of |e_A g_B> (default: +sqrt(1 - b2^2))")
@click.pass_context
@handle_errors
def eval_cmd(
    ctx, motion: str, A: float, W: float, alpha_H: float, alpha_C: Optional[float], b2: float, b1: Optional[float]
):
    """
    Assess one cycle candidate.

    Examples:

        unruh-otto eval -A 1 -W 0.2 --alpha-h 0.5 --alpha-c 0.4 --b2 0.7071067811865476

        unruh-otto --format json eval --motion antiparallel -A 1 -W 0.2 --alpha-h 0.2 --b2 0.9
    """
    settings: EngineSettings = ctx.obj["settings"]
    state = EntangledState.from_b2(b2) if b1 is None else EntangledState(b1, b2)
    if alpha_C is None:
        alpha_C = compliant_alpha_cool(alpha_H)
    params = EngineParams(MotionKind(motion), A, W, alpha_H, alpha_C, state, settings.scan.clock)

    result = assess(params)
    responses = response_set(params.point)
    ratio = excitation_ratio(A, W)

    fmt = _output_format(ctx, OutputFormat.TEXT)
    if fmt == OutputFormat.JSON.value:
        record = {
            "params": {
                "motion": motion,
                "A": A,
                "W": W,
                "alpha_H": alpha_H,
                "alpha_C": alpha_C,
                "b1": state.b1,
                "b2": state.b2,
                "state_class": state.state_class().value,
                "clock": settings.scan.clock.value,
            },
            "responses": responses.to_dict(),
            "excitation_ratio": ratio,
            "assessment": result.to_dict(),
        }
        _write_text(ctx, json.dumps(record, indent=2) + "\n")
        return

    row: Dict[str, Any] = {"motion": motion, "A": A, "W": W, "alpha_H": alpha_H, "alpha_C": alpha_C, "b2": b2}
    row.update({k: v for k, v in result.to_dict().items() if k != "reasons"})
    row["reasons"] = ";".join(sorted(r.value for r in result.reasons))
    if fmt == OutputFormat.CSV.value:
        _emit(ctx, Table(columns=list(row), rows=[row]), OutputFormat.CSV)
        return

    if result.feasible:
        verdict = click.style("feasible", fg="green", bold=True)
    else:
        verdict = click.style("not feasible", fg="red", bold=True)
    lines = [
        f"Motion:       {motion} ({state.state_class().value} state, b1={state.b1:.6g}, b2={state.b2:.6g})",
        f"A, W:         {A:g}, {W:g}",
        f"alpha H/C:    {alpha_H:g} / {alpha_C:g}",
        f"P_A(+/-W):    {responses.pA_plus:.6g} / {responses.pA_minus:.6g}",
        f"P_B(+/-W):    {responses.pB_plus:.6g} / {responses.pB_minus:.6g}",
        f"dP_AB:        {responses.dP_AB:.6g}",
        f"Tr work:      {result.trace_work:.6g}",
        f"Tr heat in:   {result.trace_heat_in:.6g}",
        f"Tr heat out:  {result.trace_heat_out:.6g}",
        f"omega1*T:     {_fmt(result.omega1_hat)}",
        f"eta_0:        {_fmt(result.eta_0)}",
        f"eta_E/eta_0:  {_fmt(result.eta_ratio)}",
        f"eta_E:        {_fmt(result.eta_E)}",
        f"Energy resid: {_fmt(result.energy_residual)}",
        f"Verdict:      {verdict}",
    ]
    if result.reasons:
        lines.append(f"Reasons:      {row['reasons']}")
    _write_text(ctx, "\n".join(lines) + "\n")


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.6g}"


def _write_text(ctx, text: str) -> None:
    out = ctx.obj["out"]
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--preset", "preset_name", type=click.Choice(PRESETS), help="Built-in sweep")
@click.option("--axis", "axes", multiple=True, help="Grid axis as name=min:max:steps or name=v1,v2,...")
@click.option("--fix", "fixed", multiple=True, help="Fixed parameter as name=value")
@click.option("--motion", "-m", type=click.Choice(MOTIONS), default=MotionKind.PARALLEL.value, show_default=True)
@click.option(
    "--outputs", type=click.Choice([o.value for o in Output]), multiple=True, help="Columns to compute (default: all)"
)
@click.option("--b1-sign", type=click.Choice(["+", "-"]), default="+", show_default=True, help="Sign of b1")
@click.pass_context
@handle_errors
def scan(
    ctx,
    preset_name: Optional[str],
    axes: Tuple[str, ...],
    fixed: Tuple[str, ...],
    motion: str,
    outputs: Tuple[str, ...],
    b1_sign: str,
):
    """
    Sweep cycle assessments over a parameter grid.

    Every one of A, W, alpha_H, alpha_C and b2 is either an --axis or a --fix.

    Examples:

        unruh-otto --format text scan --preset antiparallel-b2

        unruh-otto scan --axis A=0.1:10:40 --fix W=0.2 --fix alpha_H=0.2 --fix alpha_C=0.1 --fix b2=0.9 -m antiparallel
    """
    settings: EngineSettings = ctx.obj["settings"]
    if preset_name and (axes or fixed):
        raise ValidationError("--preset cannot be combined with --axis or --fix")
    if preset_name:
        spec = preset(preset_name)
    elif axes:
        spec = spec_from_options(
            [parse_axis(a) for a in axes],
            _parse_fixed(fixed),
            motion,
            outputs,
            -1 if b1_sign == "-" else 1,
        )
    else:
        raise ValidationError("give either --preset or at least one --axis")
    spec.clock = settings.scan.clock

    result = run_scan(spec, settings.scan.workers, settings.scan.lerch_rel_tol)
    fmt = _output_format(ctx, OutputFormat.CSV)
    write_result(result, fmt, ctx.obj["out"], click.get_text_stream("stdout"))
    if ctx.obj["verbose"]:
        click.echo(f"{len(result.rows)} points, {result.n_masked} masked", err=True)


@cli.command()
@click.pass_context
@handle_errors
def table1(ctx):
    """
    Reproduce the near-maximal threshold table (epsilon0 and its trace).

    Exits 1 when a row misses its reference value.
    """
    rows = threshold_table()
    records = [row.to_dict() for row in rows]
    table = Table(columns=list(records[0]), rows=records, metadata={"tool": f"unruh-otto {__version__}"})
    _emit(ctx, table, OutputFormat.TEXT)
    if not all(row.passed for row in rows):
        sys.exit(EXIT_FAILURE)


@cli.command()
@click.option("--steps", type=click.IntRange(min=2), default=None, help="Points per A and W axis (default: 40)")
@click.pass_context
@handle_errors
def table2(ctx, steps: Optional[int]):
    """
    Classify every (motion, state class) scenario as feasible or not.

    Exits 1 when a verdict differs from the reference classification.
    """
    settings: EngineSettings = ctx.obj["settings"]
    grid = ScenarioGrid.default(steps) if steps else ScenarioGrid.default()
    grid.clock = settings.scan.clock
    result = classify_scenarios(grid, settings.scan.workers)

    records = [row.to_dict() for row in result.rows]
    metadata = {"tool": f"unruh-otto {__version__}", "grid": result.provenance, "skipped_A": result.skipped_A}
    _emit(ctx, Table(columns=list(records[0]), rows=records, metadata=metadata), OutputFormat.TEXT)
    if not result.matches_reference():
        click.echo(click.style("Scenario verdicts differ from the reference classification", fg="red"), err=True)
        sys.exit(EXIT_FAILURE)


@cli.command()
@click.option("--mode", type=click.Choice([m.value for m in OracleMode]), help="T-integral: closed (1d) or numeric (2d)")
@click.option("--epsilon", help="Comma-separated geometric epsilon schedule, e.g. 0.05,0.025,0.0125")
@click.option("--n-max", type=int, help="Images kept in the Wightman sum")
@click.option("--domain", "domain_half_width", type=float, help="Half width of the sigma window")
@click.option("--rel-tol", type=float, help="Relative pass tolerance")
@click.option("--abs-tol", type=float, help="Absolute pass tolerance")
@click.option("--antiparallel-set", is_flag=True, help="Run the anti-parallel cross-term checkpoints")
@click.option(
    "--checkpoints", "checkpoint_file", type=click.Path(exists=True, dir_okay=False), help="JSON-lines checkpoint file"
)
@click.pass_context
@handle_errors
def oracle(
    ctx,
    mode: Optional[str],
    epsilon: Optional[str],
    n_max: Optional[int],
    domain_half_width: Optional[float],
    rel_tol: Optional[float],
    abs_tol: Optional[float],
    antiparallel_set: bool,
    checkpoint_file: Optional[str],
):
    """
    Check closed-form responses against direct quadrature.

    Emits one JSON record per checkpoint and exits 1 if any fails.
    """
    settings: EngineSettings = ctx.obj["settings"]
    settings.update(
        {
            k: v
            for k, v in {
                "oracle_mode": mode,
                "epsilon_schedule": epsilon,
                "n_max": n_max,
                "domain_half_width": domain_half_width,
                "rel_tol": rel_tol,
                "abs_tol": abs_tol,
            }.items()
            if v is not None
        },
        source="command line",
    )
    cfg = settings.oracle.quadrature_config()

    checkpoints: List = []
    if checkpoint_file:
        with open(checkpoint_file) as handle:
            checkpoints = parse_checkpoints(handle)
    elif antiparallel_set:
        checkpoints = antiparallel_checkpoints()
    else:
        checkpoints = builtin_checkpoints()
    if not checkpoints:
        raise ValidationError("no checkpoints to run")

    reports = run_checkpoints(checkpoints, cfg, settings.oracle.oracle_mode, settings.scan.workers)
    _write_text(ctx, "".join(report.to_json() + "\n" for report in reports))

    failed = [r for r in reports if not r.passed]
    if failed:
        click.echo(click.style(f"{len(failed)} of {len(reports)} checkpoints failed", fg="red"), err=True)
        sys.exit(EXIT_FAILURE)


def main():
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
