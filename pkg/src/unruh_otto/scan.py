"""
Parameter sweeps over cycle assessments.

A ScanSpec names up to five parameters (A, W, alpha_H, alpha_C, b2), each
either a grid axis or a fixed value. The grid is expanded lexicographically in
axis order, points inside the masked A bands are flagged instead of
evaluated, and the remaining points fan out over a process pool. Writers emit
CSV (with ``#`` metadata lines), JSON or aligned text.
"""

import csv
import io
import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .constants import (
    CSV_COMMENT_PREFIX,
    INV_SQRT2,
    LERCH_DEFAULT_REL_TOL,
    MIN_W_OVER_A,
    SCENARIO_A_RANGE,
    SCENARIO_STEPS,
    SCENARIO_W_RANGE,
    SINGULAR_A_RADIUS,
)
from .cycle import EngineParams, EntangledState, assess, epsilon0, epsilon_threshold_exact, trace_at_epsilon0
from .errors import UnruhOttoError, ValidationError
from .kinematics import ClockConvention, MotionKind, is_degenerate_alpha
from .metrics import track_performance
from .response import set_lerch_rel_tol, singular_band
from .utils import format_float, parallel_map

logger = logging.getLogger(__name__)

PARAMETERS = ("A", "W", "alpha_H", "alpha_C", "b2")
EPSILON0_PARAMETERS = ("A", "W")


class ScanKind(str, Enum):
    CYCLE = "cycle"  # assess() per point
    EPSILON0 = "epsilon0"  # near-maximal threshold per (A, W)


class Output(str, Enum):
    TRACES = "traces"
    ETA_RATIO = "eta_ratio"
    ETA_E = "eta_E"
    FEASIBLE = "feasible"


OUTPUT_COLUMNS = {
    Output.TRACES: ("trace_work", "trace_heat_in", "trace_heat_out"),
    Output.ETA_RATIO: ("eta_ratio",),
    Output.ETA_E: ("eta_E",),
    Output.FEASIBLE: ("feasible",),
}
EPSILON0_COLUMNS = ("epsilon0", "trace_at_epsilon0", "epsilon_exact")


@dataclass
class ScanAxis:
    name: str
    values: List[float]


@dataclass
class ScanSpec:
    """
    Grid description of one sweep.

    Every parameter appears exactly once, either as an axis or as a fixed
    value; b1 follows from b2 as b1_sign * sqrt(1 - b2^2).
    """

    axes: List[ScanAxis]
    fixed: Dict[str, float] = field(default_factory=dict)
    motion: MotionKind = MotionKind.PARALLEL
    outputs: Tuple[Output, ...] = tuple(Output)
    b1_sign: int = 1
    clock: ClockConvention = ClockConvention.LORENTZ
    kind: ScanKind = ScanKind.CYCLE
    name: Optional[str] = None

    @property
    def parameters(self) -> Tuple[str, ...]:
        return EPSILON0_PARAMETERS if self.kind == ScanKind.EPSILON0 else PARAMETERS

    def validate(self) -> None:
        """
        Check the grid invariants.

        Raises:
            ValidationError: If a parameter is missing or repeated, an axis has fewer
                than 2 values, a value is out of range, or some point falls below
                the W/A series limit
        """
        names = [axis.name for axis in self.axes] + list(self.fixed)
        unknown = sorted(set(names) - set(self.parameters))
        if unknown:
            raise ValidationError(f"unknown scan parameters {unknown}; expected {list(self.parameters)}")
        repeated = sorted({n for n in names if names.count(n) > 1})
        if repeated:
            raise ValidationError(f"parameters given more than once: {repeated}")
        missing = [p for p in self.parameters if p not in names]
        if missing:
            raise ValidationError(f"parameters missing from the scan (need an axis or a fixed value): {missing}")

        for axis in self.axes:
            if len(axis.values) < 2:
                raise ValidationError(f"axis {axis.name} needs at least 2 values")

        for name in self.parameters:
            values = self.values_of(name)
            if name == "b2":
                if any(abs(v) > 1.0 for v in values):
                    raise ValidationError("b2 values must satisfy |b2| <= 1")
            elif any(not (math.isfinite(v) and v > 0.0) for v in values):
                raise ValidationError(f"{name} values must be finite and positive")

        self._check_series_domain()

        if self.kind == ScanKind.CYCLE:
            for alpha_H, alpha_C in itertools.product(self.values_of("alpha_H"), self.values_of("alpha_C")):
                same_side = (alpha_H - 1.0) * (alpha_C - 1.0) > 0.0
                both_one = is_degenerate_alpha(alpha_H) and is_degenerate_alpha(alpha_C)
                if not (same_side or both_one):
                    raise ValidationError(
                        f"alpha_C={alpha_C} is not on the same side of 1 as alpha_H={alpha_H} for some grid point"
                    )

    def _check_series_domain(self) -> None:
        # P_A is evaluated at W and P_B at alpha_H * W, both against A
        A_max, W_min = max(self.values_of("A")), min(self.values_of("W"))
        scale = 1.0
        if self.kind == ScanKind.CYCLE:
            scale = min(1.0, min(self.values_of("alpha_H")))
        ratio = scale * W_min / A_max
        if ratio < MIN_W_OVER_A:
            names = [axis.name for axis in self.axes if axis.name in ("A", "W", "alpha_H")]
            raise ValidationError(
                f"grid reaches W/A={ratio:.3e} below the series limit {MIN_W_OVER_A:g} "
                f"(A={A_max:g}, W={W_min:g}); narrow the axes {names or ['A', 'W']}"
            )

    def values_of(self, name: str) -> List[float]:
        for axis in self.axes:
            if axis.name == name:
                return list(axis.values)
        return [self.fixed[name]]

    @property
    def columns(self) -> List[str]:
        head = [axis.name for axis in self.axes] + ["masked"]
        if self.kind == ScanKind.EPSILON0:
            return head + list(EPSILON0_COLUMNS)
        return head + [c for out in self.outputs for c in OUTPUT_COLUMNS[Output(out)]]

    def points(self) -> List[Dict[str, float]]:
        """Grid points in lexicographic axis order, fixed values merged in."""
        grid = itertools.product(*(axis.values for axis in self.axes))
        return [{**self.fixed, **dict(zip((a.name for a in self.axes), combo))} for combo in grid]

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "motion": self.motion.value,
            "axes": {axis.name: [min(axis.values), max(axis.values), len(axis.values)] for axis in self.axes},
            "fixed": self.fixed,
            "b1_sign": self.b1_sign,
            "clock": self.clock.value,
            "outputs": [Output(o).value for o in self.outputs],
        }


@dataclass
class ScanResult:
    spec: ScanSpec
    columns: List[str]
    rows: List[Dict[str, Any]]
    masked_bands: List[int]

    @property
    def n_masked(self) -> int:
        return sum(1 for row in self.rows if row["masked"])

    def metadata(self) -> Dict[str, Any]:
        return {
            "tool": f"unruh-otto {__version__}",
            "grid": self.spec.describe(),
            "mask_bands": [
                {"n": n, "A_min": 2 * math.pi * n - SINGULAR_A_RADIUS, "A_max": 2 * math.pi * n + SINGULAR_A_RADIUS}
                for n in self.masked_bands
            ],
            "points": len(self.rows),
            "masked_points": self.n_masked,
        }

    def table(self) -> "Table":
        return Table(columns=self.columns, rows=self.rows, metadata=self.metadata())


def _evaluate_point(task: Tuple[ScanSpec, Dict[str, float]]) -> Dict[str, Any]:
    spec, values = task
    if spec.kind == ScanKind.EPSILON0:
        A, W = values["A"], values["W"]
        return {
            "epsilon0": epsilon0(A, W),
            "trace_at_epsilon0": trace_at_epsilon0(A, W),
            "epsilon_exact": epsilon_threshold_exact(A, W),
        }

    params = EngineParams(
        motion=spec.motion,
        A=values["A"],
        W=values["W"],
        alpha_H=values["alpha_H"],
        alpha_C=values["alpha_C"],
        state=EntangledState.from_b2(values["b2"], spec.b1_sign),
        clock=spec.clock,
    )
    result = assess(params)
    return {
        "trace_work": result.trace_work,
        "trace_heat_in": result.trace_heat_in,
        "trace_heat_out": result.trace_heat_out,
        "eta_ratio": result.eta_ratio,
        "eta_E": result.eta_E,
        "feasible": result.feasible,
    }


def _init_worker(lerch_rel_tol: float) -> None:
    set_lerch_rel_tol(lerch_rel_tol)


@track_performance("scan")
def run_scan(spec: ScanSpec, workers: Optional[int] = 1, lerch_rel_tol: float = LERCH_DEFAULT_REL_TOL) -> ScanResult:
    """
    Evaluate every grid point of a scan.

    Args:
        spec: Scan description (validated here)
        workers: Process count, None or 0 for one per processor
        lerch_rel_tol: Lerch accuracy used by every worker

    Returns:
        ScanResult with rows in grid order; masked rows carry only the axis values
    """
    spec.validate()
    points = spec.points()
    masked = [bool(singular_band(p["A"])) for p in points]
    bands = sorted({singular_band(p["A"]) for p, m in zip(points, masked) if m})
    if bands:
        logger.warning(f"Masking {sum(masked)} of {len(points)} points inside A bands around 2*pi*n, n={bands}")

    tasks = [(spec, p) for p, m in zip(points, masked) if not m]
    logger.info(f"Scanning {len(tasks)} points ({spec.name or spec.kind.value}, {spec.motion.value})")
    evaluated = iter(parallel_map(_evaluate_point, tasks, workers, _init_worker, (lerch_rel_tol,)))

    axis_names = [axis.name for axis in spec.axes]
    rows = []
    for point, is_masked in zip(points, masked):
        row: Dict[str, Any] = {name: point[name] for name in axis_names}
        row["masked"] = is_masked
        if not is_masked:
            outputs = next(evaluated)
            row.update({c: outputs[c] for c in spec.columns if c in outputs})
        rows.append(row)
    return ScanResult(spec=spec, columns=spec.columns, rows=rows, masked_bands=bands)


# Writers


@dataclass
class Table:
    """Rows ready for output, with the metadata written ahead of them."""

    columns: List[str]
    rows: List[Dict[str, Any]]
    metadata: Dict[str, Any] = field(default_factory=dict)


def write_csv(table: Table, stream: IO[str]) -> None:
    """CSV with '#'-prefixed metadata lines, a header line, then one row per record."""
    for key, value in table.metadata.items():
        stream.write(f"{CSV_COMMENT_PREFIX}{key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_float(row.get(c)) for c in table.columns])


def write_json(table: Table, stream: IO[str]) -> None:
    json.dump({"metadata": table.metadata, "columns": table.columns, "rows": table.rows}, stream, indent=2)
    stream.write("\n")


def write_text(table: Table, stream: IO[str]) -> None:
    cells = [table.columns] + [[format_float(row.get(c)) for c in table.columns] for row in table.rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(table.columns))]
    for line in cells:
        stream.write("  ".join(cell.rjust(w) for cell, w in zip(line, widths)).rstrip() + "\n")


WRITERS = {"csv": write_csv, "json": write_json, "text": write_text}


def write_table(table: Table, fmt: str, out_path: Optional[str] = None, stream: Optional[IO[str]] = None) -> None:
    """
    Write a table to a file or stream.

    A file that fails midway is removed.

    Raises:
        OSError: On I/O failure, after removing the partial file
    """
    writer = WRITERS[fmt]
    if out_path is None:
        writer(table, stream)
        return

    path = Path(out_path)
    try:
        with path.open("w", newline="") as handle:
            writer(table, handle)
    except BaseException:
        path.unlink(missing_ok=True)
        raise
    logger.info(f"Wrote {len(table.rows)} rows to {path}")


def write_result(result: ScanResult, fmt: str, out_path: Optional[str] = None, stream: Optional[IO[str]] = None) -> None:
    write_table(result.table(), fmt, out_path, stream)


def render(table: Table, fmt: str) -> str:
    buffer = io.StringIO()
    write_table(table, fmt, stream=buffer)
    return buffer.getvalue()


# Presets


def _grid_axes(steps: int = SCENARIO_STEPS) -> List[ScanAxis]:
    return [
        ScanAxis("A", np.linspace(*SCENARIO_A_RANGE, steps).tolist()),
        ScanAxis("W", np.linspace(*SCENARIO_W_RANGE, steps).tolist()),
    ]


def _surface(name: str, motion: MotionKind, alpha_H: float, alpha_C: float, b2: float) -> ScanSpec:
    return ScanSpec(
        axes=_grid_axes(),
        fixed={"alpha_H": alpha_H, "alpha_C": alpha_C, "b2": b2},
        motion=motion,
        name=name,
    )


def preset(name: str) -> ScanSpec:
    """
    Built-in sweep by name.

    Raises:
        ValidationError: For an unknown preset name
    """
    par, anti = MotionKind.PARALLEL, MotionKind.ANTIPARALLEL
    if name == "parallel-symmetric":
        return _surface(name, par, 0.5, 0.4, INV_SQRT2)
    if name == "parallel-antisymmetric":
        return _surface(name, par, 0.5, 0.4, -INV_SQRT2)
    if name == "parallel-nonmax":
        return _surface(name, par, 0.5, 0.4, 0.9)
    if name == "antiparallel-nonmax":
        return _surface(name, anti, 0.2, 0.1, 0.9)
    if name == "antiparallel-efficiency-A":
        return ScanSpec(
            axes=[ScanAxis("A", np.linspace(0.1, 10.0, 100).tolist())],
            fixed={"W": 0.2, "alpha_H": 0.2, "alpha_C": 0.1, "b2": 0.9},
            motion=anti,
            name=name,
        )
    if name == "antiparallel-b2":
        return ScanSpec(
            axes=[
                ScanAxis("A", [0.5, 5.0]),
                ScanAxis("alpha_H", [0.2, 0.4, 0.6, 0.8]),
                ScanAxis("b2", np.linspace(0.72, 0.99, 28).tolist()),
            ],
            fixed={"W": 0.2, "alpha_C": 0.1},
            motion=anti,
            name=name,
        )
    if name == "epsilon0":
        return ScanSpec(
            axes=[ScanAxis("W", [0.1, 0.01]), ScanAxis("A", np.linspace(1.0, 50.0, 50).tolist())],
            kind=ScanKind.EPSILON0,
            name=name,
        )
    raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = (
    "parallel-symmetric",
    "parallel-antisymmetric",
    "parallel-nonmax",
    "antiparallel-nonmax",
    "antiparallel-efficiency-A",
    "antiparallel-b2",
    "epsilon0",
)


def spec_from_options(
    axes: Sequence[Tuple[str, List[float]]],
    fixed: Dict[str, float],
    motion: str,
    outputs: Optional[Sequence[str]] = None,
    b1_sign: int = 1,
    clock: str = ClockConvention.LORENTZ.value,
) -> ScanSpec:
    """Build a cycle ScanSpec from parsed command-line pieces."""
    try:
        return ScanSpec(
            axes=[ScanAxis(name, values) for name, values in axes],
            fixed=dict(fixed),
            motion=MotionKind(motion),
            outputs=tuple(Output(o) for o in outputs) if outputs else tuple(Output),
            b1_sign=-1 if b1_sign < 0 else 1,
            clock=ClockConvention(clock),
        )
    except ValueError as e:
        if isinstance(e, UnruhOttoError):
            raise
        raise ValidationError(str(e)) from e
