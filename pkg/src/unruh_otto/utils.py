"""Utility functions and validators for the Unruh Otto engine tools"""

import concurrent.futures
import math
import os
from enum import Enum
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .constants import FLOAT_SIGNIFICANT_DIGITS, STATE_NORM_TOL
from .errors import ValidationError

T = TypeVar("T")
R = TypeVar("R")


def validate_positive(name: str, value: float) -> float:
    """
    Validate that a parameter is a finite positive number.

    Args:
        name: Parameter name used in the error message
        value: Value to check

    Returns:
        The value as float

    Raises:
        ValidationError: If value is not finite or not strictly positive
    """
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")
    return value


def validate_normalized(b1: float, b2: float, tol: float = STATE_NORM_TOL) -> None:
    """
    Check that state coefficients satisfy b1^2 + b2^2 = 1.

    Args:
        b1: Coefficient of |e_A g_B>
        b2: Coefficient of |g_A e_B>
        tol: Absolute tolerance on the norm

    Raises:
        ValidationError: If the state is not normalized
    """
    norm = b1 * b1 + b2 * b2
    if not math.isfinite(norm) or abs(norm - 1.0) > tol:
        raise ValidationError(f"normalization violated: b1^2 + b2^2 = {norm!r} (must equal 1 within {tol:g})")


def parse_float_list(text: str) -> List[float]:
    """
    Parse a comma-separated list of floats.

    Args:
        text: Text such as "0.05, 0.025, 0.0125"

    Returns:
        List of floats

    Raises:
        ValidationError: If any entry is not a number or the list is empty
    """
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise ValidationError("expected a comma-separated list of numbers, got an empty value")
    try:
        return [float(item) for item in items]
    except ValueError as e:
        raise ValidationError(f"invalid number list {text!r}: {e}") from e


def format_float(value: Any, digits: int = FLOAT_SIGNIFICANT_DIGITS) -> str:
    """
    Format one output cell, numbers with a fixed number of significant digits.

    Args:
        value: Number to format (None and NaN map to an empty field, strings and enums pass through)
        digits: Significant digits

    Returns:
        Shortest representation with at most ``digits`` significant digits
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, str):
        return value
    return f"{float(value):.{digits}g}"


def significant_match(a: float, b: float, sig_figs: int) -> bool:
    """True when a and b agree to within half a unit in the sig_figs-th significant figure of b."""
    return math.isclose(a, b, rel_tol=0.5 * 10.0 ** (1 - sig_figs))


def relative_deviation(value: float, reference: float) -> float:
    """|value - reference| / |reference|, infinite for a zero reference with a nonzero value."""
    diff = abs(value - reference)
    if reference == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / abs(reference)


def resolve_workers(workers: Optional[int]) -> int:
    """Worker count for process pools; None or 0 means one per processor."""
    if workers is None or workers == 0:
        return os.cpu_count() or 1
    if workers < 0:
        raise ValidationError(f"workers must be non-negative, got {workers!r}")
    return int(workers)


def parallel_map(
    func: Callable[[T], R],
    items: Sequence[T],
    workers: Optional[int] = 1,
    initializer: Optional[Callable[..., None]] = None,
    initargs: Tuple = (),
) -> List[R]:
    """
    Apply ``func`` to every item, fanning out over a process pool when workers > 1.

    Results come back in submission order regardless of completion order.
    ``func`` must be a picklable module-level callable; ``initializer`` runs once
    per worker process (and once in-process for serial runs).
    """
    n_workers = min(resolve_workers(workers), max(1, len(items)))
    if n_workers == 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(item) for item in items]
    # Contiguous chunks keep neighbouring points (which share response sets) on one worker
    chunksize = max(1, math.ceil(len(items) / (4 * n_workers)))
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=n_workers, initializer=initializer, initargs=initargs
    ) as executor:
        return list(executor.map(func, items, chunksize=chunksize))


def parse_axis(text: str) -> Tuple[str, List[float]]:
    """
    Parse a scan axis given as ``name=min:max:steps`` or ``name=v1,v2,...``.

    Args:
        text: Axis description, e.g. "A=0.1:10:40" or "alpha_H=0.2,0.5,1.2"

    Returns:
        (name, values) with evenly spaced values for the range form

    Raises:
        ValidationError: If the text is malformed or has fewer than 2 values
    """
    name, sep, spec = str(text).partition("=")
    name, spec = name.strip(), spec.strip()
    if not sep or not name or not spec:
        raise ValidationError(f"axis must look like name=min:max:steps or name=v1,v2,..., got {text!r}")

    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValidationError(f"axis range must be min:max:steps, got {spec!r}")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ValidationError(f"invalid axis range {spec!r}: {e}") from e
        if steps < 2:
            raise ValidationError(f"axis {name} needs at least 2 steps, got {steps}")
        values = np.linspace(lo, hi, steps).tolist()
    else:
        values = parse_float_list(spec)
        if len(values) < 2:
            raise ValidationError(f"axis {name} needs at least 2 values, got {len(values)}")
    return name, values
