"""
Lerch transcendent for real arguments.

Evaluates Phi(z, s, a) = sum_{k>=0} z^k / (k + a)^s for 0 <= z < 1, s in {1, 2}
and real offsets a that may be negative. Terms with k + a <= 0 are summed
exactly up front; the positive-offset tail is summed in numpy chunks with
compensated accumulation and stopped on a geometric tail bound. For z close
to 1 the chunk partial sums are additionally passed through iterated Aitken
extrapolation.
"""

import logging
import math
from typing import List, NamedTuple, Tuple

import numpy as np

from .constants import (
    LERCH_ACCELERATION_THRESHOLD,
    LERCH_CHUNK_SIZE,
    LERCH_DEFAULT_REL_TOL,
    LERCH_MAX_REL_TOL,
    LERCH_MIN_REL_TOL,
    LERCH_SINGULAR_OFFSET_TOL,
    LERCH_TERM_BUDGET,
)
from .errors import DomainError, NoConvergence, SingularOffset
from .metrics import metrics

logger = logging.getLogger(__name__)


class LerchArgs(NamedTuple):
    """Arguments of one Lerch transcendent evaluation."""

    z: float
    s: int
    a: float


def _check_args(z: float, s: int, a: float, rel_tol: float) -> None:
    if not (0.0 <= z < 1.0):
        raise DomainError(f"Lerch argument z must satisfy 0 <= z < 1, got {z!r}")
    if s not in (1, 2):
        raise DomainError(f"Lerch order s must be 1 or 2, got {s!r}")
    if not (LERCH_MIN_REL_TOL <= rel_tol <= LERCH_MAX_REL_TOL):
        raise DomainError(f"rel_tol must lie in [{LERCH_MIN_REL_TOL:g}, {LERCH_MAX_REL_TOL:g}], got {rel_tol!r}")
    if not math.isfinite(a):
        raise DomainError(f"Lerch offset a must be finite, got {a!r}")
    if a <= LERCH_SINGULAR_OFFSET_TOL and abs(a - round(a)) < LERCH_SINGULAR_OFFSET_TOL:
        raise SingularOffset(a, LERCH_SINGULAR_OFFSET_TOL)


def _aitken(seq: np.ndarray, its: int = 1) -> np.ndarray:
    """Iterated Aitken delta-squared transform of a sequence of partial sums."""
    S = seq
    for _ in range(its):
        if S.size < 3:
            break
        d1 = S[2:] - S[1:-1]
        d0 = S[1:-1] - S[:-2]
        denom = d1 - d0
        with np.errstate(divide="ignore", invalid="ignore"):
            accelerated = S[2:] - d1 * d1 / denom
        # Fall back to the raw partial sum where the transform is undefined
        S = np.where(np.isfinite(accelerated) & (denom != 0.0), accelerated, S[2:])
    return S


def _head_terms(z: float, s: int, a: float) -> Tuple[float, int]:
    """Exact sum of the finitely many terms with k + a <= 0, and the first tail index."""
    if a > 0.0:
        return 0.0, 0
    n_head = int(math.floor(-a)) + 1
    head = [z**k / (k + a) ** s for k in range(n_head)]
    return math.fsum(head), n_head


def _tail_sum(z: float, s: int, a: float, k_start: int, head: float, rel_tol: float) -> Tuple[float, int, bool]:
    """Sum of terms k >= k_start (all with k + a > 0), the number of terms used and whether Aitken settled it."""
    log_z = math.log(z)
    accelerate = z > LERCH_ACCELERATION_THRESHOLD

    total = 0.0
    compensation = 0.0
    partials: List[float] = []
    previous_accelerated = None
    k0 = k_start
    rel_error = math.inf

    while k0 < LERCH_TERM_BUDGET:
        k1 = min(k0 + LERCH_CHUNK_SIZE, LERCH_TERM_BUDGET)
        k = np.arange(k0, k1, dtype=float)
        terms = np.exp(k * log_z - s * np.log(k + a))

        # Kahan accumulation of exactly rounded chunk sums
        y = math.fsum(terms.tolist()) - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        k0 = k1

        scale = abs(head + total) or abs(total) or 1.0
        bound = float(terms[-1]) * z / (1.0 - z)
        rel_error = bound / scale
        if rel_error <= rel_tol:
            return total, k0 - k_start, False

        if accelerate:
            partials.append(total)
            if len(partials) >= 3:
                its = 2 if len(partials) >= 5 else 1
                accelerated = float(_aitken(np.asarray(partials), its)[-1])
                if previous_accelerated is not None:
                    change = abs(accelerated - previous_accelerated)
                    if change <= 0.1 * rel_tol * (abs(head + accelerated) or 1.0):
                        logger.debug(f"Aitken accepted after {k0 - k_start} terms (z={z:.6f}, s={s}, a={a:.6f})")
                        return accelerated, k0 - k_start, True
                previous_accelerated = accelerated

    raise NoConvergence(z, s, a, k0 - k_start, rel_error)


def lerch_phi(z: float, s: int, a: float, rel_tol: float = LERCH_DEFAULT_REL_TOL) -> float:
    """
    Evaluate the Lerch transcendent Phi(z, s, a) = sum_k z^k / (k + a)^s.

    Args:
        z: Argument, 0 <= z < 1
        s: Order, 1 or 2
        a: Real offset, not a non-positive integer (may be negative)
        rel_tol: Target relative accuracy in [1e-14, 1e-3]

    Returns:
        The series value; for negative a the terms with k + a < 0 enter with
        their sign for s = 1 and positively for s = 2

    Raises:
        DomainError: If z, s or rel_tol are out of range
        SingularOffset: If a is within 1e-9 of a non-positive integer
        NoConvergence: If the term budget runs out first
    """
    z = float(z)
    a = float(a)
    _check_args(z, s, a, rel_tol)

    head, k_start = _head_terms(z, s, a)
    if z == 0.0:
        # Only k = 0 survives
        metrics.record_lerch(1)
        return 1.0 / a**s

    tail, n_terms, accelerated = _tail_sum(z, s, a, k_start, head, rel_tol)
    metrics.record_lerch(k_start + n_terms, accelerated)
    if n_terms > 10 * LERCH_CHUNK_SIZE:
        logger.debug(f"Lerch sum used {n_terms} terms (z={z:.8f}, s={s}, a={a:.6f})")
    return head + tail
