"""
Closed-form detector responses.

Dimensionless responses of two Unruh-DeWitt detectors with Lorentzian
switching, in units where the heating-stage duration of detector A is 1
and the coupling is 1:

- p_a / p_a_neg: excitation / de-excitation response of detector A
- p_b / p_b_neg: the same for detector B (identical in both Rindler wedges)
- delta_p_ab: cross-detector term P_AB(W, -W) - P_AB(-W, W)

Physical coupling c rescales every trace by c^2 and leaves feasibility signs
and efficiency ratios unchanged.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .constants import LERCH_DEFAULT_REL_TOL, MIN_W_OVER_A, RESPONSE_CACHE_SIZE, SINGULAR_A_RADIUS
from .errors import DomainError, NearSingularA
from .kinematics import MotionKind, is_degenerate_alpha, kappa_hat
from .metrics import metrics
from .specfun import lerch_phi

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Accuracy of the Lerch sums behind every response; see set_lerch_rel_tol
_lerch_rel_tol = LERCH_DEFAULT_REL_TOL


def set_lerch_rel_tol(rel_tol: float) -> None:
    """Set the process-wide Lerch accuracy and drop memoised response sets."""
    global _lerch_rel_tol
    if rel_tol != _lerch_rel_tol:
        _lerch_rel_tol = rel_tol
        clear_response_cache()


@dataclass(frozen=True)
class ResponsePoint:
    """One parameter point (A, W, alpha, motion) of the response functions."""

    A: float
    W: float
    alpha: float
    motion: MotionKind = MotionKind.PARALLEL

    def __post_init__(self):
        for name in ("A", "W", "alpha"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be a finite positive number, got {value!r}")
        if not isinstance(self.motion, MotionKind):
            object.__setattr__(self, "motion", MotionKind(self.motion))

    @property
    def kappa(self) -> float:
        """Dimensionless worldline separation K = kappa_hat(alpha)/A."""
        return kappa_hat(self.alpha) / self.A


@dataclass(frozen=True)
class ResponseSet:
    """The five response scalars of one parameter point."""

    pA_plus: float
    pA_minus: float
    pB_plus: float
    pB_minus: float
    dP_AB: float

    @property
    def delta_p_a(self) -> float:
        """P_A(W) - P_A(-W), equal to -W/8."""
        return self.pA_plus - self.pA_minus

    @property
    def delta_p_b(self) -> float:
        """P_B(W) - P_B(-W), equal to -alpha W/8."""
        return self.pB_plus - self.pB_minus

    def to_dict(self) -> dict:
        return {
            "pA_plus": self.pA_plus,
            "pA_minus": self.pA_minus,
            "pB_plus": self.pB_plus,
            "pB_minus": self.pB_minus,
            "dP_AB": self.dP_AB,
        }


def singular_band(A: float, radius: float = SINGULAR_A_RADIUS) -> int:
    """Index n >= 1 of the masked band around 2*pi*n containing A, or 0 if A is clear of all bands."""
    n = max(1, round(A / TWO_PI))
    return n if abs(A - TWO_PI * n) < radius else 0


def check_singular_A(A: float) -> None:
    """Raise NearSingularA if A lies inside a masked band."""
    n = singular_band(A)
    if n:
        raise NearSingularA(A, n, SINGULAR_A_RADIUS)


def _check_clamp(A: float, W: float) -> None:
    if not (A > 0.0 and W > 0.0):
        raise DomainError(f"A and W must be positive, got A={A!r}, W={W!r}")
    if W / A < MIN_W_OVER_A:
        raise DomainError(f"W/A={W / A:.3e} is below the series clamp {MIN_W_OVER_A:g}")


def p_a(A: float, W: float, rel_tol: Optional[float] = None) -> float:
    """
    Excitation response P_A(W) of detector A.

    Sum of the thermal-pole term (A/2)^2 e^{-W} / (16 sin^2(A/2)) and two
    Lerch differences at offsets 1 +- A/(2 pi), s = 2 and s = 1.

    Args:
        A: Dimensionless acceleration a_A * T_A
        W: Dimensionless gap omega2 * T_A
        rel_tol: Accuracy requested from each Lerch sum

    Returns:
        P_A(W)

    Raises:
        NearSingularA: If A lies within the masked band around 2*pi*n
        DomainError: If A, W are not positive or W/A is below the series clamp
    """
    _check_clamp(A, W)
    check_singular_A(A)
    rel_tol = _lerch_rel_tol if rel_tol is None else rel_tol

    x = A / TWO_PI
    z = math.exp(-W / x)
    thermal = (0.5 * A) ** 2 * math.exp(-W) / (16.0 * math.sin(0.5 * A) ** 2)
    lerch_2 = lerch_phi(z, 2, 1.0 + x, rel_tol) - lerch_phi(z, 2, 1.0 - x, rel_tol)
    lerch_1 = lerch_phi(z, 1, 1.0 + x, rel_tol) - lerch_phi(z, 1, 1.0 - x, rel_tol)
    return thermal + A * A * z / (64.0 * math.pi**2) * lerch_2 + A * W * z / (32.0 * math.pi) * lerch_1


def p_a_neg(A: float, W: float, rel_tol: Optional[float] = None) -> float:
    """De-excitation response P_A(-W) = W/8 + P_A(W)."""
    return W / 8.0 + p_a(A, W, rel_tol)


def p_b(A: float, W: float, alpha: float, rel_tol: Optional[float] = None) -> float:
    """Excitation response of detector B, P_B(W) = P_A(alpha W); the same in either wedge."""
    return p_a(A, alpha * W, rel_tol)


def p_b_neg(A: float, W: float, alpha: float, rel_tol: Optional[float] = None) -> float:
    """De-excitation response of detector B, P_B(-W) = alpha W/8 + P_B(W)."""
    return alpha * W / 8.0 + p_b(A, W, alpha, rel_tol)


def delta_p_ab(point: ResponsePoint) -> float:
    """
    Cross-detector response difference P_AB(W, -W) - P_AB(-W, W).

    Anti-parallel motion gives exactly 0. Parallel motion uses the two closed
    branches for alpha < 1 and alpha > 1 and their common limit -W/8 when
    alpha is within the degeneracy tolerance of 1.

    Raises:
        NearSingularA: If A lies within a masked band
    """
    A, W, alpha = point.A, point.W, point.alpha
    check_singular_A(A)
    if point.motion == MotionKind.ANTIPARALLEL:
        return 0.0
    if is_degenerate_alpha(alpha):
        return -W / 8.0

    k_hat = kappa_hat(alpha)
    K = k_hat / A
    x_fast = K * W
    x_slow = alpha * K * W
    # cos(x_slow) - cos(x_fast), written as a product to survive alpha -> 1
    cos_diff = -2.0 * math.sin(0.5 * (x_slow + x_fast)) * math.sin(0.5 * (x_slow - x_fast))
    sines = K * math.sin(x_slow) + K * math.sin(x_fast)

    if alpha < 1.0:
        damping = math.exp(-0.5 * (1.0 - alpha) * W)
        bracket = sines + cos_diff
    else:
        damping = math.exp(-0.5 * (alpha - 1.0) * W)
        bracket = sines - cos_diff

    # alpha * b = A, with b = A/alpha the dimensionless acceleration of B
    prefactor = A * damping / (math.sinh(k_hat) * 16.0 * K * (K * K + 1.0))
    return -prefactor * bracket


def excitation_ratio(A: float, W: float) -> float:
    """Detailed-balance ratio P_A(W)/P_A(-W)."""
    plus = p_a(A, W)
    return plus / (plus + W / 8.0)


@lru_cache(maxsize=RESPONSE_CACHE_SIZE)
def _cached_response_set(point: ResponsePoint) -> ResponseSet:
    metrics.record_cache_miss()
    pA_plus = p_a(point.A, point.W)
    pB_plus = p_b(point.A, point.W, point.alpha)
    return ResponseSet(
        pA_plus=pA_plus,
        pA_minus=point.W / 8.0 + pA_plus,
        pB_plus=pB_plus,
        pB_minus=point.alpha * point.W / 8.0 + pB_plus,
        dP_AB=delta_p_ab(point),
    )


def response_set(point: ResponsePoint) -> ResponseSet:
    """
    All five responses of one point, memoised per frozen ResponsePoint.

    The de-excitation values are built from the excitation values by their
    W/8 and alpha W/8 offsets, so those identities hold by construction.
    """
    misses_before = metrics.cache_misses
    result = _cached_response_set(point)
    if metrics.cache_misses == misses_before:
        metrics.record_cache_hit()
    logger.debug(f"response_set({point}) -> {result}")
    return result


def clear_response_cache() -> None:
    """Drop memoised response sets."""
    _cached_response_set.cache_clear()
