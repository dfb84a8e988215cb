"""
Proper-time relations and stage parameter constraints.

All quantities are dimensionless: accelerations enter only through the
product a*T with the interaction duration, and the heating-stage duration
of detector A sets the unit of time.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .constants import ALPHA_DEGENERACY_TOL
from .errors import DegenerateKappa, DomainError, NonPositiveOmega1, UnderdeterminedOmega1


class MotionKind(str, Enum):
    """Relative motion of the two detectors."""

    PARALLEL = "parallel"  # both in the right Rindler wedge
    ANTIPARALLEL = "antiparallel"  # one detector in each wedge


class ClockConvention(str, Enum):
    """How the free-flight clock ratio follows from the relative velocity."""

    LORENTZ = "lorentz"  # alpha_v = sqrt(1 - v_rel^2)
    SQUARED = "squared"  # alpha_v = 1 - v_rel^2, puts the work-sign boundary near A = 0.33


@dataclass(frozen=True)
class StageAlphas:
    """Clock ratios d(tau_B)/d(tau_A) entering h_alpha at each stage."""

    alpha_v: float
    alpha_heat_signed: float
    alpha_cool_signed: float


@dataclass(frozen=True)
class CoolingDurations:
    """Cooling-stage interaction times in units of the heating time of detector A."""

    T_AC_over_T_AH: float
    T_BC_over_T_AH: float


def is_degenerate_alpha(alpha: float) -> bool:
    """True when alpha is within the shared degeneracy tolerance of 1."""
    return abs(alpha - 1.0) < ALPHA_DEGENERACY_TOL


def interaction_time_dimensionless(v: float) -> float:
    """
    Dimensionless product a*T of acceleration and interaction duration.

    A detector whose velocity sweeps from -v to v under uniform proper
    acceleration a spends proper time T with tanh(a*T/2) = v.

    Args:
        v: Terminal speed in units of c, 0 < v < 1

    Returns:
        2 * artanh(v)

    Raises:
        DomainError: If v is outside (0, 1)
    """
    if not (0.0 < v < 1.0):
        raise DomainError(f"velocity must lie in (0, 1), got {v!r}")
    return 2.0 * math.atanh(v)


def kappa_hat(alpha: float) -> float:
    """
    Separation a_A*kappa of the two accelerated worldlines.

    Solves cosh(a_A*kappa) = (alpha + 1/alpha)/2, whose positive root is |ln alpha|.

    Args:
        alpha: Acceleration ratio a_A/a_B, positive and not 1

    Returns:
        |ln alpha|

    Raises:
        DomainError: If alpha is not positive
        DegenerateKappa: If |alpha - 1| < 1e-9
    """
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if is_degenerate_alpha(alpha):
        raise DegenerateKappa(alpha)
    return abs(math.log(alpha))


def relative_velocity_antiparallel(A: float) -> float:
    """Relative velocity after the heating stage for anti-parallel motion: -2 tanh(A)/(1 + tanh(A)^2)."""
    t = math.tanh(A)
    return -2.0 * t / (1.0 + t * t)


def clock_ratio_antiparallel(A: float, convention: ClockConvention = ClockConvention.LORENTZ) -> float:
    """Free-flight clock ratio alpha_v for anti-parallel motion."""
    # sqrt(1 - v_rel^2) = (1 - t^2)/(1 + t^2) with 1 - t^2 = sech(A)^2, free of cancellation
    if A > 350.0:
        return 0.0
    t = math.tanh(A)
    root = 1.0 / (math.cosh(A) ** 2 * (1.0 + t * t))
    if convention == ClockConvention.SQUARED:
        return root * root
    return root


def stage_alphas(
    motion: MotionKind,
    alpha_H: float,
    alpha_C: float,
    A: float,
    convention: ClockConvention = ClockConvention.LORENTZ,
) -> StageAlphas:
    """
    Signed clock ratios for the work, heating and cooling traces.

    Args:
        motion: Parallel or anti-parallel acceleration
        alpha_H: Heating-stage acceleration ratio a_A/a_B
        alpha_C: Cooling-stage acceleration ratio
        A: Dimensionless heating acceleration of detector A
        convention: Clock-ratio convention for anti-parallel free flight

    Returns:
        StageAlphas with the sign of the anti-parallel stages folded in
    """
    if motion == MotionKind.PARALLEL:
        return StageAlphas(alpha_v=1.0, alpha_heat_signed=alpha_H, alpha_cool_signed=alpha_C)
    return StageAlphas(
        alpha_v=clock_ratio_antiparallel(A, convention),
        alpha_heat_signed=-alpha_H,
        alpha_cool_signed=-alpha_C,
    )


def solve_omega1_hat(W: float, alpha_H: float, alpha_C: float) -> float:
    """
    Lower energy gap fixed by the sufficient energy-balance condition.

    Args:
        W: Dimensionless upper gap omega2*T
        alpha_H: Heating-stage acceleration ratio
        alpha_C: Cooling-stage acceleration ratio

    Returns:
        omega1*T = W (alpha_H - 1)/(alpha_C - 1); callers still check omega1 < omega2

    Raises:
        UnderdeterminedOmega1: If both ratios equal 1
        NonPositiveOmega1: If the ratios straddle 1 (or alpha_H = 1 alone)
    """
    heat_degenerate = is_degenerate_alpha(alpha_H)
    cool_degenerate = is_degenerate_alpha(alpha_C)
    if heat_degenerate and cool_degenerate:
        raise UnderdeterminedOmega1(alpha_H, alpha_C)
    if cool_degenerate:
        raise NonPositiveOmega1(math.copysign(math.inf, (alpha_H - 1.0) * W), alpha_H, alpha_C)

    omega1_hat = W * (alpha_H - 1.0) / (alpha_C - 1.0)
    if omega1_hat <= 0.0 or heat_degenerate:
        raise NonPositiveOmega1(omega1_hat, alpha_H, alpha_C)
    return omega1_hat


def cooling_duration_constraints(
    A: float, alpha_H: float, alpha_C: float, aA_cool_over_aA_heat: float
) -> CoolingDurations:
    """
    Cooling interaction times from the magnitude constraint |a_C T_C| = |a_H T_H|.

    ``A`` and ``alpha_H`` fix the heating stage and are accepted for symmetry
    with the other stage helpers; the ratios depend only on the cooling choices.
    """
    for name, value in (("A", A), ("alpha_H", alpha_H), ("alpha_C", alpha_C), ("ratio", aA_cool_over_aA_heat)):
        if not value > 0.0:
            raise DomainError(f"{name} must be positive, got {value!r}")
    t_ac = 1.0 / aA_cool_over_aA_heat
    return CoolingDurations(T_AC_over_T_AH=t_ac, T_BC_over_T_AH=alpha_C * t_ac)
