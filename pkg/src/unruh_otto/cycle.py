"""
Otto cycle assessment for an entangled detector pair.

Builds the three stage traces Tr(delta_rho^H h_alpha) from one ResponseSet,
checks the feasibility conditions (work, heat absorbed and heat rejected all
positive, 0 < omega1 < omega2), fixes omega1 from the energy balance and
reports the efficiency relative to the plain Otto value.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    INV_SQRT2,
    MAXIMAL_ENTANGLEMENT_TOL,
    SCENARIO_A_RANGE,
    SCENARIO_ALPHA_H,
    SCENARIO_EXPECTED,
    SCENARIO_NONMAX_B2,
    SCENARIO_STEPS,
    SCENARIO_W_RANGE,
    THRESHOLD_EPSILON_SIG_FIGS,
    THRESHOLD_ROWS,
    THRESHOLD_TRACE_REL_TOL,
)
from .errors import DomainError, NearSingularA, UnderdeterminedOmega1, ValidationError
from .kinematics import ClockConvention, MotionKind, is_degenerate_alpha, solve_omega1_hat, stage_alphas
from .metrics import track_performance
from .response import ResponsePoint, ResponseSet, p_a, response_set, singular_band
from .utils import parallel_map, relative_deviation, significant_match, validate_normalized, validate_positive

logger = logging.getLogger(__name__)


class StateClass(str, Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    NON_MAXIMAL = "non_maximal"


class Reason(str, Enum):
    """Why an assessment is infeasible."""

    WORK_NON_POSITIVE = "WorkNonPositive"
    HEAT_IN_NON_POSITIVE = "HeatInNonPositive"
    HEAT_OUT_NON_POSITIVE = "HeatOutNonPositive"
    OMEGA1_INVALID = "Omega1Invalid"


@dataclass(frozen=True)
class EntangledState:
    """
    Real two-qubit state b1|e_A g_B> + b2|g_A e_B>.

    Raises:
        ValidationError: If b1^2 + b2^2 differs from 1 by more than 1e-12
    """

    b1: float
    b2: float

    def __post_init__(self):
        validate_normalized(self.b1, self.b2)

    @classmethod
    def symmetric(cls) -> "EntangledState":
        return cls(INV_SQRT2, INV_SQRT2)

    @classmethod
    def antisymmetric(cls) -> "EntangledState":
        return cls(INV_SQRT2, -INV_SQRT2)

    @classmethod
    def from_b2(cls, b2: float, sign: int = 1) -> "EntangledState":
        """State with the given b2 and b1 = sign * sqrt(1 - b2^2)."""
        if not -1.0 <= b2 <= 1.0:
            raise ValidationError(f"|b2| must not exceed 1, got {b2!r}")
        b1 = math.sqrt(1.0 - b2 * b2)
        return cls(-b1 if sign < 0 else b1, b2)

    def vector(self) -> np.ndarray:
        """Components in the basis (|e e>, |e g>, |g e>, |g g>)."""
        return np.array([0.0, self.b1, self.b2, 0.0])

    def concurrence(self) -> float:
        return 2.0 * abs(self.b1 * self.b2)

    def state_class(self) -> StateClass:
        maximal = (
            abs(abs(self.b1) - INV_SQRT2) <= MAXIMAL_ENTANGLEMENT_TOL
            and abs(abs(self.b2) - INV_SQRT2) <= MAXIMAL_ENTANGLEMENT_TOL
        )
        if not maximal:
            return StateClass.NON_MAXIMAL
        return StateClass.SYMMETRIC if self.b1 * self.b2 > 0 else StateClass.ANTISYMMETRIC

    def energy(self, alpha: float) -> float:
        """Expectation <D|h_alpha|D> in units of omega."""
        return 0.5 * (self.b1**2 - self.b2**2) * (1.0 - alpha)


def free_hamiltonian(alpha: float) -> np.ndarray:
    """Dimensionless free Hamiltonian h_alpha = diag(1+a, 1-a, -1+a, -1-a)/2 of the pair."""
    return 0.5 * np.diag([1.0 + alpha, 1.0 - alpha, -1.0 + alpha, -1.0 - alpha])


@dataclass(frozen=True)
class EngineParams:
    """
    Full dimensionless configuration of one cycle candidate.

    alpha_C must sit on the same side of 1 as alpha_H, or both must equal 1.
    """

    motion: MotionKind
    A: float
    W: float
    alpha_H: float
    alpha_C: float
    state: EntangledState
    clock: ClockConvention = ClockConvention.LORENTZ

    def __post_init__(self):
        for name in ("A", "W", "alpha_H", "alpha_C"):
            validate_positive(name, getattr(self, name))
        if not isinstance(self.motion, MotionKind):
            object.__setattr__(self, "motion", MotionKind(self.motion))
        if not isinstance(self.clock, ClockConvention):
            object.__setattr__(self, "clock", ClockConvention(self.clock))

        heat_degenerate = is_degenerate_alpha(self.alpha_H)
        cool_degenerate = is_degenerate_alpha(self.alpha_C)
        if heat_degenerate != cool_degenerate or (
            not heat_degenerate and (self.alpha_H - 1.0) * (self.alpha_C - 1.0) < 0.0
        ):
            raise ValidationError(
                f"alpha_C={self.alpha_C!r} must lie on the same side of 1 as alpha_H={self.alpha_H!r} "
                "(or both must equal 1)"
            )

    @property
    def point(self) -> ResponsePoint:
        return ResponsePoint(self.A, self.W, self.alpha_H, self.motion)


@dataclass(frozen=True)
class CycleAssessment:
    """Stage traces, gap, efficiencies and feasibility verdict of one cycle candidate."""

    trace_work: float
    trace_heat_in: float
    trace_heat_out: float
    omega1_hat: Optional[float]  # None when both ratios equal 1
    eta_0: Optional[float]
    eta_ratio: Optional[float]  # None unless trace_heat_in > 0
    eta_E: Optional[float]
    feasible: bool
    reasons: FrozenSet[Reason]
    energy_residual: Optional[float]  # W Tr_H - omega1 Tr_C - (W - omega1) Tr_v, diagnostic only
    omega1_residual: Optional[float]  # W/omega1 (alpha_H - 1) - (alpha_C - 1)

    def to_dict(self) -> Dict:
        return {
            "trace_work": self.trace_work,
            "trace_heat_in": self.trace_heat_in,
            "trace_heat_out": self.trace_heat_out,
            "omega1_hat": self.omega1_hat,
            "eta_0": self.eta_0,
            "eta_ratio": self.eta_ratio,
            "eta_E": self.eta_E,
            "feasible": self.feasible,
            "reasons": sorted(reason.value for reason in self.reasons),
            "energy_residual": self.energy_residual,
            "omega1_residual": self.omega1_residual,
        }


def trace_quantity(resp: ResponseSet, state: EntangledState, alpha_signed: float) -> float:
    """
    Second-order trace Tr(delta_rho^H h_alpha).

    Args:
        resp: Responses at the heating-stage point
        state: Initial entangled state
        alpha_signed: Clock ratio of the stage, negative for anti-parallel heating/cooling

    Returns:
        {b2^2 P_A(W) - b1^2 P_A(-W) + b1 b2 dP_AB} + alpha {b1^2 P_B(W) - b2^2 P_B(-W) + b1 b2 dP_AB}
    """
    b1_sq = state.b1 * state.b1
    b2_sq = state.b2 * state.b2
    cross = state.b1 * state.b2 * resp.dP_AB
    detector_a = b2_sq * resp.pA_plus - b1_sq * resp.pA_minus + cross
    detector_b = b1_sq * resp.pB_plus - b2_sq * resp.pB_minus + cross
    return detector_a + alpha_signed * detector_b


def maximal_traces(resp: ResponseSet, alpha_v: float, alpha_H: float) -> Tuple[float, float]:
    """
    Work and heat-in traces of an anti-parallel Bell state.

    With dP_AB = 0 and b1^2 = b2^2 = 1/2 the traces collapse to
    (1 + alpha_v alpha_H) dP_A / 2 and (1 - alpha_H^2) dP_A / 2, dP_A = -W/8.
    """
    half_dp_a = 0.5 * resp.delta_p_a
    return (1.0 + alpha_v * alpha_H) * half_dp_a, (1.0 - alpha_H * alpha_H) * half_dp_a


def otto_efficiency(omega1_hat: float, W: float) -> float:
    """Plain Otto efficiency 1 - omega1/omega2."""
    if not 0.0 < omega1_hat < W:
        raise DomainError(f"Otto efficiency needs 0 < omega1 < omega2, got omega1*T={omega1_hat!r}, W={W!r}")
    return 1.0 - omega1_hat / W


def compliant_alpha_cool(alpha_H: float) -> float:
    """Cooling ratio on the same side of 1 as alpha_H, used for default grids."""
    if is_degenerate_alpha(alpha_H):
        return 1.0
    if alpha_H < 1.0:
        return 0.5 * alpha_H
    return 1.0 + 1.5 * (alpha_H - 1.0)


def assess(params: EngineParams) -> CycleAssessment:
    """
    Evaluate one cycle candidate.

    The response set is built once at (A, W, alpha_H); the work, heat-in and
    heat-out traces use the signed stage clock ratios on that same set.

    Raises:
        NearSingularA: If A lies inside a masked band
    """
    resp = response_set(params.point)
    alphas = stage_alphas(params.motion, params.alpha_H, params.alpha_C, params.A, params.clock)

    trace_work = trace_quantity(resp, params.state, alphas.alpha_v)
    trace_heat_in = trace_quantity(resp, params.state, alphas.alpha_heat_signed)
    trace_heat_out = trace_quantity(resp, params.state, alphas.alpha_cool_signed)

    reasons = set()
    if trace_work <= 0.0:
        reasons.add(Reason.WORK_NON_POSITIVE)
    if trace_heat_in <= 0.0:
        reasons.add(Reason.HEAT_IN_NON_POSITIVE)
    if trace_heat_out <= 0.0:
        reasons.add(Reason.HEAT_OUT_NON_POSITIVE)

    W = params.W
    omega1_hat: Optional[float]
    try:
        omega1_hat = solve_omega1_hat(W, params.alpha_H, params.alpha_C)
    except UnderdeterminedOmega1:
        omega1_hat = None
    if omega1_hat is None or not 0.0 < omega1_hat < W:
        reasons.add(Reason.OMEGA1_INVALID)

    eta_ratio = trace_work / trace_heat_in if trace_heat_in > 0.0 else None
    eta_0 = None if omega1_hat is None else 1.0 - omega1_hat / W
    eta_E = None if eta_0 is None or eta_ratio is None else eta_0 * eta_ratio

    energy_residual = None
    omega1_residual = None
    if omega1_hat is not None:
        energy_residual = W * trace_heat_in - omega1_hat * trace_heat_out - (W - omega1_hat) * trace_work
        omega1_residual = W / omega1_hat * (params.alpha_H - 1.0) - (params.alpha_C - 1.0)

    feasible = not reasons
    if feasible and not 0.0 < eta_E < 1.0:
        logger.warning(f"Feasible cycle with eta_E={eta_E!r} outside (0, 1) at {params}")

    return CycleAssessment(
        trace_work=trace_work,
        trace_heat_in=trace_heat_in,
        trace_heat_out=trace_heat_out,
        omega1_hat=omega1_hat,
        eta_0=eta_0,
        eta_ratio=eta_ratio,
        eta_E=eta_E,
        feasible=feasible,
        reasons=frozenset(reasons),
        energy_residual=energy_residual,
        omega1_residual=omega1_residual,
    )


def epsilon0(A: float, W: float) -> float:
    """
    First-order deviation of b2 from 1/sqrt(2) at which the work trace turns positive.

    Independent of the acceleration ratio.
    """
    plus = p_a(A, W)
    return (W / 8.0) / (2.0 * math.sqrt(2.0) * (plus + plus + W / 8.0))


def trace_at_epsilon0(A: float, W: float) -> float:
    """
    Detector-A work trace at b2 = 1/sqrt(2) + epsilon0.

    The first-order terms cancel by construction of epsilon0, leaving
    epsilon0^2 (P_A(W) + P_A(-W)).
    """
    eps = epsilon0(A, W)
    plus = p_a(A, W)
    return eps * eps * (plus + plus + W / 8.0)


def epsilon_threshold_exact(A: float, W: float) -> float:
    """Exact root in b2 - 1/sqrt(2) of b2^2 P_A(W) - (1 - b2^2) P_A(-W)."""
    plus = p_a(A, W)
    minus = plus + W / 8.0
    return math.sqrt(minus / (plus + minus)) - INV_SQRT2


@dataclass(frozen=True)
class ThresholdRow:
    """Computed near-maximal threshold next to its reference value."""

    W: float
    A: float
    epsilon0: float
    trace: float
    epsilon0_ref: float
    trace_ref: float

    @property
    def epsilon0_match(self) -> bool:
        return significant_match(self.epsilon0, self.epsilon0_ref, THRESHOLD_EPSILON_SIG_FIGS)

    @property
    def trace_rel_dev(self) -> float:
        return relative_deviation(self.trace, self.trace_ref)

    @property
    def passed(self) -> bool:
        return self.epsilon0_match and self.trace_rel_dev <= THRESHOLD_TRACE_REL_TOL

    def to_dict(self) -> Dict:
        return {
            "W": self.W,
            "A": self.A,
            "epsilon0": self.epsilon0,
            "epsilon0_ref": self.epsilon0_ref,
            "trace": self.trace,
            "trace_ref": self.trace_ref,
            "trace_rel_dev": self.trace_rel_dev,
            "pass": self.passed,
        }


def threshold_table() -> List[ThresholdRow]:
    """epsilon0 and the trace it leaves behind at every reference (W, A) pair."""
    rows = []
    for W, _alpha_H, A, eps_ref, trace_ref in THRESHOLD_ROWS:
        rows.append(ThresholdRow(W, A, epsilon0(A, W), trace_at_epsilon0(A, W), eps_ref, trace_ref))
    failed = [(row.W, row.A) for row in rows if not row.passed]
    if failed:
        logger.warning(f"Threshold rows off reference at (W, A) = {failed}")
    return rows


@dataclass
class ScenarioGrid:
    """Parameter grid behind the scenario table."""

    A_values: Sequence[float]
    W_values: Sequence[float]
    alpha_H_values: Sequence[float] = SCENARIO_ALPHA_H
    nonmax_b2: float = SCENARIO_NONMAX_B2
    clock: ClockConvention = ClockConvention.LORENTZ

    @classmethod
    def default(cls, steps: int = SCENARIO_STEPS) -> "ScenarioGrid":
        return cls(
            A_values=np.linspace(*SCENARIO_A_RANGE, steps).tolist(),
            W_values=np.linspace(*SCENARIO_W_RANGE, steps).tolist(),
        )

    def states(self) -> Dict[StateClass, List[EntangledState]]:
        return {
            StateClass.SYMMETRIC: [EntangledState.symmetric()],
            StateClass.ANTISYMMETRIC: [EntangledState.antisymmetric()],
            StateClass.NON_MAXIMAL: [
                EntangledState.from_b2(self.nonmax_b2),
                EntangledState.from_b2(-self.nonmax_b2),
            ],
        }

    def provenance(self) -> Dict:
        return {
            "A": [min(self.A_values), max(self.A_values), len(self.A_values)],
            "W": [min(self.W_values), max(self.W_values), len(self.W_values)],
            "alpha_H": list(self.alpha_H_values),
            "alpha_C": [compliant_alpha_cool(a) for a in self.alpha_H_values],
            "nonmax_b2": [self.nonmax_b2, -self.nonmax_b2],
            "clock": self.clock.value,
        }


@dataclass
class ScenarioRow:
    motion: MotionKind
    state_class: StateClass
    any_feasible: bool = False
    n_points: int = 0
    n_feasible: int = 0

    @property
    def expected(self) -> Optional[bool]:
        return SCENARIO_EXPECTED.get((self.motion.value, self.state_class.value))

    def to_dict(self) -> Dict:
        return {
            "motion": self.motion.value,
            "state_class": self.state_class.value,
            "any_feasible": self.any_feasible,
            "expected": self.expected,
            "n_points": self.n_points,
            "n_feasible": self.n_feasible,
        }


@dataclass
class ScenarioTable:
    rows: List[ScenarioRow]
    provenance: Dict
    skipped_A: List[float] = field(default_factory=list)

    def matches_reference(self) -> bool:
        return all(row.any_feasible == row.expected for row in self.rows)


def _feasible_or_skipped(params: EngineParams) -> Optional[bool]:
    try:
        return assess(params).feasible
    except NearSingularA:
        return None


@track_performance("classify_scenarios")
def classify_scenarios(grid: Optional[ScenarioGrid] = None, workers: Optional[int] = 1) -> ScenarioTable:
    """
    Feasibility verdict per (motion, state class) over a parameter grid.

    A values inside masked bands are skipped and listed in the result.

    Args:
        grid: Parameter grid, the built-in default when None
        workers: Process count for the grid evaluation (None or 0 for one per processor)

    Returns:
        Six-row ScenarioTable with grid provenance
    """
    grid = grid or ScenarioGrid.default()
    skipped_A = sorted({A for A in grid.A_values if singular_band(A)})
    A_values = [A for A in grid.A_values if not singular_band(A)]
    if skipped_A:
        logger.warning(f"Skipping {len(skipped_A)} A values inside masked bands: {skipped_A}")

    states = grid.states()
    rows: List[ScenarioRow] = []
    for motion in MotionKind:
        tasks: List[EngineParams] = []
        owners: List[StateClass] = []
        for A, W, alpha_H in itertools.product(A_values, grid.W_values, grid.alpha_H_values):
            alpha_C = compliant_alpha_cool(alpha_H)
            for state_class, members in states.items():
                for state in members:
                    tasks.append(EngineParams(motion, A, W, alpha_H, alpha_C, state, grid.clock))
                    owners.append(state_class)

        verdicts = parallel_map(_feasible_or_skipped, tasks, workers)
        by_class = {state_class: ScenarioRow(motion, state_class) for state_class in states}
        for state_class, verdict in zip(owners, verdicts):
            if verdict is None:
                continue
            row = by_class[state_class]
            row.n_points += 1
            if verdict:
                row.n_feasible += 1
                row.any_feasible = True
        rows.extend(by_class.values())
        summary = ", ".join(f"{r.state_class.value}={r.n_feasible}/{r.n_points}" for r in by_class.values())
        logger.info(f"{motion.value}: {len(tasks)} assessments, feasible {summary}")

    return ScenarioTable(rows=rows, provenance=grid.provenance(), skipped_A=skipped_A)
