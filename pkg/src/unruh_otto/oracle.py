"""
Brute-force quadrature oracle for the closed-form responses.

Integrates the defining double integrals directly, with Lorentzian switching
chi(tau) = 1/(1 + 4 tau^2) (unit heating time) and regulated Wightman kernels,
in the rotated coordinates T = tau + tau', sigma = tau - tau' (Jacobian 1/2).
The regulator epsilon is swept over a geometric schedule and the results are
Richardson-extrapolated to epsilon -> 0.

Two modes:

- ``2d``: the inner T integral is done numerically (cosine-weighted QUADPACK)
- ``1d``: the inner T integral uses its closed form
"""

import cmath
import json
import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from .constants import (
    ORACLE_ABS_TOL,
    ORACLE_DOMAIN_HALF_WIDTH,
    ORACLE_EPSILON_SCHEDULE,
    ORACLE_N_MAX,
    ORACLE_QUAD_LIMIT,
    ORACLE_REL_TOL,
)
from .errors import DomainError, QuadratureDivergence, UnruhOttoError, ValidationError
from .kinematics import MotionKind, kappa_hat
from .metrics import metrics, track_performance
from .response import ResponsePoint, delta_p_ab, p_a, p_a_neg, p_b, p_b_neg
from .utils import parallel_map, relative_deviation

logger = logging.getLogger(__name__)

FOUR_PI_SQ = 4.0 * math.pi**2
SIXTEEN_PI_SQ = 16.0 * math.pi**2


class OracleMode(str, Enum):
    ONE_D = "1d"
    TWO_D = "2d"


class Detector(str, Enum):
    A = "A"
    B = "B"


class CheckpointKind(str, Enum):
    P_A_PLUS = "p_a+"
    P_A_MINUS = "p_a-"
    P_B_PLUS = "p_b+"
    P_B_MINUS = "p_b-"
    DELTA_P_AB = "dP_AB"


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Regulator schedule, truncation and tolerances of the oracle.

    Raises:
        ValidationError: If the schedule is not strictly decreasing, positive and
            geometric, n_max < 10, domain_half_width < 5 or a tolerance is not positive
    """

    epsilon_schedule: Tuple[float, ...] = ORACLE_EPSILON_SCHEDULE
    n_max: int = ORACLE_N_MAX
    domain_half_width: float = ORACLE_DOMAIN_HALF_WIDTH
    abs_tol: float = ORACLE_ABS_TOL
    rel_tol: float = ORACLE_REL_TOL

    def __post_init__(self):
        schedule = tuple(float(e) for e in self.epsilon_schedule)
        object.__setattr__(self, "epsilon_schedule", schedule)
        if not schedule or any(e <= 0.0 for e in schedule):
            raise ValidationError(f"epsilon_schedule must hold positive values, got {schedule!r}")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ValidationError(f"epsilon_schedule must be strictly decreasing, got {schedule!r}")
        ratios = [a / b for a, b in zip(schedule, schedule[1:])]
        if ratios and any(not math.isclose(r, ratios[0], rel_tol=1e-6) for r in ratios):
            raise ValidationError(f"epsilon_schedule must be geometric for extrapolation, got {schedule!r}")
        if self.n_max < 10:
            raise ValidationError(f"n_max must be at least 10, got {self.n_max!r}")
        if self.domain_half_width < 5.0:
            raise ValidationError(f"domain_half_width must be at least 5, got {self.domain_half_width!r}")
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValidationError(f"tolerances must be positive, got abs_tol={self.abs_tol!r}, rel_tol={self.rel_tol!r}")

    @property
    def step_ratio(self) -> float:
        s = self.epsilon_schedule
        return s[0] / s[1] if len(s) > 1 else 1.0


@dataclass(frozen=True)
class Checkpoint:
    kind: CheckpointKind
    point: ResponsePoint

    def to_dict(self) -> Dict:
        return {
            "motion": self.point.motion.value,
            "A": self.point.A,
            "W": self.point.W,
            "alpha": self.point.alpha,
        }


@dataclass(frozen=True)
class OracleReport:
    """Closed form against quadrature at one checkpoint."""

    checkpoint: Checkpoint
    closed_form: float
    oracle_value: float
    est_quadrature_error: float
    rel_deviation: float
    passed: bool

    def to_dict(self) -> Dict:
        return {
            "point": self.checkpoint.to_dict(),
            "kind": self.checkpoint.kind.value,
            "closed_form": self.closed_form,
            "oracle_value": self.oracle_value,
            "est_error": self.est_quadrature_error,
            "rel_dev": self.rel_deviation,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# Kernels


def wightman_single(sigma_hat: float, A: float, epsilon: float, n_max: int) -> complex:
    """
    Truncated image sum of the Wightman function of a uniformly accelerated detector.

    -1/(4 pi^2) sum_{|n| <= n_max} 1/(sigma - i epsilon - 2 pi i n / A)^2
    """
    n = np.arange(-n_max, n_max + 1)
    z = sigma_hat - 1j * epsilon - 2j * math.pi * n / A
    return complex(-np.sum(1.0 / (z * z)) / FOUR_PI_SQ)


def image_tail(A: float, n_max: int) -> float:
    """Leading-order value of the images with |n| > n_max dropped by wightman_single."""
    return (A / (2.0 * math.pi)) ** 2 * 2.0 * float(special.polygamma(1, n_max + 1)) / FOUR_PI_SQ


def wightman_closed(sigma_hat: float, A: float, epsilon: float) -> complex:
    """Summed form -A^2 / (16 pi^2 sinh^2(A (sigma - i epsilon)/2))."""
    return -A * A / (SIXTEEN_PI_SQ * cmath.sinh(0.5 * A * (sigma_hat - 1j * epsilon)) ** 2)


def wightman_cross(motion: MotionKind, sigma_hat: float, A: float, alpha: float, epsilon: float) -> complex:
    """
    Cross-detector Wightman kernel in units of the heating time of A.

    Parallel motion uses the sinh-sinh form with its i epsilon poles at
    sigma = +-K; anti-parallel motion uses the cosh-cosh form, which has no
    real-axis poles and is evaluated on the real axis.

    Raises:
        DegenerateKappa: For parallel motion with alpha = 1
    """
    b = A / alpha
    if motion == MotionKind.PARALLEL:
        K = kappa_hat(alpha) / A
        s = sigma_hat - 1j * epsilon
        return -A * b / (SIXTEEN_PI_SQ * cmath.sinh(0.5 * A * (s - K)) * cmath.sinh(0.5 * A * (s + K)))
    K = abs(math.log(alpha)) / A
    return complex(A * b / (SIXTEEN_PI_SQ * math.cosh(0.5 * A * (sigma_hat - K)) * math.cosh(0.5 * A * (sigma_hat + K))))


# T integrals of chi(tau) chi(tau') e^{i beta T}


def _t_integral_closed(beta: float, sigma: float) -> float:
    beta = abs(beta)
    # sin(beta sigma)/sigma = beta sinc(beta sigma / pi)
    bracket = math.cos(beta * sigma) + beta * float(np.sinc(beta * sigma / math.pi))
    return math.pi * math.exp(-beta) / (2.0 * (sigma * sigma + 1.0)) * bracket


def _t_integral_numeric(beta: float, sigma: float, half_width: float) -> float:
    def chi_chi(T: float) -> float:
        return 1.0 / ((1.0 + (T + sigma) ** 2) * (1.0 + (T - sigma) ** 2))

    if beta == 0.0:
        peaks = sorted({p for p in (-sigma, sigma) if -half_width < p < half_width})
        value, _ = integrate.quad(chi_chi, -half_width, half_width, points=peaks or None, limit=ORACLE_QUAD_LIMIT)
    else:
        value, _ = integrate.quad(chi_chi, -half_width, half_width, weight="cos", wvar=abs(beta), limit=ORACLE_QUAD_LIMIT)
    metrics.record_quad(1)
    return value


def _t_integral(mode: OracleMode, half_width: float) -> Callable[[float, float], float]:
    if mode == OracleMode.ONE_D:
        return _t_integral_closed
    return lambda beta, sigma: _t_integral_numeric(beta, sigma, half_width)


# Outer sigma integral


def _breakpoints(half_width: float, epsilon: float, centres: Sequence[float]) -> List[float]:
    points = set()
    for c in centres:
        points.add(c)
        for m in (1.0, 4.0, 16.0):
            points.update((c - m * epsilon, c + m * epsilon))
    return sorted(p for p in points if -half_width < p < half_width)


def _complex_quad(func: Callable[[float], complex], half_width: float, points: List[float], cfg: QuadratureConfig):
    memo = lru_cache(maxsize=None)(func)
    kwargs = dict(points=points or None, limit=ORACLE_QUAD_LIMIT, epsabs=1e-3 * cfg.abs_tol, epsrel=1e-3 * cfg.rel_tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        re, re_err = integrate.quad(lambda s: memo(s).real, -half_width, half_width, **kwargs)
        im, im_err = integrate.quad(lambda s: memo(s).imag, -half_width, half_width, **kwargs)
    metrics.record_quad(2, len(caught))
    for w in caught:
        logger.debug(f"quad: {w.message}")
    return complex(re, im), re_err + im_err


def _single_at_epsilon(
    detector: Detector, sign: int, point: ResponsePoint, cfg: QuadratureConfig, mode: OracleMode, epsilon: float
) -> Tuple[complex, float]:
    if detector == Detector.A:
        kernel_accel, clock = point.A, 1.0
    else:
        # tau_B = +-alpha tau_A; B's own acceleration is A/alpha
        kernel_accel = point.A / point.alpha
        clock = point.alpha if point.motion == MotionKind.PARALLEL else -point.alpha
    L = cfg.domain_half_width
    t_integral = _t_integral(mode, L)
    tail = image_tail(kernel_accel, cfg.n_max)
    eps_kernel = abs(clock) * epsilon

    def integrand(sigma: float) -> complex:
        dtau = clock * sigma
        kernel = wightman_single(dtau, kernel_accel, eps_kernel, cfg.n_max) + tail
        return t_integral(0.0, sigma) * cmath.exp(-1j * sign * point.W * dtau) * kernel

    value, err = _complex_quad(integrand, L, _breakpoints(L, epsilon, [0.0]), cfg)
    measure = 0.5 * clock * clock
    return measure * value, measure * err


def _cross_at_epsilon(
    sign: int, point: ResponsePoint, cfg: QuadratureConfig, mode: OracleMode, epsilon: float, t_memo: Callable
) -> Tuple[complex, float]:
    """P_AB(sW, -sW) at one regulator value."""
    alpha, W = point.alpha, point.W
    if point.motion == MotionKind.PARALLEL:
        sigma_rate, beta = 0.5 * (1.0 + alpha), 0.5 * (1.0 - alpha) * W
        K = kappa_hat(alpha) / point.A
        centres = [0.0, -K, K]
    else:
        sigma_rate, beta = 0.5 * (1.0 - alpha), 0.5 * (1.0 + alpha) * W
        centres = [0.0]
    L = cfg.domain_half_width

    def integrand(sigma: float) -> complex:
        kernel = wightman_cross(point.motion, sigma, point.A, alpha, epsilon).conjugate()
        return t_memo(beta, sigma) * cmath.exp(1j * sign * W * sigma_rate * sigma) * kernel

    value, err = _complex_quad(integrand, L, _breakpoints(L, epsilon, centres), cfg)
    return 0.5 * alpha * value, 0.5 * alpha * err


# Regulator extrapolation


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """
    Richardson extrapolation of values ordered from coarse to fine step.

    Assumes an error expansion in integer powers of the step, leading order 1.
    """
    n_steps = len(values)
    if n_steps == 1:
        return values[0]

    last_level = list(values)
    this_level: List[float] = []
    for m in range(1, n_steps):
        this_level = []
        mult = step_ratio**m
        factor = 1.0 / (mult - 1.0)
        for i in range(n_steps - m):
            low = last_level[i]
            high = last_level[i + 1]
            this_level.append(factor * (mult * high - low))
        last_level = this_level
    return this_level[0]


def _extrapolate(values: Sequence[complex], quad_errors: Sequence[float], cfg: QuadratureConfig, label: str):
    """Extrapolate the regulator sweep; returns (real value, error estimate)."""
    reals = [v.real for v in values]
    limit = richardson_limit(cfg.step_ratio, reals)
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(limit))

    diffs = np.diff(reals)
    for d0, d1 in zip(diffs, diffs[1:]):
        if (d0 * d1 < 0.0 and min(abs(d0), abs(d1)) > tol) or abs(d1) > abs(d0) + tol:
            metrics.record_extrapolation(diverged=True)
            raise QuadratureDivergence(f"{label}: regulator sweep is not settling: {reals}", reals)

    est_error = quad_errors[-1]
    if len(reals) > 1:
        est_error += abs(limit - richardson_limit(cfg.step_ratio, reals[1:]))

    imag = richardson_limit(cfg.step_ratio, [v.imag for v in values])
    if abs(imag) > 10.0 * cfg.abs_tol:
        metrics.record_extrapolation(diverged=True)
        raise QuadratureDivergence(f"{label}: imaginary part {imag:.3e} exceeds 10*abs_tol", reals)
    metrics.record_extrapolation()
    return limit, est_error


# Oracle values and reports


def integrate_single(
    detector: Detector,
    sign: int,
    point: ResponsePoint,
    cfg: Optional[QuadratureConfig] = None,
    mode: OracleMode = OracleMode.TWO_D,
) -> Tuple[float, float]:
    """
    Extrapolated quadrature of P_j(sign * W) for one detector.

    Returns:
        (value, estimated error)
    """
    cfg = cfg or QuadratureConfig()
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    detector = Detector(detector)
    mode = OracleMode(mode)
    values, errors = [], []
    for epsilon in cfg.epsilon_schedule:
        value, err = _single_at_epsilon(detector, sign, point, cfg, mode, epsilon)
        values.append(value)
        errors.append(err)
        logger.debug(f"P_{detector.value}({sign:+d}W) at eps={epsilon:g}: {value}")
    return _extrapolate(values, errors, cfg, f"P_{detector.value}({sign:+d}W) at {point}")


def integrate_delta_p_ab(
    point: ResponsePoint, cfg: Optional[QuadratureConfig] = None, mode: OracleMode = OracleMode.TWO_D
) -> Tuple[float, float]:
    """
    Extrapolated quadrature of P_AB(W, -W) - P_AB(-W, W).

    Raises:
        DegenerateKappa: For parallel motion with alpha = 1
    """
    cfg = cfg or QuadratureConfig()
    mode = OracleMode(mode)
    if point.motion == MotionKind.PARALLEL:
        kappa_hat(point.alpha)
    # T integral is shared by both orderings and every regulator value
    t_memo = lru_cache(maxsize=None)(_t_integral(mode, cfg.domain_half_width))

    values, errors = [], []
    for epsilon in cfg.epsilon_schedule:
        forward, forward_err = _cross_at_epsilon(1, point, cfg, mode, epsilon, t_memo)
        backward, backward_err = _cross_at_epsilon(-1, point, cfg, mode, epsilon, t_memo)
        values.append(forward - backward)
        errors.append(forward_err + backward_err)
        logger.debug(f"dP_AB at eps={epsilon:g}: {forward - backward}")
    return _extrapolate(values, errors, cfg, f"dP_AB at {point}")


def _make_report(checkpoint: Checkpoint, closed_form: float, value: float, err: float, cfg: QuadratureConfig):
    rel_dev = relative_deviation(value, closed_form)
    passed = rel_dev <= cfg.rel_tol or abs(closed_form - value) <= cfg.abs_tol
    return OracleReport(checkpoint, closed_form, value, err, rel_dev, bool(passed))


def _closed_p_a_plus(point: ResponsePoint) -> float:
    return p_a(point.A, point.W)


def _closed_p_a_minus(point: ResponsePoint) -> float:
    return p_a_neg(point.A, point.W)


def _closed_p_b_plus(point: ResponsePoint) -> float:
    return p_b(point.A, point.W, point.alpha)


def _closed_p_b_minus(point: ResponsePoint) -> float:
    return p_b_neg(point.A, point.W, point.alpha)


CLOSED_FORMS: Dict[CheckpointKind, Callable[[ResponsePoint], float]] = {
    CheckpointKind.P_A_PLUS: _closed_p_a_plus,
    CheckpointKind.P_A_MINUS: _closed_p_a_minus,
    CheckpointKind.P_B_PLUS: _closed_p_b_plus,
    CheckpointKind.P_B_MINUS: _closed_p_b_minus,
    CheckpointKind.DELTA_P_AB: delta_p_ab,
}

_SINGLE_KINDS = {
    CheckpointKind.P_A_PLUS: (Detector.A, 1),
    CheckpointKind.P_A_MINUS: (Detector.A, -1),
    CheckpointKind.P_B_PLUS: (Detector.B, 1),
    CheckpointKind.P_B_MINUS: (Detector.B, -1),
}


def _closed_form_or_nan(checkpoint: Checkpoint) -> float:
    try:
        return CLOSED_FORMS[checkpoint.kind](checkpoint.point)
    except UnruhOttoError as e:
        # Exclusion bands have no closed form; the oracle value is still reported
        logger.warning(f"No closed form for {checkpoint.kind.value} at {checkpoint.point}: {e}")
        return math.nan


def oracle_p_single(
    detector: Detector,
    sign: int,
    point: ResponsePoint,
    cfg: Optional[QuadratureConfig] = None,
    mode: OracleMode = OracleMode.TWO_D,
) -> OracleReport:
    """Compare P_A(+-W) or P_B(+-W) against its quadrature."""
    cfg = cfg or QuadratureConfig()
    kind = {value: key for key, value in _SINGLE_KINDS.items()}[(Detector(detector), sign)]
    checkpoint = Checkpoint(kind, point)
    value, err = integrate_single(detector, sign, point, cfg, mode)
    return _make_report(checkpoint, _closed_form_or_nan(checkpoint), value, err, cfg)


def oracle_delta_p_ab(
    point: ResponsePoint, cfg: Optional[QuadratureConfig] = None, mode: OracleMode = OracleMode.TWO_D
) -> OracleReport:
    """Compare the cross-detector difference against its quadrature."""
    cfg = cfg or QuadratureConfig()
    checkpoint = Checkpoint(CheckpointKind.DELTA_P_AB, point)
    value, err = integrate_delta_p_ab(point, cfg, mode)
    return _make_report(checkpoint, _closed_form_or_nan(checkpoint), value, err, cfg)


def check_checkpoint(checkpoint: Checkpoint, cfg: Optional[QuadratureConfig] = None, mode: OracleMode = OracleMode.TWO_D):
    """Run the oracle comparison matching the checkpoint kind."""
    if checkpoint.kind == CheckpointKind.DELTA_P_AB:
        return oracle_delta_p_ab(checkpoint.point, cfg, mode)
    detector, sign = _SINGLE_KINDS[checkpoint.kind]
    return oracle_p_single(detector, sign, checkpoint.point, cfg, mode)


# Checkpoint sets


def builtin_checkpoints() -> List[Checkpoint]:
    """Twelve checkpoints covering both detectors, both signs, both motions and both alpha branches."""
    par, anti = MotionKind.PARALLEL, MotionKind.ANTIPARALLEL
    K = CheckpointKind
    return [
        Checkpoint(K.P_A_PLUS, ResponsePoint(0.5, 0.2, 1.0, par)),
        Checkpoint(K.P_A_MINUS, ResponsePoint(0.5, 0.2, 1.0, par)),
        Checkpoint(K.P_A_PLUS, ResponsePoint(5.0, 1.0, 1.0, par)),
        Checkpoint(K.P_A_MINUS, ResponsePoint(5.0, 1.0, 1.0, par)),
        Checkpoint(K.P_B_PLUS, ResponsePoint(5.0, 0.2, 0.2, par)),
        Checkpoint(K.P_B_MINUS, ResponsePoint(5.0, 0.2, 0.2, par)),
        Checkpoint(K.P_B_PLUS, ResponsePoint(1.0, 0.5, 2.0, anti)),
        Checkpoint(K.P_B_MINUS, ResponsePoint(1.0, 0.5, 2.0, anti)),
        Checkpoint(K.DELTA_P_AB, ResponsePoint(1.0, 0.5, 0.5, par)),
        Checkpoint(K.DELTA_P_AB, ResponsePoint(1.0, 0.5, 2.0, par)),
        Checkpoint(K.DELTA_P_AB, ResponsePoint(3.0, 1.0, 0.3, par)),
        Checkpoint(K.DELTA_P_AB, ResponsePoint(3.0, 1.0, 3.0, par)),
    ]


def antiparallel_checkpoints() -> List[Checkpoint]:
    """Six anti-parallel cross-term checkpoints across alpha in {0.2, 1, 5}, A in {0.5, 5}, W in {0.1, 1}."""
    anti = MotionKind.ANTIPARALLEL
    grid = [(0.2, 0.5, 0.1), (0.2, 5.0, 1.0), (1.0, 0.5, 1.0), (1.0, 5.0, 0.1), (5.0, 0.5, 0.1), (5.0, 5.0, 1.0)]
    return [Checkpoint(CheckpointKind.DELTA_P_AB, ResponsePoint(A, W, alpha, anti)) for alpha, A, W in grid]


def parse_checkpoints(lines: Iterable[str]) -> List[Checkpoint]:
    """
    Parse JSON-lines checkpoints with keys kind, motion, A, W and alpha.

    Blank lines and lines starting with '#' are skipped.

    Raises:
        ValidationError: On malformed lines, unknown kinds or invalid points
    """
    checkpoints = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            record = json.loads(line)
            point = ResponsePoint(
                float(record["A"]),
                float(record["W"]),
                float(record.get("alpha", 1.0)),
                MotionKind(record.get("motion", MotionKind.PARALLEL.value)),
            )
            checkpoints.append(Checkpoint(CheckpointKind(record["kind"]), point))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"checkpoint line {lineno}: {e}") from e
    return checkpoints


def _run_one(task: Tuple[Checkpoint, QuadratureConfig, OracleMode]) -> OracleReport:
    checkpoint, cfg, mode = task
    return check_checkpoint(checkpoint, cfg, mode)


@track_performance("oracle")
def run_checkpoints(
    checkpoints: Sequence[Checkpoint],
    cfg: Optional[QuadratureConfig] = None,
    mode: OracleMode = OracleMode.TWO_D,
    workers: Optional[int] = 1,
) -> List[OracleReport]:
    """Run a checkpoint batch, in input order, across a process pool."""
    cfg = cfg or QuadratureConfig()
    mode = OracleMode(mode)
    logger.info(f"Running {len(checkpoints)} oracle checkpoints ({mode.value}, eps={cfg.epsilon_schedule})")
    reports = parallel_map(_run_one, [(c, cfg, mode) for c in checkpoints], workers)
    failed = sum(not r.passed for r in reports)
    if failed:
        logger.warning(f"{failed} of {len(reports)} oracle checkpoints failed")
    return reports
