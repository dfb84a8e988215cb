"""
Unruh Otto Engine

Closed-form responses, cycle feasibility and a quadrature oracle for a quantum
Otto engine run on an entangled pair of uniformly accelerated detectors.
"""

__version__ = "1.0.0"

from .cycle import (  # noqa: E402
    CycleAssessment,
    EngineParams,
    EntangledState,
    assess,
    classify_scenarios,
    epsilon0,
    trace_at_epsilon0,
    trace_quantity,
)
from .errors import (  # noqa: E402
    DegenerateKappa,
    DomainError,
    NearSingularA,
    NoConvergence,
    NonPositiveOmega1,
    QuadratureDivergence,
    SingularOffset,
    UnderdeterminedOmega1,
    UnruhOttoError,
    ValidationError,
)
from .kinematics import ClockConvention, MotionKind  # noqa: E402
from .response import ResponsePoint, ResponseSet, delta_p_ab, p_a, p_a_neg, p_b, p_b_neg, response_set  # noqa: E402
from .specfun import lerch_phi  # noqa: E402

__all__ = [
    "__version__",
    "lerch_phi",
    "MotionKind",
    "ClockConvention",
    "ResponsePoint",
    "ResponseSet",
    "p_a",
    "p_a_neg",
    "p_b",
    "p_b_neg",
    "delta_p_ab",
    "response_set",
    "EntangledState",
    "EngineParams",
    "CycleAssessment",
    "trace_quantity",
    "assess",
    "epsilon0",
    "trace_at_epsilon0",
    "classify_scenarios",
    "UnruhOttoError",
    "DomainError",
    "ValidationError",
    "SingularOffset",
    "NoConvergence",
    "DegenerateKappa",
    "NearSingularA",
    "UnderdeterminedOmega1",
    "NonPositiveOmega1",
    "QuadratureDivergence",
]
