"""Shared constants for the Unruh Otto engine numerics"""

import math

# Degeneracy tolerance for alpha == 1 detection (shared by kinematics, response, cycle)
ALPHA_DEGENERACY_TOL = 1e-9

# Half-width of the masked band around A = 2*pi*n, n >= 1
SINGULAR_A_RADIUS = 0.05

# Smallest W/A the Lerch sums are asked to converge for
MIN_W_OVER_A = 1e-4

# Lerch transcendent evaluation
LERCH_DEFAULT_REL_TOL = 1e-12
LERCH_MIN_REL_TOL = 1e-14
LERCH_MAX_REL_TOL = 1e-3
LERCH_TERM_BUDGET = 10_000_000
LERCH_CHUNK_SIZE = 4096
LERCH_ACCELERATION_THRESHOLD = 0.9  # z above this gets Aitken passes
LERCH_SINGULAR_OFFSET_TOL = 1e-9

# Normalization tolerance for (b1, b2)
STATE_NORM_TOL = 1e-12
MAXIMAL_ENTANGLEMENT_TOL = 1e-12

INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Oracle defaults
ORACLE_EPSILON_SCHEDULE = (0.05, 0.025, 0.0125)
ORACLE_N_MAX = 200
ORACLE_DOMAIN_HALF_WIDTH = 20.0
ORACLE_REL_TOL = 1e-2
ORACLE_ABS_TOL = 1e-6
ORACLE_QUAD_LIMIT = 400  # subintervals per scipy quad call

# Output
FLOAT_SIGNIFICANT_DIGITS = 9
CSV_COMMENT_PREFIX = "# "

# Response cache entries (frozen ResponsePoint -> ResponseSet)
RESPONSE_CACHE_SIZE = 65536

# Threshold reference rows: (W, alpha_H, A, epsilon0, trace)
THRESHOLD_ROWS = (
    (0.1, 2.0, 10.0, 0.0104596, 4.62253e-5),
    (0.1, 2.0, 20.0, 0.00546493, 2.41518e-5),
    (0.1, 2.0, 30.0, 0.00367563, 1.62441e-5),
    (0.1, 2.0, 40.0, 0.00276543, 1.22216e-5),
    (0.1, 2.0, 50.0, 0.0022156, 9.79166e-6),
    (0.01, 2.0, 10.0, 0.00104626, 4.62368e-7),
    (0.01, 2.0, 20.0, 0.000546536, 2.41537e-7),
    (0.01, 2.0, 30.0, 0.000367576, 1.62447e-7),
    (0.01, 2.0, 40.0, 0.000276548, 1.22218e-7),
    (0.01, 2.0, 50.0, 0.000221563, 9.7918e-8),
)
THRESHOLD_EPSILON_SIG_FIGS = 5
THRESHOLD_TRACE_REL_TOL = 1e-2

# Scenario reference: (motion, state class) -> all criteria satisfiable?
SCENARIO_EXPECTED = {
    ("parallel", "symmetric"): False,
    ("parallel", "antisymmetric"): False,
    ("parallel", "non_maximal"): False,
    ("antiparallel", "symmetric"): False,
    ("antiparallel", "antisymmetric"): False,
    ("antiparallel", "non_maximal"): True,
}

# Default scenario grid
SCENARIO_A_RANGE = (0.1, 10.0)
SCENARIO_W_RANGE = (0.05, 2.0)
SCENARIO_STEPS = 40
SCENARIO_ALPHA_H = (0.2, 0.5, 1.0, 1.2, 1.5, 2.0)
SCENARIO_NONMAX_B2 = 0.9

# Environment variable prefix for settings
ENV_PREFIX = "UNRUH_OTTO_"
