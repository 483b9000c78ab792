"""Unateness property testing on the Boolean hypercube.

A function f: {0,1}^n -> R (R totally ordered; integers here) is unate when
every coordinate is either monotone or anti-monotone.  This package bundles

* a one-sided, non-adaptive randomized tester whose query budget is
  O((n/eps) log(n/eps)), with exact query accounting,
* exact small-n oracles: violation profiles, distance to an orientation's
  order, and distance to unateness via minimum vertex cover,
* the analysis-side quantities (bucket decomposition of violation masses,
  exact rejection probability), and
* a CLI for running tests, distances, and seeded Monte Carlo experiments.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .hypercube import (
    MAX_TABLE_DIM,
    HypercubeFunction,
    ViolationProfile,
    is_b_monotone,
    is_unate,
    orientation_bits,
    partial_derivative,
    point_flip,
    violation_profile,
)
from .oracles import (
    BudgetExhaustedError,
    FunctionOracle,
    GeneratorSpec,
    TableFormatError,
    from_callable,
    from_table,
    gen_constant,
    gen_dictator,
    gen_parity,
    gen_planted_far,
    gen_random_table,
    gen_weighted_threshold,
    load_table,
    store_table,
    weighted_threshold_oracle,
)
from .tester import (
    BucketDecomposition,
    RejectionAnalysis,
    TesterReport,
    TesterSchedule,
    Witness,
    as_fraction,
    build_schedule,
    check_witness,
    dimension_hit_probability,
    levin_buckets,
    rejection_probability_exact,
    run_round,
    schedule_query_bound,
    unate_test,
)
from .exact import (
    DEFAULT_DIMENSION_CAP,
    CapExceededError,
    DimensionReductionReport,
    DistanceReport,
    ViolationGraph,
    apply_repair,
    distance_to_b_monotone,
    distance_to_unate,
    distance_upper_bound,
    min_vertex_cover,
    verify_dimension_reduction,
    violation_graph,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "MAX_TABLE_DIM",
    "HypercubeFunction",
    "ViolationProfile",
    "is_b_monotone",
    "is_unate",
    "orientation_bits",
    "partial_derivative",
    "point_flip",
    "violation_profile",
    "BudgetExhaustedError",
    "FunctionOracle",
    "GeneratorSpec",
    "TableFormatError",
    "from_callable",
    "from_table",
    "gen_constant",
    "gen_dictator",
    "gen_parity",
    "gen_planted_far",
    "gen_random_table",
    "gen_weighted_threshold",
    "load_table",
    "store_table",
    "weighted_threshold_oracle",
    "BucketDecomposition",
    "RejectionAnalysis",
    "TesterReport",
    "TesterSchedule",
    "Witness",
    "as_fraction",
    "build_schedule",
    "check_witness",
    "dimension_hit_probability",
    "levin_buckets",
    "rejection_probability_exact",
    "run_round",
    "schedule_query_bound",
    "unate_test",
    "DEFAULT_DIMENSION_CAP",
    "CapExceededError",
    "DimensionReductionReport",
    "DistanceReport",
    "ViolationGraph",
    "apply_repair",
    "distance_to_b_monotone",
    "distance_to_unate",
    "distance_upper_bound",
    "min_vertex_cover",
    "verify_dimension_reduction",
    "violation_graph",
]
