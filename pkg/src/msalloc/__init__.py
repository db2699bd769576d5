"""Storage allocation for multi-class distributed storage under probabilistic access."""

from .analysis import (
    GapThreshold,
    SweepRow,
    brute_force_msa,
    gap_threshold_p,
    monte_carlo_recovery,
    preset,
    random_msa,
    sweep,
    sweep_csv,
    upper_bound,
)
from .exact import GreedyState, greedy_step, solve_exact
from .fast import partition_classes, relaxed_allocation, round_case1, solve_fast
from .model import (
    AllocationError,
    DataClass,
    ExhaustedError,
    GeneralAllocation,
    InfeasibleError,
    MsaAllocation,
    NormalizedProblem,
    ProblemFormatError,
    ProblemInstance,
    SolveReport,
    TooLargeError,
    general_success_prob,
    min_nodes_for_qos,
    min_objective,
    msa_success_prob,
    normalize,
    problem_from_dict,
    problem_to_dict,
    weighted_sum,
)
from .supernode import (
    AccessMode,
    CapacityProfile,
    SuperNodePlacement,
    expand_independent,
    solve_correlated,
    solve_independent,
)

__version__ = "0.1.0"
