"""Learning-augmented online bipartite matching under random arrival order.

The package follows advice (a predicted profile of online vertex types)
while it cheaply tests, from a with-replacement sample gathered on the fly,
whether the real arrival distribution is close enough to the prediction to
keep trusting it; otherwise it falls back to a worst-case baseline on the
remaining input.
"""

from .errors import InvariantViolation, OracleSizeError, ValidationError
from .estimator import (
    EstimatorConfig,
    PaddedDomain,
    SampleOutcome,
    build_padded_domain,
    default_delta_prime,
    draw_sample_size,
    estimate_l1,
    expected_sample_size,
    sample_size_limit,
)
from .graph import (
    Instance,
    MatchingPlan,
    TypeProfile,
    VertexType,
    brute_force_matching,
    expand_profile,
    maximum_matching,
    profile_from_json,
    profile_to_json,
    validate_plan,
)
from .harness import (
    CellSummary,
    ExperimentResult,
    ExperimentSpec,
    TrialRecord,
    generate_instance,
    remaining_opt_concentration,
    run_cell,
    run_experiment,
    run_trial,
    smoothness_bound,
    smoothness_curve,
    write_summary_csv,
    write_trials_csv,
)
from .online import (
    DEFAULT_BETA,
    Greedy,
    Mimic,
    Phase,
    Ranking,
    ReplacementSampler,
    RunResult,
    TestAndMatch,
    default_epsilon,
    run_online,
    switch_threshold,
)
from .predictions import (
    PredictionPair,
    l1_counts,
    l1_distribution,
    pair_from_json,
    pair_to_json,
    perturb,
    unpredicted_count,
    upper_bound_opt,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BETA",
    "CellSummary",
    "EstimatorConfig",
    "ExperimentResult",
    "ExperimentSpec",
    "Greedy",
    "Instance",
    "InvariantViolation",
    "MatchingPlan",
    "Mimic",
    "OracleSizeError",
    "PaddedDomain",
    "Phase",
    "PredictionPair",
    "Ranking",
    "ReplacementSampler",
    "RunResult",
    "SampleOutcome",
    "TestAndMatch",
    "TrialRecord",
    "TypeProfile",
    "ValidationError",
    "VertexType",
    "brute_force_matching",
    "build_padded_domain",
    "default_delta_prime",
    "default_epsilon",
    "draw_sample_size",
    "estimate_l1",
    "expand_profile",
    "expected_sample_size",
    "generate_instance",
    "l1_counts",
    "l1_distribution",
    "maximum_matching",
    "pair_from_json",
    "pair_to_json",
    "perturb",
    "profile_from_json",
    "profile_to_json",
    "remaining_opt_concentration",
    "run_cell",
    "run_experiment",
    "run_online",
    "run_trial",
    "sample_size_limit",
    "smoothness_bound",
    "smoothness_curve",
    "switch_threshold",
    "unpredicted_count",
    "upper_bound_opt",
    "validate_plan",
    "write_summary_csv",
    "write_trials_csv",
]
