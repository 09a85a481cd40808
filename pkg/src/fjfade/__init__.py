"""Friedkin-Johnsen opinion dynamics with a vanishing competition parameter."""

from .config import (
    ExperimentConfig,
    GraphSpec,
    ScheduleSpec,
    load_config,
    parse_config,
    serialize_config,
)
from .experiment import (
    ExperimentResult,
    RunResult,
    VerifyResult,
    run_experiment,
    tstar_report,
    verify_bounds,
    write_outputs,
)
from .bounds import (
    RateEnvelope,
    empirical_ratio,
    gap,
    lower_bound,
    lower_bound_series,
    rate_envelope,
    upper_bound,
    worst_case_initial_condition,
)
from .deviation import DeviationReport, deviation_experiment, find_tstar
from .dynamics import (
    State,
    Trajectory,
    TransitionCalculator,
    TransitionDecomposition,
    input_limit_vector,
    simulate,
    simulate_until,
    step_nonuniform,
    step_uniform,
    transition_decomposition,
)
from .errors import (
    AsymmetricWeights,
    ConfigError,
    ConsensusInitialCondition,
    ConvergenceFailure,
    DimensionMismatch,
    DisconnectedNetwork,
    FjfadeError,
    InvalidParameter,
    NonUniformUnsupported,
    NonVanishingSchedule,
    NonVanishingTail,
    NoStrictDrop,
)
from .network import (
    Network,
    SpectralData,
    WeightedNetwork,
    WeightKind,
    complete_graph,
    compute_spectral,
    generate_erdos_renyi,
    is_primitive,
    metropolis_weights,
    path_graph,
    row_stochastic_weights,
    star_graph,
)
from .schedules import (
    DEFAULT_TRUNCATION,
    CompetitionSchedule,
    InfiniteProducts,
    NonUniformSchedule,
    ScheduleKind,
    TruncationPolicy,
    constant,
    custom,
    exponential,
    hyperbolic,
    infinite_products,
    lambda_product,
    make_adversarial_nonuniform,
    make_schedule,
    partition_of_unity,
    zero_consensus,
)

__version__ = "0.1.0"
