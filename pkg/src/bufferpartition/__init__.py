"""Two-class threshold-partitioned priority buffer: CTMC analysis, WGoS
threshold optimisation and discrete-event simulation."""

from .metrics import METRIC_NAMES, ClassMetrics, class_metrics, loss_probabilities, mean_counts, mean_delays
from .model import (
    BufferConfig,
    ConfigError,
    Generator,
    GeneratorMode,
    State,
    StateSpace,
    TrafficParams,
    build_generator,
    build_state_space,
)
from .solver import NumericalError, SteadyState, gth_solve, solve_steady_state, verify_residual
from .wgos import (
    CostWeights,
    DegenerateTrafficError,
    SweepResult,
    SweepRow,
    UndefinedDelayError,
    WGoSResult,
    evaluate,
    sweep_threshold,
    wgos_gamma,
)

__version__ = "0.1.0"
