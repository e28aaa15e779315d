from .runner import (
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
    ClassCounts,
    Discipline,
    Estimate,
    ReplicationRecord,
    SimConfig,
    SimMetrics,
    default_horizon,
    replication_seeds,
    run_replication,
    run_simulation,
)
from .validation import (
    EXACT_PAIRS,
    LittleCheck,
    MetricCheck,
    PairingError,
    ValidationReport,
    little_checks,
    validate,
    z_score,
)
