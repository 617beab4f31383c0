"""Abstract system framework: configurations, aggregator, slow versions and trajectories."""

from .engine import (
    BatchStep,
    Outcome,
    SystemSpec,
    Trajectory,
    UpdatingRule,
    iter_batch,
    make_system,
    run_trajectory,
)
from .rng import UniformStream, replication_seed, replication_seeds, splitmix64, uniforms_at
from .schedules import (
    Constant,
    Harmonic,
    HazardBoundSequence,
    Product,
    SlowingSchedule,
    TheoremOne,
    theorem1_slowing_constant,
)
from .types import (
    Configuration,
    OptimalSet,
    aggregate,
    aggregate_rows,
    renormalize_rows,
    simplex_grid,
    slow_rows,
    slow_step,
)

__all__ = [
    "BatchStep",
    "Configuration",
    "Constant",
    "Harmonic",
    "HazardBoundSequence",
    "OptimalSet",
    "Outcome",
    "Product",
    "SlowingSchedule",
    "SystemSpec",
    "TheoremOne",
    "Trajectory",
    "UniformStream",
    "UpdatingRule",
    "aggregate",
    "aggregate_rows",
    "iter_batch",
    "make_system",
    "renormalize_rows",
    "replication_seed",
    "replication_seeds",
    "run_trajectory",
    "simplex_grid",
    "slow_rows",
    "slow_step",
    "splitmix64",
    "theorem1_slowing_constant",
    "uniforms_at",
]
