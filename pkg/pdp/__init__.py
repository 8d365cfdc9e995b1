"""
Piecewise deterministic process package.

Individual-system sample paths: fixed-dt thinning and norm-threshold
jump times, counter-based per-trajectory random streams.
"""

from pdp.engine import (
    RateGuard,
    evolve_no_jump,
    run_trajectory,
    sample_jump_time_norm_method,
    step_fixed_dt,
)
from pdp.params import FixedDt, NormThreshold, TrajectoryParams, TrajectoryResult, first_event_times
from pdp.rng import UniformStream, trajectory_seed_sequence

__all__ = [
    "FixedDt",
    "NormThreshold",
    "RateGuard",
    "TrajectoryParams",
    "TrajectoryResult",
    "UniformStream",
    "evolve_no_jump",
    "first_event_times",
    "run_trajectory",
    "sample_jump_time_norm_method",
    "step_fixed_dt",
    "trajectory_seed_sequence",
]
