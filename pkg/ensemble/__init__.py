"""
Ensemble package.

Many-trajectory runs, empirical hybrid states, event statistics and the
comparison against the master-equation solution.
"""

from ensemble.compare import ComparisonReport, compare_with_master
from ensemble.metrics import comparison_threshold, discretization_bias, trace_distance
from ensemble.runner import EnsembleResult, empirical_state, run_ensemble
from ensemble.statistics import (
    ChannelStatistics,
    EventStatistics,
    KSResult,
    event_statistics,
    ks_exponential,
    ks_two_sample,
)

__all__ = [
    "ChannelStatistics",
    "ComparisonReport",
    "EnsembleResult",
    "EventStatistics",
    "KSResult",
    "compare_with_master",
    "comparison_threshold",
    "discretization_bias",
    "empirical_state",
    "event_statistics",
    "ks_exponential",
    "ks_two_sample",
    "run_ensemble",
    "trace_distance",
]
