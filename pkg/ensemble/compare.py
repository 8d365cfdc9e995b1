"""
Ensemble vs master-equation agreement check.

At every sample time the empirical ρ̄ is compared with the master
solution in trace distance, against a threshold calibrated from the
ensemble itself.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config import COMPARE_SIGMAS, MASTER_DEFAULT_DT
from ensemble.metrics import comparison_threshold, discretization_bias, trace_distance
from ensemble.runner import EnsembleResult, run_ensemble
from master.integrator import integrate_master
from master.states import HybridDensityState, pure_product
from model.hybrid import HybridModel, PureHybridState
from pdp.params import TrajectoryParams


@dataclass(eq=False)
class ComparisonReport:
    sample_times: tuple
    distances: np.ndarray
    thresholds: np.ndarray
    ensemble: EnsembleResult
    master_states: List[HybridDensityState]

    @property
    def passed(self) -> bool:
        return bool(np.all(self.distances <= self.thresholds))

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def worst(self) -> int:
        """Index of the sample time with the largest distance/threshold ratio."""
        return int(np.argmax(self.distances / np.maximum(self.thresholds, 1e-300)))


def compare_with_master(
    model: HybridModel,
    initial: PureHybridState,
    params: TrajectoryParams,
    n_trajectories: int,
    master_seed: int,
    master_dt: float = MASTER_DEFAULT_DT,
    workers: int = 1,
    progress: bool = True,
    trajectory_model: Optional[HybridModel] = None,
    sigmas: float = COMPARE_SIGMAS,
) -> ComparisonReport:
    """
    trajectory_model, when given, drives the ensemble while model drives
    the master equation (used to demonstrate that a mismatched coupling
    convention is detected).
    """
    sampler = trajectory_model or model
    ens = run_ensemble(
        sampler, initial, params, n_trajectories, master_seed,
        workers=workers, progress=progress, keep_trajectories=False,
    )

    rho0 = pure_product(initial.psi, initial.alpha, model.m)
    master = integrate_master(model, rho0, params.t_end, master_dt, params.sample_times, t0=params.t0)
    master_states = [state for _, state in master]

    bias = discretization_bias(sampler, params.scheme)
    distances = np.array([trace_distance(e, s) for e, s in zip(ens.empirical_states, master_states)])
    thresholds = np.array([
        comparison_threshold(e, n_trajectories, bias, sigmas) for e in ens.empirical_states
    ])

    report = ComparisonReport(
        sample_times=params.sample_times,
        distances=distances,
        thresholds=thresholds,
        ensemble=ens,
        master_states=master_states,
    )
    j = report.worst()
    logging.info(
        f"📊 Compare {report.verdict}: worst t={params.sample_times[j]:g} "
        f"distance={distances[j]:.4g} threshold={thresholds[j]:.4g}"
    )
    return report
