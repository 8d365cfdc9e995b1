"""
Ensemble driver.

Runs N independent trajectories (optionally across worker processes)
and forms the empirical hybrid density operator at each sample time:

    ρ̄_α(s) = (1/N) Σ_i [α_i(s) = α] |ψ_i(s)⟩⟨ψ_i(s)|

Trajectory i always uses the stream keyed by (master_seed, i) and the
sums are reduced pairwise in index order, so the result does not depend
on the worker count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from master.states import HybridDensityState
from model.hybrid import HybridModel, PureHybridState
from pdp.engine import run_trajectory
from pdp.params import TrajectoryParams, TrajectoryResult
from utils.errors import EEQTError, TrajectoryFailure


LEAF_SIZE = 64
BLOCKS_PER_WORKER = 4


@dataclass(eq=False)
class EnsembleResult:
    n_trajectories: int
    sample_times: Tuple[float, ...]
    empirical_states: List[HybridDensityState]
    occupation_counts: np.ndarray            # (S, m) integer counts
    event_log_summary: Dict[Tuple[int, int], List[float]]
    master_seed: int
    scheme: Dict
    trajectories: List[TrajectoryResult] = field(default_factory=list)

    def occupation(self) -> np.ndarray:
        """Classical occupation frequencies, (S, m)."""
        return self.occupation_counts / self.n_trajectories


# ---------- worker ----------

def _run_block(args) -> List[TrajectoryResult]:
    model, initial, params, master_seed, start, stop = args
    out = []
    for i in range(start, stop):
        try:
            out.append(run_trajectory(model, initial, params, master_seed, trajectory_index=i))
        except EEQTError as e:
            raise TrajectoryFailure(i, e) from e
    return out


def _blocks(n: int, workers: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(n / (max(workers, 1) * BLOCKS_PER_WORKER)))
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


# ---------- deterministic reduction ----------

def _leaf_sum(results: Sequence[TrajectoryResult], j: int, m: int, n: int) -> np.ndarray:
    acc = np.zeros((m, n, n), dtype=np.complex128)
    for r in results:
        state = r.snapshots[j][1]
        acc[state.alpha - 1] += np.outer(state.psi, state.psi.conj())
    return acc


def _tree_sum(results: Sequence[TrajectoryResult], j: int, m: int, n: int) -> np.ndarray:
    if len(results) <= LEAF_SIZE:
        return _leaf_sum(results, j, m, n)
    mid = len(results) // 2
    return _tree_sum(results[:mid], j, m, n) + _tree_sum(results[mid:], j, m, n)


def empirical_state(results: Sequence[TrajectoryResult], j: int, m: int, n: int) -> HybridDensityState:
    """Empirical ρ̄ at the j-th sample time of an index-ordered result list."""
    return HybridDensityState(_tree_sum(results, j, m, n) / len(results))


def _event_log(results: Sequence[TrajectoryResult]) -> Dict[Tuple[int, int], List[float]]:
    log: Dict[Tuple[int, int], List[float]] = {}
    for r in results:
        for ev in r.events:
            log.setdefault((ev.from_alpha, ev.to_alpha), []).append(ev.time)
    return log


# =========================================================
# PUBLIC
# =========================================================

def run_ensemble(
    model: HybridModel,
    initial: PureHybridState,
    params: TrajectoryParams,
    n_trajectories: int,
    master_seed: int,
    workers: int = 1,
    progress: bool = True,
    keep_trajectories: bool = True,
) -> EnsembleResult:
    if n_trajectories < 1:
        raise ValueError(f"n_trajectories must be ≥ 1 (got {n_trajectories})")
    if not params.sample_times:
        raise ValueError("ensemble runs need at least one sample time")

    blocks = _blocks(n_trajectories, workers)
    tasks = [(model, initial, params, master_seed, lo, hi) for lo, hi in blocks]
    bar = tqdm(total=n_trajectories, disable=not progress, desc="trajectories", unit="traj")

    logging.info(
        f"🚀 Ensemble: N={n_trajectories}, workers={workers}, "
        f"scheme={params.scheme.name}, seed={master_seed}"
    )

    results: List[TrajectoryResult] = []
    try:
        if workers <= 1:
            for task in tasks:
                chunk = _run_block(task)
                results.extend(chunk)
                bar.update(len(chunk))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                # map preserves submission order
                for chunk in pool.map(_run_block, tasks):
                    results.extend(chunk)
                    bar.update(len(chunk))
    finally:
        bar.close()

    m, n = model.m, model.n
    states = [empirical_state(results, j, m, n) for j in range(len(params.sample_times))]

    counts = np.zeros((len(params.sample_times), m), dtype=np.int64)
    for r in results:
        for j, (_, s) in enumerate(r.snapshots):
            counts[j, s.alpha - 1] += 1

    log = _event_log(results)
    logging.info(f"✅ Ensemble done: {sum(len(v) for v in log.values())} events recorded")

    return EnsembleResult(
        n_trajectories=n_trajectories,
        sample_times=params.sample_times,
        empirical_states=states,
        occupation_counts=counts,
        event_log_summary=log,
        master_seed=master_seed,
        scheme=params.scheme.describe(),
        trajectories=results if keep_trajectories else [],
    )
