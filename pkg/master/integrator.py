"""
Fixed-step RK4 integration of the hybrid Liouville and Heisenberg
equations.

Step boundaries always include schedule breakpoints and requested
sample times; between them the step is the largest h ≤ dt that divides
the interval evenly. Components are symmetrized after every step. The
total trace is monitored and never renormalized.
"""

import math
from typing import Callable, List, Sequence, Tuple

import numpy as np

from config import STATE_HERMITIAN_TOL, TRACE_DRIFT_TOL
from master.liouville import heisenberg_generator, schrodinger_generator
from master.states import HybridDensityState, HybridObservable
from model.hybrid import HybridModel, SectorOperators
from utils.errors import TraceDriftExceeded


Generator = Callable[[SectorOperators, np.ndarray], np.ndarray]


def _symmetrize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))


def _stops(model: HybridModel, t0: float, t_end: float, sample_times: Sequence[float]) -> List[float]:
    points = {t_end}
    points.update(b for b in model.breakpoints() if t0 < b < t_end)
    points.update(s for s in sample_times if t0 < s < t_end)
    return sorted(points)


def _rk4_evolve(
    generator: Generator,
    model: HybridModel,
    y0: np.ndarray,
    t0: float,
    t_end: float,
    dt: float,
    sample_times: Sequence[float],
    after_step: Callable[[float, np.ndarray], None],
) -> List[Tuple[float, np.ndarray]]:
    if not dt > 0:
        raise ValueError(f"dt must be positive (got {dt})")
    if any(s < t0 or s > t_end for s in sample_times):
        raise ValueError("sample_times must lie in [t0, t_end]")

    wanted = sorted(set(float(s) for s in sample_times))
    outputs: List[Tuple[float, np.ndarray]] = []
    y = y0.copy()
    t = t0

    if wanted and wanted[0] == t0:
        outputs.append((t0, y.copy()))

    for stop in _stops(model, t0, t_end, wanted):
        ops = model.operators_at(t)
        n_sub = max(1, math.ceil((stop - t) / dt - 1e-9))
        h = (stop - t) / n_sub
        for i in range(n_sub):
            k1 = generator(ops, y)
            k2 = generator(ops, y + 0.5 * h * k1)
            k3 = generator(ops, y + 0.5 * h * k2)
            k4 = generator(ops, y + h * k3)
            y = _symmetrize(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            after_step(t + (i + 1) * h, y)
        t = stop
        if wanted and stop in wanted:
            outputs.append((stop, y.copy()))

    return outputs


def integrate_master(
    model: HybridModel,
    rho0: HybridDensityState,
    t_end: float,
    dt: float,
    sample_times: Sequence[float],
    t0: float = 0.0,
) -> List[Tuple[float, HybridDensityState]]:
    """ρ(t) at every sample time; raises TraceDriftExceeded / InvariantViolation."""
    rho0.check()
    trace0 = rho0.total_trace()

    def monitor(t: float, y: np.ndarray) -> None:
        drift = abs(float(np.real(np.einsum("aii->", y))) - trace0)
        if drift > TRACE_DRIFT_TOL:
            raise TraceDriftExceeded(f"total trace drifted by {drift:.3e} at t={t:.6g}")

    raw = _rk4_evolve(schrodinger_generator, model, rho0.components, t0, t_end, dt, sample_times, monitor)
    out = []
    for t, y in raw:
        state = HybridDensityState(y)
        state.check(trace_tol=STATE_HERMITIAN_TOL + TRACE_DRIFT_TOL)
        out.append((t, state))
    return out


def integrate_heisenberg(
    model: HybridModel,
    A0: HybridObservable,
    t_end: float,
    dt: float,
    sample_times: Sequence[float],
    t0: float = 0.0,
) -> List[Tuple[float, HybridObservable]]:
    """
    A(t) under Ȧ = L⋆(A). For constant schedules ⟨A(t)⟩_ρ(0) = ⟨A(0)⟩_ρ(t).
    """
    raw = _rk4_evolve(heisenberg_generator, model, A0.components, t0, t_end, dt, sample_times, lambda t, y: None)
    return [(t, HybridObservable(y)) for t, y in raw]
