"""
Piecewise deterministic sample paths of a hybrid system.

Two schemes generate the same process:

- FixedDt: thinning on a grid of step dt. Each step draws r and jumps
  if r < λ(ψ, α)·dt, otherwise applies the normalized no-jump flow.
- NormThreshold: draws r and integrates ψ̇ = K_α ψ unnormalized until
  ‖ψ‖² first falls to r; that time is the jump time.

On a jump the destination β is drawn with weight ‖g_βα ψ‖² and the
state becomes g_βα ψ / ‖g_βα ψ‖.

Draw order per step is fixed (decision, then destination), so a run is a
deterministic function of (model, initial state, params, seed).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEAD_BRANCH_NORM_SQ,
    FIXED_DT_CHUNK,
    LAMBDA_DT_ERROR,
    LAMBDA_DT_WARN,
    NORM_RK4_STEP_BOUND,
    RATE_NEGATIVE_GUARD,
)
from linalg import expm, norm_sq, operator_norm, rk4_propagator
from model.hybrid import (
    EventRecord,
    HybridModel,
    PureHybridState,
    SectorOperators,
    sector_rate,
    sector_weights,
)
from pdp.params import FixedDt, NormThreshold, TrajectoryParams, TrajectoryResult
from pdp.rng import UniformStream
from utils.errors import (
    DeadBranch,
    DynamicsError,
    IntegrationError,
    NegativeRate,
    RunawayJumps,
    StepTooLarge,
)


# =========================================================
# HELPERS
# =========================================================

def _normalized(phi: np.ndarray) -> np.ndarray:
    nsq = norm_sq(phi)
    if not nsq > DEAD_BRANCH_NORM_SQ:
        raise DeadBranch(
            f"‖ψ‖² = {nsq:.3e} after no-jump evolution; dt too large or model pathological"
        )
    return phi / math.sqrt(nsq)


def _jump(ops: SectorOperators, a: int, psi: np.ndarray, u: float) -> Tuple[int, np.ndarray]:
    """Pick the destination sector (0-based) with weight ‖g_βα ψ‖² and apply g_βα."""
    cumulative = np.cumsum(sector_weights(ops, a, psi))
    total = cumulative[-1]
    if not total > 0.0:
        raise DynamicsError(f"jump requested from sector {a + 1} with zero total weight")
    b = int(np.searchsorted(cumulative, u * total, side="right"))
    b = min(b, len(cumulative) - 1)
    image = ops.G[b, a] @ psi
    nsq = norm_sq(image)
    if not nsq > 0.0:
        raise DynamicsError(f"jump {a + 1} → {b + 1} landed on g_βα ψ = 0")
    return b, image / math.sqrt(nsq)


@dataclass
class RateGuard:
    """λ·dt policy: warn once above LAMBDA_DT_WARN, fail above LAMBDA_DT_ERROR."""

    warned: bool = False

    def check(self, lam_dt: float, t: float) -> None:
        if lam_dt > LAMBDA_DT_ERROR:
            raise StepTooLarge(
                f"λ·dt = {lam_dt:.3g} > {LAMBDA_DT_ERROR} at t={t:.6g}; reduce dt"
            )
        if lam_dt > LAMBDA_DT_WARN and not self.warned:
            logging.warning(f"⚠️ λ·dt = {lam_dt:.3g} exceeds {LAMBDA_DT_WARN} at t={t:.6g}; thinning bias is O(λ·dt)")
            self.warned = True


# =========================================================
# ELEMENTARY OPERATIONS
# =========================================================

def evolve_no_jump(state: PureHybridState, model: HybridModel, t0: float, dt: float) -> PureHybridState:
    """ψ → exp(K_α(t0) dt) ψ / ‖·‖; α unchanged."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative (got {dt})")
    ops = model.operators_at(t0)
    phi = ops.propagator(state.alpha - 1, dt) @ state.psi
    return PureHybridState(_normalized(phi), state.alpha)


def step_fixed_dt(
    state: PureHybridState,
    model: HybridModel,
    t: float,
    dt: float,
    rng,
    guard: Optional[RateGuard] = None,
) -> Tuple[PureHybridState, Optional[EventRecord]]:
    """
    One thinning step on [t, t + dt]. A jump is stamped at t + dt, so the
    state at that grid point is already the post-jump state.
    """
    b, psi, jumped = _thinning_step(model.operators_at(t), state.alpha - 1, state.psi, t, dt, rng, guard or RateGuard())
    if jumped:
        return PureHybridState(psi, b + 1), EventRecord(t + dt, state.alpha, b + 1)
    return PureHybridState(psi, state.alpha), None


def _thinning_step(ops, a, psi, t, dt, rng, guard) -> Tuple[int, np.ndarray, bool]:
    lam = sector_rate(ops, a, psi)
    guard.check(lam * dt, t)

    r = rng.random()
    if r < lam * dt:
        b, psi = _jump(ops, a, psi, rng.random())
        return b, psi, True
    return a, _normalized(ops.propagator(a, dt) @ psi), False


# =========================================================
# NORM-THRESHOLD INTEGRATOR
# =========================================================

def _rk4_step_size(k: np.ndarray, ode_tol: float) -> float:
    """h with ‖K‖h ≤ min(0.1, (120·ode_tol)^(1/5)) (RK4 local error bound)."""
    knorm = operator_norm(k)
    if knorm == 0.0:
        return math.inf
    return min(NORM_RK4_STEP_BOUND, (120.0 * ode_tol) ** 0.2) / knorm


def _norm_segment(
    model: HybridModel,
    a: int,
    phi: np.ndarray,
    t0: float,
    r: float,
    horizon: float,
    scheme: NormThreshold,
    samples: Sequence[float] = (),
) -> Tuple[float, np.ndarray, List[Tuple[float, np.ndarray]], Optional[SectorOperators]]:
    """
    Integrate the unnormalized flow from (t0, φ) until ‖φ‖² ≤ r or the horizon.

    Returns (t_jump or +inf, φ there, [(sample time, φ)] for samples
    strictly before the jump, operators of the interval holding the
    jump). Schedule breakpoints and sample times are always step
    boundaries.
    """
    recorded: List[Tuple[float, np.ndarray]] = []
    pending = [s for s in samples if s >= t0]
    # ‖φ‖² starts at 1, so a threshold of 1 or more is never crossed from above
    crossable = r < 1.0
    t = t0

    while True:
        while pending and pending[0] <= t:
            recorded.append((pending.pop(0), phi.copy()))
        if t >= horizon:
            return math.inf, phi, recorded, None

        ops = model.operators_at(t)
        k = ops.K[a]
        stop = min(model.next_breakpoint(t), horizon)
        if pending:
            stop = min(stop, pending[0])

        if ops.dark[a]:
            # no dissipation: the norm is constant on this interval
            phi = expm(k, stop - t) @ phi
            t = stop
            continue

        h_nom = _rk4_step_size(k, scheme.ode_tol)
        n_sub = max(1, math.ceil((stop - t) / h_nom))
        h = (stop - t) / n_sub
        step = rk4_propagator(k, h)

        for i in range(n_sub):
            nxt = step @ phi
            if not np.all(np.isfinite(nxt)):
                raise IntegrationError(f"non-finite state at t={t + i * h:.6g}")
            if crossable and norm_sq(nxt) <= r:
                t_start = t + i * h
                tau = _bisect_crossing(k, phi, r, h, scheme.root_tol)
                return t_start + tau, rk4_propagator(k, tau) @ phi, recorded, ops
            phi = nxt
        t = stop


def _bisect_crossing(k: np.ndarray, phi: np.ndarray, r: float, h: float, root_tol: float) -> float:
    """Smallest τ ∈ (0, h] (to root_tol) with ‖RK4(τ)φ‖² ≤ r."""
    lo, hi = 0.0, h
    while hi - lo > root_tol:
        mid = 0.5 * (lo + hi)
        if norm_sq(rk4_propagator(k, mid) @ phi) <= r:
            hi = mid
        else:
            lo = mid
    return hi


def sample_jump_time_norm_method(
    state: PureHybridState,
    model: HybridModel,
    t0: float,
    r: float,
    params: TrajectoryParams,
) -> Tuple[float, np.ndarray]:
    """
    Jump time from the norm-threshold rule, and the unnormalized ψ there.

    Returns (+inf, ψ(t_end)) when ‖ψ‖² stays above r up to params.t_end.
    r = 1 counts as no jump yet rather than a jump at t0.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError(f"threshold r must lie in (0, 1] (got {r})")
    scheme = params.scheme if isinstance(params.scheme, NormThreshold) else NormThreshold()
    t_jump, phi, _, _ = _norm_segment(model, state.alpha - 1, state.psi.copy(), t0, r, params.t_end, scheme)
    return t_jump, phi


# =========================================================
# TRAJECTORIES
# =========================================================

def run_trajectory(
    model: HybridModel,
    initial: PureHybridState,
    params: TrajectoryParams,
    seed: int,
    trajectory_index: int = 0,
    rng=None,
) -> TrajectoryResult:
    """
    One sample path from initial up to params.t_end.

    The random stream is Philox keyed by (seed, trajectory_index) unless
    an rng exposing random() is injected.
    """
    if initial.psi.shape != (model.n,):
        raise ValueError(f"initial ψ has dimension {initial.psi.shape[0]}, model has n={model.n}")
    if not 1 <= initial.alpha <= model.m:
        raise ValueError(f"initial α={initial.alpha} outside 1..{model.m}")

    rng = rng or UniformStream(seed, trajectory_index)
    if isinstance(params.scheme, FixedDt):
        events, snapshots, final, t_final = _run_fixed_dt(model, initial, params, rng)
    else:
        events, snapshots, final, t_final = _run_norm_threshold(model, initial, params, rng)

    return TrajectoryResult(
        events=events,
        snapshots=snapshots,
        seed=seed,
        scheme=params.scheme.describe(),
        trajectory_index=trajectory_index,
        final=final,
        t_final=t_final,
    )


def _check_event_budget(events: List[EventRecord], params: TrajectoryParams) -> None:
    if len(events) > params.max_events:
        raise RunawayJumps(f"more than {params.max_events} events before t_end={params.t_end}")


def _sample_step(s: float, t0: float, dt: float, n_steps: int, grid) -> int:
    """Grid index nearest to sample time s; t_end maps to the (possibly short) last step."""
    k = min(n_steps, int(round((s - t0) / dt)))
    if k < n_steps and abs(grid(k + 1) - s) < abs(s - grid(k)):
        k += 1
    return k


def _rate_block(lam_op: np.ndarray, phi: np.ndarray, nsq: np.ndarray) -> np.ndarray:
    """λ(φ_j / ‖φ_j‖) for each row of phi, with the negative-rate guard."""
    lam = np.einsum("ji,ik,jk->j", phi.conj(), lam_op, phi).real / nsq
    low = lam.min(initial=0.0)
    if low < 0.0:
        if low < -RATE_NEGATIVE_GUARD:
            raise NegativeRate(f"⟨ψ, Λψ⟩ = {low:.3e} < 0; Λ is not positive")
        lam = np.maximum(lam, 0.0)
    return lam


def _run_fixed_dt(model, initial, params, rng):
    dt = params.scheme.dt
    t0, t_end = params.t0, params.t_end
    n_steps = max(1, math.ceil((t_end - t0) / dt - 1e-9))

    def grid(k: int) -> float:
        return min(t0 + k * dt, t_end)

    sample_steps = [_sample_step(s, t0, dt, n_steps, grid) for s in params.sample_times]
    blocked = hasattr(rng, "peek")
    guard = RateGuard()
    events: List[EventRecord] = []
    snapshots: List[Tuple[float, PureHybridState]] = []
    psi, a = initial.psi, initial.alpha - 1
    si = 0
    k = 0

    def record(k_now: int) -> None:
        nonlocal si
        while si < len(sample_steps) and sample_steps[si] <= k_now:
            snapshots.append((params.sample_times[si], PureHybridState(psi, a + 1)))
            si += 1

    def jumped_to(b: int, t_event: float) -> None:
        nonlocal a
        events.append(EventRecord(t_event, a + 1, b + 1))
        _check_event_budget(events, params)
        a = b

    record(0)
    while k < n_steps:
        t = grid(k)
        ops = model.operators_at(t)

        # steps up to the next breakpoint or sample share one operator bundle
        k_stop = n_steps
        bp = model.next_breakpoint(t)
        if bp < t_end:
            k_stop = min(k_stop, max(math.ceil((bp - t0) / dt - 1e-9), k + 1))
        if si < len(sample_steps):
            k_stop = min(k_stop, max(sample_steps[si], k + 1))

        # ---------- DARK SECTOR: no draws, exact flow ----------
        if ops.dark[a]:
            psi = _normalized(expm(ops.K[a], grid(k_stop) - t) @ psi)
            k = k_stop
            record(k)
            continue

        # ---------- SINGLE STEP: short last step or injected rng ----------
        if k == n_steps - 1 or not blocked:
            h = dt if k + 1 < n_steps else t_end - t
            b, psi, jumped = _thinning_step(ops, a, psi, t, h, rng, guard)
            k += 1
            if jumped:
                jumped_to(b, t + h)
            record(k)
            continue

        # ---------- BLOCK: up to FIXED_DT_CHUNK full steps at once ----------
        span = min(k_stop, n_steps - 1) - k
        span = min(span, FIXED_DT_CHUNK)
        phi = ops.propagator_powers(a, dt)[: span + 1] @ psi
        nsq = np.einsum("ji,ji->j", phi.conj(), phi).real
        lam_dt = _rate_block(ops.Lam[a], phi[:span], nsq[:span]) * dt
        hits = np.flatnonzero(rng.peek(span) < lam_dt)
        used = int(hits[0]) + 1 if hits.size else span

        over = np.flatnonzero(lam_dt[:used] > LAMBDA_DT_WARN)
        if over.size:
            guard.check(lam_dt[over[0]], grid(k + over[0]))
            worst = over[lam_dt[over] > LAMBDA_DT_ERROR]
            if worst.size:
                guard.check(lam_dt[worst[0]], grid(k + worst[0]))

        rng.skip(used)
        if hits.size:
            j = used - 1
            b, psi = _jump(ops, a, _normalized(phi[j]), rng.random())
            jumped_to(b, grid(k + j) + dt)
        else:
            psi = _normalized(phi[span])
        k += used
        record(k)

    return events, snapshots, PureHybridState(psi, a + 1), t_end


def _run_norm_threshold(model, initial, params, rng):
    scheme: NormThreshold = params.scheme
    t_end = params.t_end
    events: List[EventRecord] = []
    snapshots: List[Tuple[float, PureHybridState]] = []
    pending = list(params.sample_times)

    t = params.t0
    alpha = initial.alpha
    psi = initial.psi

    while True:
        r = rng.random()
        while r == 0.0 or r >= 1.0:
            logging.debug(f"redrawing threshold r = {r}")
            r = rng.random()

        t_jump, phi, seen, ops = _norm_segment(model, alpha - 1, psi, t, r, t_end, scheme, pending)
        for s, phi_s in seen:
            snapshots.append((s, PureHybridState(_normalized(phi_s), alpha)))
        pending = pending[len(seen):]

        if math.isinf(t_jump):
            final = PureHybridState(_normalized(phi), alpha)
            return events, snapshots, final, t_end

        b, psi = _jump(ops, alpha - 1, _normalized(phi), rng.random())
        events.append(EventRecord(t_jump, alpha, b + 1))
        _check_event_budget(events, params)
        alpha = b + 1
        t = t_jump
