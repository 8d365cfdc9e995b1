"""
Sample-Path Engine Test

Evaluator intent:
- No-jump flow, forced jumps and norm-threshold crossings match closed forms
- Same seed MUST give a bit-identical trajectory
- Both jump-time schemes produce the same exponential law
"""

import math
import time

import numpy as np
import pytest

from config import FIXED_DT_CHUNK, PROPAGATOR_CACHE_SIZE, RNG_BLOCK_SIZE
from ensemble.statistics import ks_exponential, ks_two_sample
from linalg import SIGMA_X, expm
from model import PureHybridState, builtin_model, zero_coupling_model
from pdp import (
    FixedDt,
    NormThreshold,
    TrajectoryParams,
    UniformStream,
    evolve_no_jump,
    first_event_times,
    run_trajectory,
    sample_jump_time_norm_method,
    step_fixed_dt,
)
from utils.errors import RunawayJumps, StepTooLarge


class ScriptedDraws:
    """Replays fixed uniforms in order."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def _detector(omega=0.0, kappa=1.0):
    return builtin_model("qubit-detector", {"omega": omega, "kappa": kappa})


def _first_times(model, psi, scheme, n, t_end=30.0, seed=11):
    params = TrajectoryParams(scheme=scheme, t_end=t_end, sample_times=(t_end,))
    start = PureHybridState(np.asarray(psi, dtype=complex), 1)
    results = [run_trajectory(model, start, params, seed, trajectory_index=i) for i in range(n)]
    return first_event_times(results, (1, 2))


# ---------- elementary steps ----------

def test_no_jump_flow_closed_forms():
    closed = zero_coupling_model([SIGMA_X])
    out = evolve_no_jump(PureHybridState([1, 0], 1), closed, 0.0, math.pi / 2)
    assert np.allclose(out.psi, [0, -1j], atol=1e-12)

    model = _detector()
    dark = evolve_no_jump(PureHybridState([1, 0], 1), model, 0.0, 0.7)
    assert np.allclose(dark.psi, [1, 0])

    a, b = 0.6, 0.8
    dt = 0.4
    out = evolve_no_jump(PureHybridState([a, b], 1), model, 0.0, dt)
    expected = np.array([a, b * math.exp(-dt / 2)])
    assert np.allclose(out.psi, expected / np.linalg.norm(expected))
    assert out.alpha == 1


def test_forced_jump_projects_onto_detected_state():
    model = _detector()
    state, event = step_fixed_dt(PureHybridState([0, 1], 1), model, 0.0, 1e-3, ScriptedDraws([0.0, 0.5]))
    assert event is not None
    assert (event.from_alpha, event.to_alpha) == (1, 2)
    assert event.time == pytest.approx(1e-3)
    assert np.allclose(state.psi, [0, 1])
    assert state.alpha == 2


def test_clicked_sector_never_jumps():
    model = _detector()
    state = PureHybridState([0, 1], 2)
    for _ in range(50):
        state, event = step_fixed_dt(state, model, 0.0, 1e-2, ScriptedDraws([0.0]))
        assert event is None


def test_step_too_large_refused():
    model = _detector(kappa=100.0)
    with pytest.raises(StepTooLarge):
        step_fixed_dt(PureHybridState([0, 1], 1), model, 0.0, 0.01, ScriptedDraws([0.9]))


def test_norm_threshold_crossing_time():
    model = _detector()
    params = TrajectoryParams(scheme=NormThreshold(), t_end=10.0)
    t_jump, phi = sample_jump_time_norm_method(PureHybridState([0, 1], 1), model, 0.0, 0.5, params)
    assert t_jump == pytest.approx(math.log(2), abs=1e-6)
    assert np.vdot(phi, phi).real == pytest.approx(0.5, abs=1e-7)


def test_norm_threshold_without_dissipation_never_jumps():
    params = TrajectoryParams(scheme=NormThreshold(), t_end=5.0)
    closed = zero_coupling_model([SIGMA_X, SIGMA_X])
    t_jump, _ = sample_jump_time_norm_method(PureHybridState([1, 0], 1), closed, 0.0, 0.5, params)
    assert math.isinf(t_jump)

    t_jump, _ = sample_jump_time_norm_method(PureHybridState([1, 0], 1), _detector(), 0.0, 0.5, params)
    assert math.isinf(t_jump)


def test_unit_threshold_is_no_jump_yet():
    params = TrajectoryParams(scheme=NormThreshold(), t_end=2.0)
    t_jump, phi = sample_jump_time_norm_method(PureHybridState([0, 1], 1), _detector(), 0.0, 1.0, params)
    assert math.isinf(t_jump)
    assert np.vdot(phi, phi).real == pytest.approx(math.exp(-2.0), abs=1e-7)
    with pytest.raises(ValueError):
        sample_jump_time_norm_method(PureHybridState([0, 1], 1), _detector(), 0.0, 1.5, params)


def test_propagator_cache_stays_bounded():
    model = _detector(omega=1.0)
    state = PureHybridState([1, 0], 1)
    for i in range(50):
        state = evolve_no_jump(state, model, 0.0, 1e-3 * (i + 1))
    assert len(model.operators_at(0.0)._propagators) <= PROPAGATOR_CACHE_SIZE


# ---------- whole trajectories ----------

def test_closed_system_follows_unitary_evolution():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = 0.5 * (a + a.conj().T)
        model = zero_coupling_model([H])
        psi0 = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi0 /= np.linalg.norm(psi0)
        exact = expm(-1j * H, 1.0) @ psi0
        for scheme in (FixedDt(1e-3), NormThreshold()):
            params = TrajectoryParams(scheme=scheme, t_end=1.0, sample_times=(1.0,))
            result = run_trajectory(model, PureHybridState(psi0, 1), params, seed=5)
            assert result.events == []
            final = result.snapshots[-1][1].psi
            assert abs(np.vdot(exact, final)) ** 2 >= 1 - 1e-8


def test_dark_sector_draws_nothing():
    model = _detector()
    params = TrajectoryParams(scheme=FixedDt(1e-3), t_end=2.0, sample_times=(0.0, 1.0, 2.0))
    rng = UniformStream(1)
    result = run_trajectory(model, PureHybridState([0, 1], 2), params, seed=1, rng=rng)
    assert rng.draws == 0
    assert len(result.snapshots) == 3
    assert result.events == []


def test_same_seed_is_bit_identical():
    model = _detector(omega=1.0)
    for scheme in (FixedDt(1e-3), NormThreshold()):
        params = TrajectoryParams(scheme=scheme, t_end=3.0, sample_times=(0.5, 1.0, 3.0))
        start = PureHybridState([1, 0], 1)
        a = run_trajectory(model, start, params, seed=99, trajectory_index=4)
        b = run_trajectory(model, start, params, seed=99, trajectory_index=4)
        assert a.identical_to(b)


def test_streams_are_independent_of_block_size():
    small = UniformStream(5, 3, block_size=7)
    large = UniformStream(5, 3, block_size=RNG_BLOCK_SIZE)
    assert [small.random() for _ in range(40)] == [large.random() for _ in range(40)]
    assert UniformStream(5, 3).random() != UniformStream(5, 4).random()


def test_snapshots_land_on_sample_times():
    model = _detector(omega=1.0)
    times = (0.0, 0.25, 1.0, 2.0)
    for scheme in (FixedDt(1e-3), NormThreshold()):
        params = TrajectoryParams(scheme=scheme, t_end=2.0, sample_times=times)
        result = run_trajectory(model, PureHybridState([1, 0], 1), params, seed=2)
        assert tuple(t for t, _ in result.snapshots) == times
        for _, s in result.snapshots:
            assert np.vdot(s.psi, s.psi).real == pytest.approx(1.0, abs=1e-9)


def test_event_budget_enforced():
    model = builtin_model("random", {"n": 2, "m": 2, "seed": 1})
    params = TrajectoryParams(scheme=NormThreshold(), t_end=50.0, max_events=3)
    with pytest.raises(RunawayJumps):
        run_trajectory(model, PureHybridState([1, 0], 1), params, seed=0)


def test_feedback_switch_freezes_after_first_event():
    model = builtin_model("feedback-switch", {"omega": 1.0, "omega_prime": 0.0})
    times = tuple(np.round(np.linspace(0.0, 6.0, 25), 10))
    params = TrajectoryParams(scheme=FixedDt(1e-3), t_end=6.0, sample_times=times)
    for i in range(40):
        result = run_trajectory(model, PureHybridState([1, 0], 1), params, seed=21, trajectory_index=i)
        for t, s in result.snapshots:
            if s.alpha == 2:
                # post-click state is |1⟩ and nothing drives it away
                assert np.allclose(np.abs(s.psi), [0, 1], atol=1e-12)


@pytest.mark.parametrize("dt", [0.3, 3e-3])
def test_snapshot_at_t_end_after_short_last_step(dt):
    closed = zero_coupling_model([SIGMA_X])
    psi0 = np.array([1, 0], dtype=complex)
    params = TrajectoryParams(scheme=FixedDt(dt), t_end=1.0, sample_times=(1.0,))
    result = run_trajectory(closed, PureHybridState(psi0, 1), params, seed=0)
    exact = expm(-1j * SIGMA_X, 1.0) @ psi0
    t, snap = result.snapshots[-1]
    assert t == 1.0
    assert abs(np.vdot(exact, snap.psi)) ** 2 >= 1 - 1e-8
    assert np.array_equal(snap.psi, result.final.psi)


def test_snapshot_at_t_end_matches_final_state_with_jumps():
    model = _detector(omega=1.0, kappa=0.2)
    params = TrajectoryParams(scheme=FixedDt(0.3), t_end=1.0, sample_times=(0.3, 1.0))
    for i in range(20):
        result = run_trajectory(model, PureHybridState([1, 0], 1), params, seed=8, trajectory_index=i)
        t, snap = result.snapshots[-1]
        assert t == 1.0
        assert snap.alpha == result.final.alpha
        assert np.array_equal(snap.psi, result.final.psi)


def test_blocked_run_matches_single_steps():
    model = builtin_model("random", {"n": 2, "m": 2, "seed": 3})
    dt, t_end = 1e-3, 5.0
    params = TrajectoryParams(scheme=FixedDt(dt), t_end=t_end)
    start = PureHybridState([1, 0], 1)
    result = run_trajectory(model, start, params, seed=17, trajectory_index=2)

    rng = UniformStream(17, 2)
    n_steps = math.ceil(t_end / dt - 1e-9)
    state, events = start, []
    for k in range(n_steps):
        t = min(k * dt, t_end)
        h = dt if k + 1 < n_steps else t_end - t
        state, event = step_fixed_dt(state, model, t, h, rng)
        if event is not None:
            events.append(event)

    assert len(result.events) == len(events) >= 1
    for got, want in zip(result.events, events):
        assert (got.from_alpha, got.to_alpha) == (want.from_alpha, want.to_alpha)
        assert got.time == pytest.approx(want.time, rel=1e-12)
    assert result.final.alpha == state.alpha
    assert np.allclose(result.final.psi, state.psi, atol=1e-9)


def test_peeked_draws_are_the_same_stream():
    a, b = UniformStream(4, 1), UniformStream(4, 1)
    ahead = b.peek(FIXED_DT_CHUNK + 10).copy()
    assert [a.random() for _ in range(FIXED_DT_CHUNK + 10)] == list(ahead)
    b.skip(5)
    assert b.draws == 5
    assert b.random() == ahead[5]


@pytest.mark.slow
def test_fixed_dt_trajectory_cost():
    model = _detector(omega=1.0)
    params = TrajectoryParams(scheme=FixedDt(1e-3), t_end=2.0, sample_times=(0.5, 1.0, 2.0))
    start = PureHybridState([1, 0], 1)
    n = 2000
    began = time.perf_counter()
    for i in range(n):
        run_trajectory(model, start, params, seed=7, trajectory_index=i)
    per_trajectory = (time.perf_counter() - began) / n
    # 20,000 trajectories within two minutes on one core
    assert per_trajectory < 120.0 / 20_000


# ---------- exponential law ----------

def test_exponential_first_event_law_fixed_dt():
    n = 2000
    times = _first_times(_detector(), [0, 1], FixedDt(1e-3), n)
    assert len(times) == n
    assert times.mean() == pytest.approx(1.0, abs=3.0 / math.sqrt(n) + 1e-3)
    assert ks_exponential(times, 1.0).passed


def test_exponential_first_event_law_norm_threshold():
    n = 2000
    times = _first_times(_detector(kappa=2.0), [0, 1], NormThreshold(), n)
    assert times.mean() == pytest.approx(0.5, abs=3.0 * 0.5 / math.sqrt(n))
    assert ks_exponential(times, 2.0).passed


@pytest.mark.slow
@pytest.mark.parametrize("omega", [0.0, 1.0])
def test_schemes_agree_on_first_event_times(omega):
    n = 10_000
    a = _first_times(_detector(omega=omega), [0, 1], FixedDt(1e-3), n, t_end=40.0, seed=1)
    b = _first_times(_detector(omega=omega), [0, 1], NormThreshold(), n, t_end=40.0, seed=2)
    assert ks_two_sample(a, b).passed


@pytest.mark.slow
def test_exponential_law_full_scale():
    n = 10_000
    times = _first_times(_detector(), [0, 1], FixedDt(1e-3), n)
    assert times.mean() == pytest.approx(1.0, abs=0.03)
    assert ks_exponential(times, 1.0).passed
