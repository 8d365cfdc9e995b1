"""
Built-in experiment library.

Each builder takes a parameter dict and returns a validated HybridModel.
Basis convention for qubits: |0⟩ = (1, 0), |1⟩ = (0, 1). The detector
reads out |1⟩; the counter chain reads out the α-th basis vector.
"""

import math
from typing import Callable, Dict, Mapping

import numpy as np

from linalg import SIGMA_X, projector
from model.hybrid import HybridModel, build_model, coupling_array
from model.schedule import PiecewiseConstant
from utils.errors import ModelError, UnknownModel


# =========================================================
# DEFAULT PARAMETERS
# =========================================================

DEFAULTS: Dict[str, Dict[str, float]] = {
    "qubit-detector": {"omega": 1.0, "kappa": 1.0},
    "feedback-switch": {"omega": 1.0, "omega_prime": 0.0, "kappa": 1.0},
    "n-level-counter": {"n": 2, "omega": 0.0, "kappa": 1.0},
    "branching-detector": {"omega": 0.0, "kappa_a": 1.0, "kappa_b": 1.0},
    "gated-detector": {"omega": 1.0, "kappa": 1.0, "t_on": 0.5, "t_off": math.inf},
    "random": {"n": 2, "m": 2, "seed": 0, "norm": 2.0},
}


def _params(name: str, given: Mapping) -> Dict[str, float]:
    merged = dict(DEFAULTS[name])
    unknown = set(given) - set(merged)
    if unknown:
        raise ModelError(f"{name}: unknown parameters {sorted(unknown)}")
    merged.update(given)
    return merged


def _sqrt_rate(kappa: float, name: str = "kappa") -> float:
    if kappa < 0:
        raise ModelError(f"{name} must be non-negative (got {kappa})")
    return math.sqrt(kappa)


# =========================================================
# BUILDERS
# =========================================================

def qubit_detector(p: Mapping) -> HybridModel:
    """Yes–no counter watching |1⟩ of a Rabi-driven qubit."""
    h = 0.5 * p["omega"] * SIGMA_X
    g21 = _sqrt_rate(p["kappa"]) * projector(1, 2)
    return build_model(
        2, 2,
        np.stack([h, h]),
        coupling_array(2, 2, {(2, 1): g21}),
        labels=("ready", "clicked"),
    )


def feedback_switch(p: Mapping) -> HybridModel:
    """Qubit detector whose drive changes to Ω′ once the counter has clicked."""
    h1 = 0.5 * p["omega"] * SIGMA_X
    h2 = 0.5 * p["omega_prime"] * SIGMA_X
    g21 = _sqrt_rate(p["kappa"]) * projector(1, 2)
    return build_model(
        2, 2,
        np.stack([h1, h2]),
        coupling_array(2, 2, {(2, 1): g21}),
        labels=("ready", "switched"),
    )


def n_level_counter(p: Mapping) -> HybridModel:
    """
    n-level system with an (n+1)-state counter chain.

    g_{α+1,α} = √κ |α⟩⟨α| (α-th basis vector); sector n+1 is absorbing.
    The drive is nearest-neighbour hopping of strength Ω/2.
    """
    n = int(p["n"])
    if n < 1:
        raise ModelError("n-level-counter needs n ≥ 1")
    m = n + 1
    hop = np.zeros((n, n), dtype=np.complex128)
    for k in range(n - 1):
        hop[k, k + 1] = hop[k + 1, k] = 0.5 * p["omega"]
    root = _sqrt_rate(p["kappa"])
    pairs = {(a + 1, a): root * projector(a - 1, n) for a in range(1, n + 1)}
    return build_model(
        n, m,
        np.stack([hop] * m),
        coupling_array(n, m, pairs),
        labels=tuple(f"count-{k}" for k in range(m)),
    )


def branching_detector(p: Mapping) -> HybridModel:
    """Two counters competing for the same projector P = |1⟩⟨1|."""
    h = 0.5 * p["omega"] * SIGMA_X
    P = projector(1, 2)
    pairs = {
        (2, 1): _sqrt_rate(p["kappa_a"], "kappa_a") * P,
        (3, 1): _sqrt_rate(p["kappa_b"], "kappa_b") * P,
    }
    return build_model(
        2, 3,
        np.stack([h, h, h]),
        coupling_array(2, 3, pairs),
        labels=("ready", "counter-a", "counter-b"),
    )


def gated_detector(p: Mapping) -> HybridModel:
    """Qubit detector whose coupling is on only during [t_on, t_off)."""
    t_on, t_off = float(p["t_on"]), float(p["t_off"])
    if not 0.0 < t_on < t_off:
        raise ModelError("gated-detector needs 0 < t_on < t_off")
    h = 0.5 * p["omega"] * SIGMA_X
    on = coupling_array(2, 2, {(2, 1): _sqrt_rate(p["kappa"]) * projector(1, 2)})
    off = np.zeros_like(on)
    breakpoints = [0.0, t_on]
    values = [off, on]
    if math.isfinite(t_off):
        breakpoints.append(t_off)
        values.append(off)
    return build_model(
        2, 2,
        np.stack([h, h]),
        PiecewiseConstant(tuple(breakpoints), tuple(values)),
        labels=("ready", "clicked"),
    )


def random_model(p: Mapping) -> HybridModel:
    """
    Seeded random valid model: Hermitian H_α and off-diagonal g_βα,
    each scaled to operator norm ≤ norm.
    """
    n, m = int(p["n"]), int(p["m"])
    bound = float(p["norm"])
    rng = np.random.default_rng(int(p["seed"]))

    def rand_matrix():
        return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))

    def scaled(a):
        s = np.linalg.norm(a, 2)
        return a if s == 0 else a * (bound * rng.uniform(0.2, 1.0) / s)

    hs = []
    for _ in range(m):
        a = rand_matrix()
        hs.append(scaled(0.5 * (a + a.conj().T)))
    pairs = {}
    for b in range(1, m + 1):
        for a in range(1, m + 1):
            if a != b:
                pairs[(b, a)] = scaled(rand_matrix())
    return build_model(n, m, np.stack(hs), coupling_array(n, m, pairs))


# =========================================================
# REGISTRY
# =========================================================

BUILDERS: Dict[str, Callable[[Mapping], HybridModel]] = {
    "qubit-detector": qubit_detector,
    "feedback-switch": feedback_switch,
    "n-level-counter": n_level_counter,
    "branching-detector": branching_detector,
    "gated-detector": gated_detector,
    "random": random_model,
}


def builtin_model(name: str, parameters: Mapping = None) -> HybridModel:
    if name not in BUILDERS:
        raise UnknownModel(name, BUILDERS)
    return BUILDERS[name](_params(name, parameters or {}))


def zero_coupling_model(hamiltonians) -> HybridModel:
    """Closed-system model: m = len(hamiltonians), V = 0."""
    hs = np.asarray(hamiltonians, dtype=np.complex128)
    m, n, _ = hs.shape
    return build_model(n, m, hs, np.zeros((m, m, n, n), dtype=np.complex128))

