"""
Hybrid quantum–classical model: Hamiltonian family H = diag(H_α),
coupling matrix V = (g_βα), and the derived damping operators Λ_α and
effective generators K_α.

Index convention (documented once, asserted by the duality tests):
g_βα maps the α-sector into the β-sector, i.e. it effects the event
α → β. Internally couplings are stored as G[β-1, α-1] = g_βα.
All public functions take 1-based classical indices.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import (
    FIXED_DT_CHUNK,
    HERMITIAN_TOL,
    PROPAGATOR_CACHE_SIZE,
    RATE_NEGATIVE_GUARD,
    UNIT_NORM_TOL,
)
from linalg import expm, is_hermitian, norm_sq, operator_norm
from model.schedule import Schedule, as_schedule
from utils.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    ModelError,
    NegativeRate,
    NoJumpPossible,
    NonFiniteInput,
    NonHermitianHamiltonian,
    NonzeroDiagonalCoupling,
)


# =========================================================
# STATE CARRIERS
# =========================================================

@dataclass(frozen=True, eq=False)
class PureHybridState:
    """(ψ, α) with ‖ψ‖ = 1; α is 1-based."""

    psi: np.ndarray
    alpha: int

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=np.complex128)
        if psi.ndim != 1:
            raise DimensionMismatch("psi", "(n,)", psi.shape)
        if abs(norm_sq(psi) - 1.0) > UNIT_NORM_TOL:
            raise ModelError(f"state vector not normalized: ‖ψ‖² = {norm_sq(psi):.12g}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "alpha", int(self.alpha))


@dataclass(frozen=True)
class EventRecord:
    time: float
    from_alpha: int
    to_alpha: int

    def __post_init__(self):
        if self.from_alpha == self.to_alpha:
            raise ModelError(f"event must change the classical state (got {self.from_alpha} → {self.to_alpha})")


# =========================================================
# PER-INTERVAL OPERATOR BUNDLE
# =========================================================

@dataclass(eq=False)
class SectorOperators:
    """
    Operators valid on one schedule interval (0-based sector axis).

    H: (m, n, n)   G: (m, m, n, n) with G[b, a] = g_{b+1, a+1}
    Lam: (m, n, n) K: (m, n, n)
    """

    H: np.ndarray
    G: np.ndarray
    Lam: np.ndarray
    K: np.ndarray
    dark: np.ndarray
    _propagators: Dict[Tuple[int, float], np.ndarray] = field(default_factory=dict, repr=False)
    _powers: Dict[Tuple[int, float], np.ndarray] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, H: np.ndarray, G: np.ndarray) -> "SectorOperators":
        lam = np.einsum("baji,bajk->aik", G.conj(), G)
        lam = 0.5 * (lam + np.conj(np.swapaxes(lam, 1, 2)))
        K = -1j * H - 0.5 * lam
        dark = np.array([not np.any(G[:, a]) for a in range(G.shape[1])])
        return cls(H=H, G=G, Lam=lam, K=K, dark=dark)

    def propagator(self, a: int, dt: float) -> np.ndarray:
        """exp(K_a dt); one-off step sizes are not kept once the cache is full."""
        key = (a, float(dt))
        prop = self._propagators.get(key)
        if prop is None:
            prop = expm(self.K[a], dt)
            if len(self._propagators) < PROPAGATOR_CACHE_SIZE:
                self._propagators[key] = prop
        return prop

    def propagator_powers(self, a: int, dt: float) -> np.ndarray:
        """P^j for j = 0..FIXED_DT_CHUNK with P = exp(K_a dt), shape (chunk + 1, n, n)."""
        key = (a, float(dt))
        powers = self._powers.get(key)
        if powers is None:
            prop = self.propagator(a, dt)
            powers = np.empty((FIXED_DT_CHUNK + 1,) + prop.shape, dtype=np.complex128)
            powers[0] = np.eye(prop.shape[0])
            for j in range(1, FIXED_DT_CHUNK + 1):
                powers[j] = prop @ powers[j - 1]
            if len(self._powers) < PROPAGATOR_CACHE_SIZE:
                self._powers[key] = powers
        return powers

    def max_rate(self) -> float:
        return max((operator_norm(l) for l in self.Lam), default=0.0)


# =========================================================
# MODEL
# =========================================================

@dataclass(eq=False)
class HybridModel:
    n: int
    m: int
    hamiltonians: Schedule
    couplings: Schedule
    labels: Optional[Tuple[str, ...]] = None
    _cache: Dict[Tuple[int, int], SectorOperators] = field(default_factory=dict, repr=False)

    # -----------------------------------------------------
    # SCHEDULE ACCESS
    # -----------------------------------------------------

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(sorted(set(self.hamiltonians.breakpoints) | set(self.couplings.breakpoints)))

    def next_breakpoint(self, t: float) -> float:
        for b in self.breakpoints():
            if b > t:
                return b
        return math.inf

    def operators_at(self, t: float) -> SectorOperators:
        key = (self.hamiltonians.interval_index(t), self.couplings.interval_index(t))
        ops = self._cache.get(key)
        if ops is None:
            ops = SectorOperators.build(
                self.hamiltonians.evaluate(t),
                self.couplings.evaluate(t),
            )
            self._cache[key] = ops
        return ops

    def is_constant(self) -> bool:
        return not self.breakpoints()

    # -----------------------------------------------------
    # DESCRIPTIONS
    # -----------------------------------------------------

    def label(self, alpha: int) -> str:
        if self.labels:
            return self.labels[alpha - 1]
        return str(alpha)

    def event_channels(self) -> List[Dict]:
        """All m² − m ordered pairs α → β, flagged active if some g_βα ≠ 0."""
        channels = []
        for a in range(self.m):
            for b in range(self.m):
                if a == b:
                    continue
                active = any(np.any(G[b, a]) for G in self.couplings.values)
                channels.append({"from_alpha": a + 1, "to_alpha": b + 1, "active": bool(active)})
        return channels

    def with_transposed_couplings(self) -> "HybridModel":
        """Swap source and destination of every coupling (debugging mutation)."""
        return HybridModel(
            n=self.n,
            m=self.m,
            hamiltonians=self.hamiltonians,
            couplings=self.couplings.map(lambda G: np.ascontiguousarray(np.swapaxes(G, 0, 1))),
            labels=self.labels,
        )

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state


# =========================================================
# BUILD + VALIDATE
# =========================================================

def coupling_array(n: int, m: int, pairs: Dict[Tuple[int, int], np.ndarray]) -> np.ndarray:
    """
    Dense (m, m, n, n) array from {(to_alpha, from_alpha): g} with 1-based keys.
    """
    G = np.zeros((m, m, n, n), dtype=np.complex128)
    for (to_alpha, from_alpha), g in pairs.items():
        G[to_alpha - 1, from_alpha - 1] = np.asarray(g, dtype=np.complex128)
    return G


def build_model(
    n: int,
    m: int,
    hamiltonians,
    couplings,
    labels: Optional[Sequence[str]] = None,
) -> HybridModel:
    if n < 1 or m < 1:
        raise DimensionMismatch("model", "n ≥ 1, m ≥ 1", (n, m))

    h_sched = as_schedule(hamiltonians)
    g_sched = as_schedule(couplings)

    if labels is not None and len(labels) != m:
        raise DimensionMismatch("labels", m, len(labels))

    check_times = sorted(set(h_sched.validation_times()) | set(g_sched.validation_times()))
    for t in check_times:
        _validate_hamiltonians(h_sched.evaluate(t), n, m, t)
        _validate_couplings(g_sched.evaluate(t), n, m, t)

    return HybridModel(
        n=n,
        m=m,
        hamiltonians=h_sched,
        couplings=g_sched,
        labels=tuple(labels) if labels is not None else None,
    )


def _validate_hamiltonians(H: np.ndarray, n: int, m: int, t: float) -> None:
    if H.shape != (m, n, n):
        raise DimensionMismatch("hamiltonians", (m, n, n), H.shape)
    if not np.all(np.isfinite(H)):
        raise NonFiniteInput("hamiltonians contain NaN or Inf")
    for a in range(m):
        if not is_hermitian(H[a], HERMITIAN_TOL):
            raise NonHermitianHamiltonian(a + 1, t)


def _validate_couplings(G: np.ndarray, n: int, m: int, t: float) -> None:
    if G.shape != (m, m, n, n):
        raise DimensionMismatch("couplings", (m, m, n, n), G.shape)
    if not np.all(np.isfinite(G)):
        raise NonFiniteInput("couplings contain NaN or Inf")
    for a in range(m):
        if np.any(G[a, a] != 0):
            raise NonzeroDiagonalCoupling(a + 1, t)


# =========================================================
# DERIVED OPERATORS
# =========================================================

def _sector(model: HybridModel, alpha: int) -> int:
    if not 1 <= alpha <= model.m:
        raise IndexOutOfRange(alpha, model.m)
    return alpha - 1


def lambda_operator(model: HybridModel, alpha: int, t: float = 0.0) -> np.ndarray:
    """Λ_α(t) = Σ_β g_βα⋆ g_βα (couplings jumping out of α)."""
    a = _sector(model, alpha)
    return model.operators_at(t).Lam[a].copy()


def effective_generator(model: HybridModel, alpha: int, t: float = 0.0) -> np.ndarray:
    """K_α(t) = −i H_α(t) − ½ Λ_α(t)."""
    a = _sector(model, alpha)
    return model.operators_at(t).K[a].copy()


def sector_rate(ops: SectorOperators, a: int, psi: np.ndarray) -> float:
    lam = float(np.real(np.vdot(psi, ops.Lam[a] @ psi)))
    if lam < 0.0:
        if lam >= -RATE_NEGATIVE_GUARD:
            return 0.0
        raise NegativeRate(f"⟨ψ, Λ_{a + 1} ψ⟩ = {lam:.3e} < 0; Λ is not positive")
    return lam


def sector_weights(ops: SectorOperators, a: int, psi: np.ndarray) -> np.ndarray:
    """Unnormalized destination weights ‖g_βα ψ‖² for every β."""
    images = ops.G[:, a] @ psi
    return np.real(np.einsum("bi,bi->b", images.conj(), images))


def jump_rate(model: HybridModel, psi, alpha: int, t: float = 0.0) -> float:
    a = _sector(model, alpha)
    psi = np.asarray(psi, dtype=np.complex128)
    if abs(norm_sq(psi) - 1.0) > UNIT_NORM_TOL:
        raise ModelError("jump_rate requires a unit vector")
    return sector_rate(model.operators_at(t), a, psi)


def jump_probabilities(model: HybridModel, psi, alpha: int, t: float = 0.0) -> np.ndarray:
    """p_β = ‖g_βα ψ‖² / λ(ψ, α), indexed β − 1."""
    a = _sector(model, alpha)
    psi = np.asarray(psi, dtype=np.complex128)
    ops = model.operators_at(t)
    lam = sector_rate(ops, a, psi)
    if lam <= 0.0:
        raise NoJumpPossible(f"λ(ψ, {alpha}) = 0: no event can occur")
    probs = sector_weights(ops, a, psi) / lam
    probs[a] = 0.0
    return probs
