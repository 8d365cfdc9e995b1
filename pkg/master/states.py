"""
Hybrid statistical states ρ = diag(ρ_1, …, ρ_m) and hybrid observables
A = diag(A_1, …, A_m), stored as (m, n, n) complex arrays.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from config import EXPECTATION_IMAG_TOL, POSITIVITY_TOL, STATE_HERMITIAN_TOL
from linalg import identity, is_hermitian, min_eigenvalue
from utils.errors import DimensionMismatch, InvariantViolation


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True, eq=False)
class HybridDensityState:
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=np.complex128)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise DimensionMismatch("hybrid state", "(m, n, n)", c.shape)
        object.__setattr__(self, "components", c)

    @property
    def m(self) -> int:
        return self.components.shape[0]

    @property
    def n(self) -> int:
        return self.components.shape[1]

    def total_trace(self) -> float:
        return float(np.real(np.einsum("aii->", self.components)))

    def check(self, trace_tol: float = STATE_HERMITIAN_TOL, positivity_tol: float = POSITIVITY_TOL) -> None:
        """Raise InvariantViolation unless Hermitian, PSD and trace-1."""
        for a, block in enumerate(self.components):
            if not is_hermitian(block, STATE_HERMITIAN_TOL):
                raise InvariantViolation(f"ρ_{a + 1} is not Hermitian")
            low = min_eigenvalue(block)
            if low < -positivity_tol:
                raise InvariantViolation(f"ρ_{a + 1} has eigenvalue {low:.3e} < −{positivity_tol:g}")
        if abs(self.total_trace() - 1.0) > trace_tol:
            raise InvariantViolation(f"Σ_α Tr ρ_α = {self.total_trace():.12g} ≠ 1")


@dataclass(frozen=True, eq=False)
class HybridObservable:
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=np.complex128)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise DimensionMismatch("hybrid observable", "(m, n, n)", c.shape)
        for a, block in enumerate(c):
            if not is_hermitian(block, STATE_HERMITIAN_TOL):
                raise InvariantViolation(f"A_{a + 1} is not Hermitian")
        object.__setattr__(self, "components", c)


# =========================================================
# CONSTRUCTORS
# =========================================================

def pure_product(psi, alpha: int, m: int) -> HybridDensityState:
    """|ψ⟩⟨ψ| placed in sector α (1-based), zero elsewhere."""
    psi = np.asarray(psi, dtype=np.complex128)
    blocks = np.zeros((m, psi.shape[0], psi.shape[0]), dtype=np.complex128)
    blocks[alpha - 1] = np.outer(psi, psi.conj())
    return HybridDensityState(blocks)


def from_components(components) -> HybridDensityState:
    """Validated state from explicit (m, n, n) components."""
    state = HybridDensityState(components)
    state.check()
    return state


def identity_observable(n: int, m: int) -> HybridObservable:
    return HybridObservable(np.broadcast_to(identity(n), (m, n, n)).copy())


def classical_observable(f: Sequence[float], n: int) -> HybridObservable:
    """A_α = f_α I."""
    f = np.asarray(f, dtype=np.float64)
    return HybridObservable(f[:, None, None] * identity(n)[None])


def pointer_observable(beta: int, n: int, m: int) -> HybridObservable:
    """δ_αβ I: the probability of finding the classical system in β."""
    f = np.zeros(m)
    f[beta - 1] = 1.0
    return classical_observable(f, n)


def quantum_observable(a, m: int) -> HybridObservable:
    """The same quantum operator in every sector."""
    a = np.asarray(a, dtype=np.complex128)
    return HybridObservable(np.broadcast_to(a, (m,) + a.shape).copy())


# =========================================================
# DUALITY / REDUCTIONS
# =========================================================

def expectation(A: HybridObservable, rho: HybridDensityState) -> float:
    """⟨A⟩_ρ = Σ_α Tr(A_α ρ_α)."""
    if A.components.shape != rho.components.shape:
        raise DimensionMismatch("expectation", A.components.shape, rho.components.shape)
    value = np.einsum("aij,aji->", A.components, rho.components)
    if abs(value.imag) > EXPECTATION_IMAG_TOL * max(1.0, abs(value.real)):
        raise InvariantViolation(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def reduce_quantum(rho: HybridDensityState) -> np.ndarray:
    """ρ̂ = Σ_α ρ_α."""
    return rho.components.sum(axis=0)


def reduce_classical(rho: HybridDensityState) -> np.ndarray:
    """p_α = Tr ρ_α."""
    return np.real(np.einsum("aii->a", rho.components))


def purity(rho: HybridDensityState) -> float:
    """Σ_α Tr(ρ_α²); 1 for a pure hybrid state."""
    return float(np.real(np.einsum("aij,aji->", rho.components, rho.components)))
