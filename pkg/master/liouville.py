"""
Right-hand sides of the hybrid Lindblad equation, component form.

Schrödinger picture:
    ρ̇_α = −i[H_α, ρ_α] + Σ_β g_αβ ρ_β g_αβ⋆ − ½{Λ_α, ρ_α}
Heisenberg picture:
    Ȧ_α = i[H_α, A_α] + Σ_β g_βα⋆ A_β g_βα − ½{Λ_α, A_α}
with Λ_α = Σ_β g_βα⋆ g_βα.

Both operate on raw (m, n, n) arrays for the integrator; the typed
wrappers accept HybridDensityState / HybridObservable.
"""

import numpy as np

from master.states import HybridDensityState, HybridObservable
from model.hybrid import HybridModel, SectorOperators


def schrodinger_generator(ops: SectorOperators, rho: np.ndarray) -> np.ndarray:
    H, G, lam = ops.H, ops.G, ops.Lam
    unitary = -1j * (H @ rho - rho @ H)
    gain = np.einsum("abij,bjk,ablk->ail", G, rho, G.conj())
    loss = -0.5 * (lam @ rho + rho @ lam)
    return unitary + gain + loss


def heisenberg_generator(ops: SectorOperators, A: np.ndarray) -> np.ndarray:
    H, G, lam = ops.H, ops.G, ops.Lam
    unitary = 1j * (H @ A - A @ H)
    gain = np.einsum("baji,bjk,bakl->ail", G.conj(), A, G)
    loss = -0.5 * (lam @ A + A @ lam)
    return unitary + gain + loss


def liouville_rhs(model: HybridModel, rho: HybridDensityState, t: float = 0.0) -> np.ndarray:
    """dρ/dt as an (m, n, n) array with Hermitian, jointly traceless components."""
    return schrodinger_generator(model.operators_at(t), rho.components)


def heisenberg_rhs(model: HybridModel, A: HybridObservable, t: float = 0.0) -> np.ndarray:
    """dA/dt as an (m, n, n) array; preserves Hermiticity and the identity."""
    return heisenberg_generator(model.operators_at(t), A.components)
