"""
Total-system (nm × nm) form of the hybrid dynamics.

H_q ⊗ H_c = ⊕_α H_α with sector α occupying rows α·n … α·n + n − 1.
V carries g_αβ in block (α, β); E keeps the diagonal blocks only.

    ρ̇ = −i[H, ρ] + E(V ρ V⋆) − ½{Λ, ρ},   Λ = E(V⋆ V)
    Ȧ =  i[H, A] + E(V⋆ A V) − ½{Λ, A}

Used as an independent cross-check of the component form.
"""

import numpy as np
from scipy.linalg import block_diag

from model.hybrid import HybridModel


def to_block(components: np.ndarray) -> np.ndarray:
    return block_diag(*components)


def from_block(x: np.ndarray, m: int) -> np.ndarray:
    n = x.shape[0] // m
    return np.stack([x[a * n:(a + 1) * n, a * n:(a + 1) * n] for a in range(m)])


def conditional_expectation(x: np.ndarray, m: int) -> np.ndarray:
    """Projection onto the block-diagonal subalgebra."""
    return to_block(from_block(x, m))


def coupling_matrix(model: HybridModel, t: float = 0.0) -> np.ndarray:
    G = model.operators_at(t).G
    mn = model.m * model.n
    return G.transpose(0, 2, 1, 3).reshape(mn, mn)


def hamiltonian_matrix(model: HybridModel, t: float = 0.0) -> np.ndarray:
    return to_block(model.operators_at(t).H)


def damping_matrix(model: HybridModel, t: float = 0.0) -> np.ndarray:
    V = coupling_matrix(model, t)
    return conditional_expectation(V.conj().T @ V, model.m)


def block_liouville_rhs(model: HybridModel, rho: np.ndarray, t: float = 0.0) -> np.ndarray:
    H = hamiltonian_matrix(model, t)
    V = coupling_matrix(model, t)
    lam = damping_matrix(model, t)
    gain = conditional_expectation(V @ rho @ V.conj().T, model.m)
    return -1j * (H @ rho - rho @ H) + gain - 0.5 * (lam @ rho + rho @ lam)


def block_heisenberg_rhs(model: HybridModel, A: np.ndarray, t: float = 0.0) -> np.ndarray:
    H = hamiltonian_matrix(model, t)
    V = coupling_matrix(model, t)
    lam = damping_matrix(model, t)
    gain = conditional_expectation(V.conj().T @ A @ V, model.m)
    return 1j * (H @ A - A @ H) + gain - 0.5 * (lam @ A + A @ lam)
