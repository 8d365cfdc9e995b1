"""
Dense complex linear algebra for small dimensions (n ≲ 64).

Operators are complex128 numpy arrays of shape (n, n); state vectors
have shape (n,). Every function is pure and never mutates its inputs.

Matrix exponentials use scipy.linalg.expm (Padé approximation with
scaling and squaring). It is deterministic and accurate to ~1e-15
relative for the norms that occur here, well inside the 1e-10 target.
"""

from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import linalg as sla

from config import HERMITIAN_TOL, NONFINITE_MESSAGE, PSD_REL_TOL
from utils.errors import DimensionMismatch, NonFiniteInput


ComplexVector = npt.NDArray[np.complex128]
ComplexMatrix = npt.NDArray[np.complex128]


# =========================================================
# CONSTRUCTORS
# =========================================================

def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def projector(index: int, n: int) -> ComplexMatrix:
    """|k⟩⟨k| for the 0-based basis vector k."""
    p = np.zeros((n, n), dtype=np.complex128)
    p[index, index] = 1.0
    return p


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


# =========================================================
# GUARDS
# =========================================================

def _require_square(m: np.ndarray, name: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(name, "square", m.shape)


def _require_same_shape(a: np.ndarray, b: np.ndarray, name: str) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(name, a.shape, b.shape)


def _require_finite(*arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput(NONFINITE_MESSAGE)


# =========================================================
# ALGEBRA
# =========================================================

def adjoint(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(np.asarray(m)).T.copy()


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    _require_square(a, "commutator lhs")
    _require_same_shape(a, b, "commutator rhs")
    return a @ b - b @ a


def anticommutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    _require_square(a, "anticommutator lhs")
    _require_same_shape(a, b, "anticommutator rhs")
    return a @ b + b @ a


def symmetrize(m: ComplexMatrix) -> ComplexMatrix:
    return 0.5 * (m + np.conj(m).T)


# =========================================================
# EXPONENTIAL
# =========================================================

def expm(k: ComplexMatrix, t: float) -> ComplexMatrix:
    """Full propagator exp(K t)."""
    k = np.asarray(k, dtype=np.complex128)
    _require_square(k, "generator")
    _require_finite(k)
    if not np.isfinite(t):
        raise NonFiniteInput(NONFINITE_MESSAGE)
    return sla.expm(k * t)


def expm_apply(k: ComplexMatrix, v: ComplexVector, t: float) -> ComplexVector:
    v = np.asarray(v, dtype=np.complex128)
    k = np.asarray(k, dtype=np.complex128)
    _require_square(k, "generator")
    if v.shape != (k.shape[0],):
        raise DimensionMismatch("vector", (k.shape[0],), v.shape)
    _require_finite(v)
    return expm(k, t) @ v


def rk4_propagator(k: ComplexMatrix, h: float) -> ComplexMatrix:
    """
    Matrix of one classical RK4 step of size h for ψ̇ = Kψ.

    For a linear autonomous right-hand side the four stages collapse to
    the degree-4 Taylor polynomial of exp(Kh).
    """
    k = np.asarray(k, dtype=np.complex128)
    _require_square(k, "generator")
    kh = k * h
    n = k.shape[0]
    out = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for order in range(1, 5):
        term = term @ kh / order
        out = out + term
    return out


# =========================================================
# SCALARS / PREDICATES
# =========================================================

def trace(m: ComplexMatrix) -> complex:
    _require_square(np.asarray(m), "trace")
    return complex(np.trace(m))


def inner(u: ComplexVector, v: ComplexVector) -> complex:
    """⟨u, v⟩, conjugate-linear in u."""
    u = np.asarray(u)
    v = np.asarray(v)
    _require_same_shape(u, v, "inner")
    return complex(np.vdot(u, v))


def norm_sq(v: ComplexVector) -> float:
    v = np.asarray(v)
    return float(np.real(np.vdot(v, v)))


def is_hermitian(m: ComplexMatrix, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - np.conj(m).T), initial=0.0) <= tol)


def min_eigenvalue(m: ComplexMatrix) -> float:
    """Smallest eigenvalue of the Hermitian part of m."""
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m, "eigenvalues")
    return float(sla.eigvalsh(symmetrize(m))[0])


def is_positive_semidefinite(m: ComplexMatrix, tol: Optional[float] = None) -> bool:
    """
    Hermitian within HERMITIAN_TOL and every eigenvalue ≥ −tol.

    tol defaults to PSD_REL_TOL × |trace(m)|.
    """
    m = np.asarray(m, dtype=np.complex128)
    if not is_hermitian(m, max(HERMITIAN_TOL, tol or 0.0)):
        return False
    if tol is None:
        tol = PSD_REL_TOL * abs(np.trace(m).real)
    return min_eigenvalue(m) >= -tol


def operator_norm(m: ComplexMatrix) -> float:
    """Spectral norm (largest singular value)."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
