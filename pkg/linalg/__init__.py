"""
Dense complex linear algebra package.

Small-dimension products, adjoints, commutators, matrix-exponential
action and the predicates used to validate states and models.
"""

from linalg.core import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    ComplexVector,
    adjoint,
    anticommutator,
    commutator,
    expm,
    expm_apply,
    identity,
    inner,
    is_hermitian,
    is_positive_semidefinite,
    min_eigenvalue,
    norm_sq,
    operator_norm,
    projector,
    rk4_propagator,
    symmetrize,
    trace,
)

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "ComplexMatrix",
    "ComplexVector",
    "adjoint",
    "anticommutator",
    "commutator",
    "expm",
    "expm_apply",
    "identity",
    "inner",
    "is_hermitian",
    "is_positive_semidefinite",
    "min_eigenvalue",
    "norm_sq",
    "operator_norm",
    "projector",
    "rk4_propagator",
    "symmetrize",
    "trace",
]
