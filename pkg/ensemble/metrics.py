"""
Distances between hybrid states and the statistical error bar used when
comparing an ensemble with the master equation.
"""

import math

import numpy as np
from scipy.linalg import eigvalsh

from config import COMPARE_SIGMAS
from master.states import HybridDensityState, purity
from model.hybrid import HybridModel
from pdp.params import FixedDt, Scheme
from utils.errors import DimensionMismatch


def trace_distance(rho: HybridDensityState, sigma: HybridDensityState) -> float:
    """½ Σ_α ‖ρ_α − σ_α‖₁ (block-diagonal, so per-component eigenvalues)."""
    if rho.components.shape != sigma.components.shape:
        raise DimensionMismatch("trace_distance", rho.components.shape, sigma.components.shape)
    diff = rho.components - sigma.components
    diff = 0.5 * (diff + np.conj(np.swapaxes(diff, -1, -2)))
    return 0.5 * float(sum(np.abs(eigvalsh(d)).sum() for d in diff))


def discretization_bias(model: HybridModel, scheme: Scheme) -> float:
    """O(λ_max·dt) for thinning; the ODE tolerance for the norm method."""
    if isinstance(scheme, FixedDt):
        points = (0.0,) + model.breakpoints()
        lam_max = max(model.operators_at(t).max_rate() for t in points)
        return lam_max * scheme.dt
    return scheme.ode_tol


def comparison_threshold(
    empirical: HybridDensityState,
    n_trajectories: int,
    bias: float,
    sigmas: float = COMPARE_SIGMAS,
) -> float:
    """
    sigmas · ½√(nm) · √((1 − purity)/N) + bias.

    The square-root term bounds the expected Frobenius error of a sample
    mean of rank-one projectors; √(nm) converts it to a trace-norm bound.
    """
    dim = empirical.m * empirical.n
    spread = max(1.0 - purity(empirical), 0.0)
    return sigmas * 0.5 * math.sqrt(dim) * math.sqrt(spread / n_trajectories) + bias
