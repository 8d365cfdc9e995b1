"""
Experiment specification package.

Hamiltonian family, coupling matrix, derived Λ_α / K_α operators,
time-dependence schedules and the built-in model library.
"""

from model.builtins import BUILDERS, builtin_model, zero_coupling_model
from model.hybrid import (
    EventRecord,
    HybridModel,
    PureHybridState,
    SectorOperators,
    build_model,
    coupling_array,
    effective_generator,
    jump_probabilities,
    jump_rate,
    lambda_operator,
)
from model.schedule import Constant, PiecewiseConstant, Schedule, piecewise

__all__ = [
    "BUILDERS",
    "Constant",
    "EventRecord",
    "HybridModel",
    "PiecewiseConstant",
    "PureHybridState",
    "Schedule",
    "SectorOperators",
    "build_model",
    "builtin_model",
    "coupling_array",
    "effective_generator",
    "jump_probabilities",
    "jump_rate",
    "lambda_operator",
    "piecewise",
    "zero_coupling_model",
]
