"""
Exception hierarchy shared by every package.

Classical indices in messages are 1-based (α = 1..m).
"""

from typing import Optional


class EEQTError(Exception):
    """Root of all simulator errors."""


# =========================================================
# MODEL / LINEAR ALGEBRA
# =========================================================

class ModelError(EEQTError, ValueError):
    pass


class NonHermitianHamiltonian(ModelError):
    def __init__(self, alpha: int, t: float):
        self.alpha = alpha
        self.t = t
        super().__init__(f"H_{alpha}(t={t:g}) is not Hermitian")


class NonzeroDiagonalCoupling(ModelError):
    def __init__(self, alpha: int, t: Optional[float] = None):
        self.alpha = alpha
        self.t = t
        where = "" if t is None else f" at t={t:g}"
        super().__init__(f"g_{alpha}{alpha} must be identically zero{where}")


class DimensionMismatch(ModelError):
    def __init__(self, component: str, expected, got):
        self.component = component
        self.expected = expected
        self.got = got
        super().__init__(f"{component}: expected shape {expected}, got {got}")


class UnknownModel(ModelError):
    def __init__(self, name: str, known):
        self.name = name
        super().__init__(f"unknown builtin model '{name}' (known: {', '.join(sorted(known))})")


class IndexOutOfRange(ModelError, IndexError):
    def __init__(self, alpha: int, m: int):
        self.alpha = alpha
        super().__init__(f"classical index {alpha} outside 1..{m}")


class LinalgError(EEQTError):
    pass


class NonFiniteInput(LinalgError, ValueError):
    pass


# =========================================================
# DYNAMICS
# =========================================================

class DynamicsError(EEQTError, RuntimeError):
    pass


class NoJumpPossible(DynamicsError):
    pass


class NegativeRate(DynamicsError):
    pass


class DeadBranch(DynamicsError):
    pass


class StepTooLarge(DynamicsError):
    pass


class RunawayJumps(DynamicsError):
    pass


class IntegrationError(DynamicsError):
    pass


class TrajectoryFailure(DynamicsError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"trajectory {index} failed: {type(cause).__name__}: {cause}")

    def __reduce__(self):
        return (TrajectoryFailure, (self.index, self.cause))


# =========================================================
# MASTER EQUATION
# =========================================================

class MasterError(EEQTError, RuntimeError):
    pass


class TraceDriftExceeded(MasterError):
    pass


class InvariantViolation(MasterError):
    pass


# =========================================================
# CONFIGURATION
# =========================================================

class ConfigError(EEQTError, ValueError):
    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        prefix = ""
        if path:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ConfigSyntaxError(ConfigError):
    pass


class SchemaViolation(ConfigError):
    pass


class ConfigModelError(ConfigError):
    def __init__(self, cause: ModelError, path: str):
        self.cause = cause
        super().__init__(f"{type(cause).__name__}: {cause}", path=path)
