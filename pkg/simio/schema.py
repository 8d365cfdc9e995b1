"""
Run-configuration schema (pydantic v2).

Complex entries are written as [re, im] pairs; a bare number is read
as a real entry. A config either names a builtin model with parameters
or lists explicit matrices, optionally with time segments.
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from config import (
    DEFAULT_DT,
    DEFAULT_MAX_EVENTS,
    DEFAULT_N_TRAJECTORIES,
    DEFAULT_ODE_TOL,
    DEFAULT_ROOT_TOL,
    MASTER_DEFAULT_DT,
)


ComplexEntry = Union[Tuple[float, float], float]
Matrix = List[List[ComplexEntry]]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# ---------- model ----------

class CouplingEntry(_Section):
    from_alpha: int = Field(alias="from", ge=1)
    to_alpha: int = Field(alias="to", ge=1)
    matrix: Matrix


class SegmentSection(_Section):
    start: float = Field(gt=0)
    hamiltonians: Optional[List[Matrix]] = None
    couplings: Optional[List[CouplingEntry]] = None


class ModelSection(_Section):
    builtin: Optional[str] = None
    parameters: Dict[str, float] = Field(default_factory=dict)

    n: Optional[int] = Field(default=None, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    labels: Optional[List[str]] = None
    hamiltonians: Optional[List[Matrix]] = None
    couplings: List[CouplingEntry] = Field(default_factory=list)
    segments: List[SegmentSection] = Field(default_factory=list)

    @model_validator(mode="after")
    def _one_kind(self):
        explicit = self.n is not None or self.m is not None or self.hamiltonians is not None
        if self.builtin and explicit:
            raise ValueError("give either 'builtin' or explicit n/m/hamiltonians, not both")
        if not self.builtin:
            if self.parameters:
                raise ValueError("'parameters' only applies to builtin models")
            missing = [k for k in ("n", "m", "hamiltonians") if getattr(self, k) is None]
            if missing:
                raise ValueError(f"explicit model needs {', '.join(missing)}")
        starts = [s.start for s in self.segments]
        if any(a >= b for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly ascending")
        return self


# ---------- initial / run / outputs ----------

class InitialSection(_Section):
    psi: List[ComplexEntry] = Field(min_length=1)
    alpha: int = Field(ge=1)


class RunSection(_Section):
    scheme: Literal["fixed-dt", "norm-threshold"] = "fixed-dt"
    dt: float = Field(default=DEFAULT_DT, gt=0)
    ode_tol: float = Field(default=DEFAULT_ODE_TOL, gt=0)
    root_tol: float = Field(default=DEFAULT_ROOT_TOL, gt=0)
    t0: float = 0.0
    t_end: float
    sample_times: Optional[List[float]] = None
    n_trajectories: int = Field(default=DEFAULT_N_TRAJECTORIES, ge=1)
    master_seed: int = Field(default=0, ge=0)
    master_dt: float = Field(default=MASTER_DEFAULT_DT, gt=0)
    max_events: int = Field(default=DEFAULT_MAX_EVENTS, ge=1)

    @model_validator(mode="after")
    def _times(self):
        if self.t_end <= self.t0:
            raise ValueError(f"t_end must exceed t0 ({self.t0})")
        return self


class OutputSection(_Section):
    directory: Optional[str] = None
    format: Literal["csv", "tsv"] = "csv"


# =========================================================
# TOP LEVEL
# =========================================================

class SimulationSpec(_Section):
    model: ModelSection
    initial: InitialSection
    run: RunSection
    outputs: OutputSection = Field(default_factory=OutputSection)

    # filled in by the parser once the model has been built and checked
    _hybrid_model = PrivateAttr(default=None)
    _initial_state = PrivateAttr(default=None)

    def hybrid_model(self):
        return self._hybrid_model

    def initial_state(self):
        return self._initial_state

    def normalized(self) -> Dict:
        """Plain-data form written to run metadata; parses back to an equal spec."""
        return self.model_dump(by_alias=True, exclude_none=True)
