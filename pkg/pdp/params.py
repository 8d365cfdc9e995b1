from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import (
    DEFAULT_DT,
    DEFAULT_MAX_EVENTS,
    DEFAULT_ODE_TOL,
    DEFAULT_ROOT_TOL,
)
from model.hybrid import EventRecord, PureHybridState


# =========================================================
# SCHEMES
# =========================================================

@dataclass(frozen=True)
class FixedDt:
    dt: float = DEFAULT_DT

    name = "fixed-dt"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive (got {self.dt})")

    def describe(self) -> Dict:
        return {"scheme": self.name, "dt": self.dt}


@dataclass(frozen=True)
class NormThreshold:
    ode_tol: float = DEFAULT_ODE_TOL
    root_tol: float = DEFAULT_ROOT_TOL

    name = "norm-threshold"

    def __post_init__(self):
        if not (self.ode_tol > 0 and self.root_tol > 0):
            raise ValueError("ode_tol and root_tol must be positive")

    def describe(self) -> Dict:
        return {"scheme": self.name, "ode_tol": self.ode_tol, "root_tol": self.root_tol}


Scheme = Union[FixedDt, NormThreshold]


# =========================================================
# PARAMS / RESULT
# =========================================================

@dataclass(frozen=True)
class TrajectoryParams:
    scheme: Scheme
    t_end: float
    sample_times: Tuple[float, ...] = ()
    max_events: int = DEFAULT_MAX_EVENTS
    t0: float = 0.0

    def __post_init__(self):
        times = tuple(float(s) for s in self.sample_times)
        if self.t_end <= self.t0:
            raise ValueError(f"t_end must exceed t0 (got t0={self.t0}, t_end={self.t_end})")
        if any(s < self.t0 or s > self.t_end for s in times):
            raise ValueError("sample_times must lie in [t0, t_end]")
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ValueError("sample_times must be strictly ascending")
        object.__setattr__(self, "sample_times", times)


@dataclass(eq=False)
class TrajectoryResult:
    events: List[EventRecord]
    snapshots: List[Tuple[float, PureHybridState]]
    seed: Optional[int]
    scheme: Dict
    trajectory_index: int = 0
    final: Optional[PureHybridState] = None
    t_final: float = 0.0

    def first_event_time(self, channel: Optional[Tuple[int, int]] = None) -> float:
        for ev in self.events:
            if channel is None or (ev.from_alpha, ev.to_alpha) == channel:
                return ev.time
        return np.inf

    def identical_to(self, other: "TrajectoryResult") -> bool:
        """Bitwise equality of events and snapshots."""
        if self.events != other.events or len(self.snapshots) != len(other.snapshots):
            return False
        for (t1, s1), (t2, s2) in zip(self.snapshots, other.snapshots):
            if t1 != t2 or s1.alpha != s2.alpha or not np.array_equal(s1.psi, s2.psi):
                return False
        return True


def first_event_times(results: Sequence[TrajectoryResult], channel: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """First event time of each trajectory that had one (censored paths dropped)."""
    times = np.array([r.first_event_time(channel) for r in results], dtype=float)
    return times[np.isfinite(times)]
