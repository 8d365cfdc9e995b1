"""
Explicit time dependence of model operators.

A schedule maps time to an array value. Two forms exist:
constant, and piecewise constant on right-open intervals
[b_i, b_{i+1}) with the last value extending to +∞. Times before the
first breakpoint use the first value.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np


class Schedule:
    """Common interface: evaluate(t), interval_index(t), breakpoints."""

    def evaluate(self, t: float) -> np.ndarray:
        return self.values[self.interval_index(t)]

    def interval_index(self, t: float) -> int:
        raise NotImplementedError

    @property
    def values(self) -> Tuple[np.ndarray, ...]:
        raise NotImplementedError

    def validation_times(self) -> List[float]:
        """Breakpoints plus interval midpoints (0.0 for a constant)."""
        bps = list(self.breakpoints)
        if not bps:
            return [0.0]
        times = list(bps)
        for a, b in zip(bps, bps[1:]):
            times.append(0.5 * (a + b))
        # last interval is unbounded; check one unit past its start
        times.append(bps[-1] + 1.0)
        return sorted(times)

    def map(self, fn) -> "Schedule":
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Constant(Schedule):
    value: np.ndarray

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def interval_index(self, t: float) -> int:
        return 0

    @property
    def values(self) -> Tuple[np.ndarray, ...]:
        return (self.value,)

    def map(self, fn) -> "Constant":
        return Constant(fn(self.value))


@dataclass(frozen=True, eq=False)
class PiecewiseConstant(Schedule):
    breakpoints: Tuple[float, ...]
    interval_values: Tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        if not bps:
            raise ValueError("piecewise schedule needs at least one breakpoint")
        if len(bps) != len(self.interval_values):
            raise ValueError(
                f"{len(bps)} breakpoints but {len(self.interval_values)} interval values"
            )
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("schedule breakpoints must be strictly ascending")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "interval_values", tuple(self.interval_values))

    def interval_index(self, t: float) -> int:
        i = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return max(i, 0)

    @property
    def values(self) -> Tuple[np.ndarray, ...]:
        return self.interval_values

    def map(self, fn) -> "PiecewiseConstant":
        return PiecewiseConstant(self.breakpoints, tuple(fn(v) for v in self.interval_values))


def as_schedule(value) -> Schedule:
    if isinstance(value, Schedule):
        return value
    return Constant(np.asarray(value, dtype=np.complex128))


def piecewise(segments: Sequence[Tuple[float, np.ndarray]]) -> PiecewiseConstant:
    """Build from (start_time, value) pairs."""
    return PiecewiseConstant(
        tuple(s for s, _ in segments),
        tuple(np.asarray(v, dtype=np.complex128) for _, v in segments),
    )
