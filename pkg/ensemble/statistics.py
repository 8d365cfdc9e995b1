"""
Event statistics over a trajectory ensemble and Kolmogorov–Smirnov
checks of event-time distributions.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config import HISTOGRAM_BIN_WIDTH, KS_ALPHA
from pdp.params import TrajectoryResult


# Asymptotic two-sided KS coefficient c(α): D_crit = c(α)/√n
KS_COEFFICIENTS = {0.10: 1.22, 0.05: 1.36, 0.01: 1.63, 0.001: 1.95}


@dataclass(eq=False)
class ChannelStatistics:
    channel: Tuple[int, int]
    count: int                       # all events in the channel
    first_times: np.ndarray          # first event per trajectory, where one occurred
    mean_first_time: float
    var_first_time: float
    histogram: np.ndarray
    bin_edges: np.ndarray


@dataclass(eq=False)
class EventStatistics:
    n_trajectories: int
    channels: Dict[Tuple[int, int], ChannelStatistics]
    inter_event_times: np.ndarray
    occupation: np.ndarray           # (S, m) frequencies at the sample times
    sample_times: Tuple[float, ...]

    def rows(self) -> List[List]:
        """Flat rows for event_statistics output files."""
        out = []
        for (a, b), ch in sorted(self.channels.items()):
            out.append([a, b, ch.count, ch.mean_first_time, ch.var_first_time])
        return out


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    critical: float
    n: int

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def _critical(alpha: float, n_eff: float) -> float:
    if alpha not in KS_COEFFICIENTS:
        raise ValueError(f"alpha must be one of {sorted(KS_COEFFICIENTS)} (got {alpha})")
    return KS_COEFFICIENTS[alpha] / math.sqrt(n_eff)


def _histogram(times: np.ndarray, bin_width: float) -> Tuple[np.ndarray, np.ndarray]:
    if times.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(1)
    top = bin_width * max(1, math.ceil(times.max() / bin_width))
    edges = np.arange(0.0, top + 0.5 * bin_width, bin_width)
    edges[-1] = max(edges[-1], float(times.max()))
    counts, edges = np.histogram(times, bins=edges)
    return counts, edges


# =========================================================
# EVENT STATISTICS
# =========================================================

def event_statistics(
    results: Sequence[TrajectoryResult],
    m: int,
    bin_width: float = HISTOGRAM_BIN_WIDTH,
) -> EventStatistics:
    if not results:
        raise ValueError("event_statistics needs at least one trajectory")

    channels = {}
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            if a == b:
                continue
            firsts = np.array(
                [t for t in (r.first_event_time((a, b)) for r in results) if np.isfinite(t)],
                dtype=float,
            )
            count = sum(1 for r in results for ev in r.events if (ev.from_alpha, ev.to_alpha) == (a, b))
            hist, edges = _histogram(firsts, bin_width)
            channels[(a, b)] = ChannelStatistics(
                channel=(a, b),
                count=count,
                first_times=firsts,
                mean_first_time=float(firsts.mean()) if firsts.size else math.nan,
                var_first_time=float(firsts.var(ddof=1)) if firsts.size > 1 else math.nan,
                histogram=hist,
                bin_edges=edges,
            )

    gaps = [np.diff([ev.time for ev in r.events]) for r in results if len(r.events) > 1]
    inter = np.concatenate(gaps) if gaps else np.zeros(0)

    sample_times = tuple(t for t, _ in results[0].snapshots)
    occupation = np.zeros((len(sample_times), m))
    for r in results:
        for j, (_, s) in enumerate(r.snapshots):
            occupation[j, s.alpha - 1] += 1.0
    occupation /= len(results)

    return EventStatistics(
        n_trajectories=len(results),
        channels=channels,
        inter_event_times=inter,
        occupation=occupation,
        sample_times=sample_times,
    )


# =========================================================
# KOLMOGOROV–SMIRNOV
# =========================================================

def ks_exponential(
    samples: Sequence[float],
    rate: float,
    t_max: Optional[float] = None,
    alpha: float = KS_ALPHA,
) -> KSResult:
    """
    One-sample KS test against Exp(rate). With t_max the reference is
    the exponential truncated to [0, t_max] (samples censored at t_max
    must already be removed).
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("ks_exponential needs at least one sample")
    if not rate > 0:
        raise ValueError(f"rate must be positive (got {rate})")

    if t_max is None:
        res = stats.kstest(x, "expon", args=(0.0, 1.0 / rate))
    else:
        mass = -math.expm1(-rate * t_max)
        res = stats.kstest(x, lambda t: -np.expm1(-rate * np.clip(t, 0.0, t_max)) / mass)
    return KSResult(float(res.statistic), float(res.pvalue), _critical(alpha, x.size), int(x.size))


def ks_two_sample(a: Sequence[float], b: Sequence[float], alpha: float = KS_ALPHA) -> KSResult:
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("ks_two_sample needs non-empty samples")
    res = stats.ks_2samp(x, y)
    n_eff = x.size * y.size / (x.size + y.size)
    return KSResult(float(res.statistic), float(res.pvalue), _critical(alpha, n_eff), int(x.size + y.size))
