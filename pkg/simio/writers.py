"""
Delimited data files.

Each file starts with a comment line holding the seed and scheme, then a
header row, then data rows. Floats are written with 17 significant
digits so files reproduce bit-for-bit.
"""

import csv
import os
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from config import (
    COMPARISON_COLUMNS,
    DELIMITERS,
    DENSITY_COLUMNS,
    EVENT_STATS_COLUMNS,
    EVENTS_COLUMNS,
    REDUCED_COLUMNS,
    SNAPSHOT_COLUMNS,
)
from master.states import HybridDensityState, reduce_classical, reduce_quantum
from pdp.params import TrajectoryResult


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def comment_line(meta: Dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def write_table(path: str, columns: Sequence[str], rows: Iterable[Sequence], meta: Dict, fmt: str = "csv") -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(comment_line(meta) + "\n")
        writer = csv.writer(f, delimiter=DELIMITERS[fmt], lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def read_table(path: str, fmt: str = "csv") -> Tuple[str, List[str], List[List[str]]]:
    """(comment, header, rows) as strings."""
    with open(path, "r", encoding="utf-8") as f:
        comment = f.readline().rstrip("\n")
        reader = csv.reader(f, delimiter=DELIMITERS[fmt])
        header = next(reader)
        return comment, header, [row for row in reader]


# ---------- trajectory ----------

def event_rows(result: TrajectoryResult) -> List[List]:
    return [[ev.time, ev.from_alpha, ev.to_alpha] for ev in result.events]


def snapshot_rows(result: TrajectoryResult) -> List[List]:
    rows = []
    for t, state in result.snapshots:
        for i, z in enumerate(state.psi):
            rows.append([t, state.alpha, i, z.real, z.imag])
    return rows


# ---------- hybrid states ----------

def occupation_columns(m: int) -> List[str]:
    return ["t"] + [f"p_{a}" for a in range(1, m + 1)]


def occupation_rows(times: Sequence[float], states: Sequence[HybridDensityState]) -> List[List]:
    return [[t] + list(reduce_classical(s)) for t, s in zip(times, states)]


def density_rows(times: Sequence[float], states: Sequence[HybridDensityState]) -> List[List]:
    rows = []
    for t, s in zip(times, states):
        m, n = s.m, s.n
        for a in range(m):
            for i in range(n):
                for j in range(n):
                    z = s.components[a, i, j]
                    rows.append([t, a + 1, i, j, z.real, z.imag])
    return rows


def reduced_rows(times: Sequence[float], states: Sequence[HybridDensityState]) -> List[List]:
    rows = []
    for t, s in zip(times, states):
        rho = reduce_quantum(s)
        for i in range(s.n):
            for j in range(s.n):
                rows.append([t, i, j, rho[i, j].real, rho[i, j].imag])
    return rows


def comparison_rows(times: Sequence[float], distances, thresholds) -> List[List]:
    return [[t, d, c] for t, d, c in zip(times, distances, thresholds)]


COLUMNS = {
    "events": EVENTS_COLUMNS,
    "snapshots": SNAPSHOT_COLUMNS,
    "density": DENSITY_COLUMNS,
    "reduced_density": REDUCED_COLUMNS,
    "event_statistics": EVENT_STATS_COLUMNS,
    "comparison": COMPARISON_COLUMNS,
    "master_density": DENSITY_COLUMNS,
}
