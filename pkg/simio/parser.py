"""
YAML run configuration → validated SimulationSpec.

Every failure is reported as a ConfigError carrying a dotted path into
the config (e.g. "run.t_end", "model.couplings[0]") and, for syntax
errors, the line number.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from pydantic import ValidationError

from model.builtins import builtin_model
from model.hybrid import HybridModel, PureHybridState, build_model, coupling_array
from model.schedule import piecewise
from pdp.params import FixedDt, NormThreshold, TrajectoryParams
from simio.schema import CouplingEntry, SimulationSpec
from utils.errors import (
    ConfigModelError,
    ConfigSyntaxError,
    DimensionMismatch,
    IndexOutOfRange,
    ModelError,
    NonHermitianHamiltonian,
    NonzeroDiagonalCoupling,
    SchemaViolation,
    UnknownModel,
)


NORMALIZATION_WARN = 1e-6
SAMPLE_POINTS = 11


# ---------- helpers ----------

def _loc_path(loc: Sequence) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += ("." if path else "") + str(part)
    return path


def _complex(entry) -> complex:
    if isinstance(entry, (tuple, list)):
        return complex(entry[0], entry[1])
    return complex(entry)


def _matrix(rows, n: int, path: str) -> np.ndarray:
    mat = np.array([[_complex(x) for x in row] for row in rows], dtype=np.complex128)
    if mat.shape != (n, n):
        raise ConfigModelError(DimensionMismatch("matrix", (n, n), mat.shape), path)
    return mat


def _hamiltonians(mats, n: int, m: int, path: str) -> np.ndarray:
    if len(mats) != m:
        raise ConfigModelError(DimensionMismatch("hamiltonians", m, len(mats)), path)
    return np.stack([_matrix(h, n, f"{path}[{a}]") for a, h in enumerate(mats)])


def _couplings(entries: List[CouplingEntry], n: int, m: int, path: str) -> np.ndarray:
    pairs = {}
    for i, entry in enumerate(entries):
        where = f"{path}[{i}]"
        for alpha in (entry.from_alpha, entry.to_alpha):
            if alpha > m:
                raise ConfigModelError(IndexOutOfRange(alpha, m), where)
        g = _matrix(entry.matrix, n, f"{where}.matrix")
        if entry.from_alpha == entry.to_alpha and np.any(g != 0):
            raise ConfigModelError(NonzeroDiagonalCoupling(entry.from_alpha), where)
        key = (entry.to_alpha, entry.from_alpha)
        if key in pairs:
            raise SchemaViolation(f"duplicate coupling {entry.from_alpha} → {entry.to_alpha}", path=where)
        pairs[key] = g
    return coupling_array(n, m, pairs)


# =========================================================
# MODEL
# =========================================================

def _explicit_model(section) -> HybridModel:
    n, m = section.n, section.m
    h_segments: List[Tuple[float, np.ndarray]] = [(0.0, _hamiltonians(section.hamiltonians, n, m, "model.hamiltonians"))]
    g_segments: List[Tuple[float, np.ndarray]] = [(0.0, _couplings(section.couplings, n, m, "model.couplings"))]
    h_paths = ["model.hamiltonians"]

    for k, seg in enumerate(section.segments):
        base = f"model.segments[{k}]"
        H = h_segments[-1][1] if seg.hamiltonians is None else _hamiltonians(seg.hamiltonians, n, m, f"{base}.hamiltonians")
        G = g_segments[-1][1] if seg.couplings is None else _couplings(seg.couplings, n, m, f"{base}.couplings")
        h_segments.append((seg.start, H))
        g_segments.append((seg.start, G))
        h_paths.append(h_paths[-1] if seg.hamiltonians is None else f"{base}.hamiltonians")

    hamiltonians = h_segments[0][1] if len(h_segments) == 1 else piecewise(h_segments)
    couplings = g_segments[0][1] if len(g_segments) == 1 else piecewise(g_segments)

    try:
        return build_model(n, m, hamiltonians, couplings, labels=section.labels)
    except NonHermitianHamiltonian as e:
        starts = [s for s, _ in h_segments]
        k = max(i for i, s in enumerate(starts) if s <= max(e.t, 0.0))
        raise ConfigModelError(e, f"{h_paths[k]}[{e.alpha - 1}]") from e
    except DimensionMismatch as e:
        raise ConfigModelError(e, f"model.{e.component}") from e
    except ModelError as e:
        raise ConfigModelError(e, "model") from e


def _builtin(section) -> HybridModel:
    try:
        return builtin_model(section.builtin, section.parameters)
    except UnknownModel as e:
        raise ConfigModelError(e, "model.builtin") from e
    except ModelError as e:
        raise ConfigModelError(e, "model.parameters") from e


def _initial(spec: SimulationSpec, model: HybridModel) -> Tuple[PureHybridState, List[Tuple[float, float]]]:
    psi = np.array([_complex(x) for x in spec.initial.psi], dtype=np.complex128)
    if psi.shape[0] != model.n:
        raise ConfigModelError(DimensionMismatch("psi", model.n, psi.shape[0]), "initial.psi")
    if spec.initial.alpha > model.m:
        raise ConfigModelError(IndexOutOfRange(spec.initial.alpha, model.m), "initial.alpha")

    norm_sq = float(np.vdot(psi, psi).real)
    if norm_sq == 0.0:
        raise SchemaViolation("initial state vector is zero", path="initial.psi")
    if abs(norm_sq - 1.0) > NORMALIZATION_WARN:
        logging.warning(f"⚠️ initial.psi has ‖ψ‖² = {norm_sq:.6g}; normalizing")
    psi = psi / np.sqrt(norm_sq)
    return PureHybridState(psi, spec.initial.alpha), [(float(z.real), float(z.imag)) for z in psi]


# =========================================================
# RUN PARAMETERS
# =========================================================

def sample_times(spec: SimulationSpec) -> Tuple[float, ...]:
    run = spec.run
    if run.sample_times is not None:
        return tuple(run.sample_times)
    return tuple(float(t) for t in np.linspace(run.t0, run.t_end, SAMPLE_POINTS))


def trajectory_params(spec: SimulationSpec) -> TrajectoryParams:
    run = spec.run
    scheme = FixedDt(run.dt) if run.scheme == FixedDt.name else NormThreshold(run.ode_tol, run.root_tol)
    try:
        return TrajectoryParams(
            scheme=scheme,
            t_end=run.t_end,
            sample_times=sample_times(spec),
            max_events=run.max_events,
            t0=run.t0,
        )
    except ValueError as e:
        raise SchemaViolation(str(e), path="run.sample_times") from e


# =========================================================
# PUBLIC
# =========================================================

def spec_from_dict(data) -> SimulationSpec:
    if not isinstance(data, dict):
        raise SchemaViolation("top level must be a mapping with model/initial/run sections")
    try:
        spec = SimulationSpec.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SchemaViolation(first["msg"], path=_loc_path(first["loc"]) or None) from e

    model = _builtin(spec.model) if spec.model.builtin else _explicit_model(spec.model)
    initial, psi_pairs = _initial(spec, model)
    trajectory_params(spec)

    spec = spec.model_copy(update={"initial": spec.initial.model_copy(update={"psi": psi_pairs})})
    spec._hybrid_model = model
    spec._initial_state = initial
    return spec


def parse_config(text: str) -> SimulationSpec:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line: Optional[int] = mark.line + 1 if mark is not None else None
        raise ConfigSyntaxError(str(getattr(e, "problem", None) or e), line=line) from e
    return spec_from_dict(data)


def load_config(path: str) -> SimulationSpec:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def with_overrides(spec: SimulationSpec, seed: Optional[int] = None, scheme: Optional[str] = None) -> SimulationSpec:
    """CLI flags take precedence over the file."""
    changes: Dict = {}
    if seed is not None:
        changes["master_seed"] = seed
    if scheme is not None:
        changes["scheme"] = scheme
    if not changes:
        return spec
    data = spec.normalized()
    data["run"].update(changes)
    return spec_from_dict(data)
