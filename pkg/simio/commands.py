"""
Subcommand implementations.

Each cmd_* takes a parsed SimulationSpec plus RunOptions, writes its
data files into the resolved output directory and returns a process
exit code. Diagnostics go through logging / stdout, never into data
files.
"""

import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional

from scipy.linalg import eigvalsh

from config import (
    DEFAULT_OUTPUT_DIR,
    EXIT_COMPARE_FAIL,
    EXIT_OK,
    HISTOGRAM_BIN_WIDTH,
)
from ensemble import compare_with_master, event_statistics, run_ensemble
from linalg import min_eigenvalue
from master.integrator import integrate_master
from master.states import pure_product
from model.hybrid import HybridModel
from pdp.engine import run_trajectory
from simio.parser import trajectory_params
from simio.schema import SimulationSpec
from simio import writers
from utils.run_state import save_metadata


@dataclass
class RunOptions:
    out_dir: Optional[str] = None
    workers: int = 1
    progress: bool = True
    config_sha256: Optional[str] = None
    debug_transpose: bool = False


def resolve_output_dir(spec: SimulationSpec, options: RunOptions) -> str:
    """--out, then outputs.directory, then EEQT_OUTPUT_DIR / ./runs."""
    return options.out_dir or spec.outputs.directory or DEFAULT_OUTPUT_DIR


def _meta(spec: SimulationSpec) -> Dict:
    params = trajectory_params(spec)
    meta = {"seed": spec.run.master_seed}
    meta.update(params.scheme.describe())
    return meta


def _path(directory: str, name: str, spec: SimulationSpec) -> str:
    return os.path.join(directory, f"{name}.{spec.outputs.format}")


def _write_metadata(directory: str, spec: SimulationSpec, options: RunOptions, command: str) -> None:
    save_metadata(directory, {
        "command": command,
        "spec": spec.normalized(),
        "seed": spec.run.master_seed,
        "scheme": trajectory_params(spec).scheme.describe(),
        "config_sha256": options.config_sha256,
    })


# =========================================================
# VALIDATE
# =========================================================

def model_summary(model: HybridModel) -> Dict:
    intervals = []
    for t in sorted({0.0, *model.breakpoints()}):
        ops = model.operators_at(t)
        spectra = [eigvalsh(ops.Lam[a]).tolist() for a in range(model.m)]
        intervals.append({"from_t": t, "lambda_spectra": spectra, "dark": [bool(d) for d in ops.dark]})
    return {
        "n": model.n,
        "m": model.m,
        "labels": [model.label(a) for a in range(1, model.m + 1)],
        "intervals": intervals,
        "channels": model.event_channels(),
    }


def cmd_validate(spec: SimulationSpec, options: Optional[RunOptions] = None) -> Dict:
    model = spec.hybrid_model()
    report = model_summary(model)

    print(f"✅ Valid model: n={report['n']} (quantum), m={report['m']} (classical)")
    print(f"   Labels: {', '.join(report['labels'])}")
    for block in report["intervals"]:
        print(f"   From t={block['from_t']:g}:")
        for a, spectrum in enumerate(block["lambda_spectra"], start=1):
            values = ", ".join(f"{x:.6g}" for x in spectrum)
            print(f"     Λ_{a} eigenvalues: [{values}]")
    print(f"   Event channels ({len(report['channels'])}):")
    for ch in report["channels"]:
        mark = "active" if ch["active"] else "inactive"
        print(f"     {model.label(ch['from_alpha'])} → {model.label(ch['to_alpha'])} ({mark})")
    return report


# =========================================================
# TRAJECTORY / ENSEMBLE / MASTER
# =========================================================

def cmd_trajectory(spec: SimulationSpec, options: RunOptions) -> int:
    directory = resolve_output_dir(spec, options)
    params = trajectory_params(spec)
    result = run_trajectory(spec.hybrid_model(), spec.initial_state(), params, spec.run.master_seed)

    meta = _meta(spec)
    fmt = spec.outputs.format
    writers.write_table(_path(directory, "events", spec), writers.COLUMNS["events"], writers.event_rows(result), meta, fmt)
    writers.write_table(_path(directory, "snapshots", spec), writers.COLUMNS["snapshots"], writers.snapshot_rows(result), meta, fmt)
    _write_metadata(directory, spec, options, "trajectory")

    logging.info(f"📝 Trajectory: {len(result.events)} events written to {directory}")
    return EXIT_OK


def cmd_ensemble(spec: SimulationSpec, options: RunOptions) -> int:
    directory = resolve_output_dir(spec, options)
    model = spec.hybrid_model()
    params = trajectory_params(spec)

    ens = run_ensemble(
        model, spec.initial_state(), params, spec.run.n_trajectories, spec.run.master_seed,
        workers=options.workers, progress=options.progress,
    )
    stats = event_statistics(ens.trajectories, model.m, HISTOGRAM_BIN_WIDTH)

    meta = _meta(spec)
    fmt = spec.outputs.format
    times = ens.sample_times
    writers.write_table(
        _path(directory, "occupation", spec), writers.occupation_columns(model.m),
        writers.occupation_rows(times, ens.empirical_states), meta, fmt,
    )
    writers.write_table(
        _path(directory, "density", spec), writers.COLUMNS["density"],
        writers.density_rows(times, ens.empirical_states), meta, fmt,
    )
    writers.write_table(
        _path(directory, "reduced_density", spec), writers.COLUMNS["reduced_density"],
        writers.reduced_rows(times, ens.empirical_states), meta, fmt,
    )
    writers.write_table(
        _path(directory, "event_statistics", spec), writers.COLUMNS["event_statistics"],
        stats.rows(), meta, fmt,
    )
    _write_metadata(directory, spec, options, "ensemble")
    return EXIT_OK


def cmd_master(spec: SimulationSpec, options: RunOptions) -> int:
    directory = resolve_output_dir(spec, options)
    model = spec.hybrid_model()
    params = trajectory_params(spec)
    initial = spec.initial_state()

    rho0 = pure_product(initial.psi, initial.alpha, model.m)
    solution = integrate_master(model, rho0, params.t_end, spec.run.master_dt, params.sample_times, t0=params.t0)
    times = [t for t, _ in solution]
    states = [s for _, s in solution]

    meta = {"seed": spec.run.master_seed, "scheme": "master-rk4", "dt": spec.run.master_dt}
    fmt = spec.outputs.format
    writers.write_table(
        _path(directory, "master_occupation", spec), writers.occupation_columns(model.m),
        writers.occupation_rows(times, states), meta, fmt,
    )
    writers.write_table(
        _path(directory, "master_density", spec), writers.COLUMNS["master_density"],
        writers.density_rows(times, states), meta, fmt,
    )
    _write_metadata(directory, spec, options, "master")

    lowest = min(min_eigenvalue(block) for s in states for block in s.components)
    logging.info(f"📝 Master: {len(states)} states written, min eigenvalue {lowest:.3e}")
    return EXIT_OK


# =========================================================
# COMPARE
# =========================================================

def cmd_compare(spec: SimulationSpec, options: RunOptions) -> int:
    directory = resolve_output_dir(spec, options)
    model = spec.hybrid_model()
    params = trajectory_params(spec)

    sampler = None
    if options.debug_transpose:
        logging.warning("⚠️ Trajectories use transposed coupling indices; a FAIL is expected")
        sampler = model.with_transposed_couplings()

    report = compare_with_master(
        model, spec.initial_state(), params, spec.run.n_trajectories, spec.run.master_seed,
        master_dt=spec.run.master_dt, workers=options.workers, progress=options.progress,
        trajectory_model=sampler,
    )

    writers.write_table(
        _path(directory, "comparison", spec), writers.COLUMNS["comparison"],
        writers.comparison_rows(report.sample_times, report.distances, report.thresholds),
        _meta(spec), spec.outputs.format,
    )
    _write_metadata(directory, spec, options, "compare")

    for t, d, c in zip(report.sample_times, report.distances, report.thresholds):
        flag = "ok" if d <= c else "EXCEEDED"
        print(f"   t={t:<8g} trace distance {d:.5f}  threshold {c:.5f}  {flag}")
    print(f"{'✅' if report.passed else '❌'} {report.verdict}")
    return EXIT_OK if report.passed else EXIT_COMPARE_FAIL
