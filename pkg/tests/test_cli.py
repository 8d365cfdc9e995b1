"""
Config + CLI Test

Evaluator intent:
- Bad configs MUST fail with a located error (field path or line), exit code 1
- compare MUST PASS on the detector and FAIL (exit 2) with transposed couplings
- Data files MUST NOT depend on the worker count
- Run metadata MUST parse back to the same spec
"""

import hashlib
import importlib.util
import json
import os

import numpy as np
import pytest

from linalg import projector
from model import builtin_model, lambda_operator
from simio import parse_config, spec_from_dict, with_overrides
from simio.writers import read_table
from utils.errors import ConfigModelError, ConfigSyntaxError, NonzeroDiagonalCoupling, SchemaViolation
from utils.run_state import load_metadata


ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
_spec = importlib.util.spec_from_file_location("eeqt_cli", os.path.join(ROOT, "scripts", "eeqt_cli.py"))
eeqt_cli = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(eeqt_cli)


DETECTOR = """
model:
  builtin: qubit-detector
  parameters: {omega: 1.0, kappa: 1.0}
initial:
  psi: [[1, 0], [0, 0]]
  alpha: 1
run:
  scheme: fixed-dt
  dt: 0.001
  t_end: 2.0
  sample_times: [0.5, 1.0, 2.0]
  n_trajectories: 1000
  master_seed: 7
"""

ZERO_2x2 = "[[0, 0], [0, 0]]"


def _explicit(couplings="[]", h1=ZERO_2x2, extra=""):
    return f"""
model:
  n: 2
  m: 2
  hamiltonians:
    - {h1}
    - {ZERO_2x2}
  couplings: {couplings}
{extra}
initial:
  psi: [1, 0]
  alpha: 1
run:
  t_end: 2.0
"""


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------- parsing ----------

def test_builtin_config_round_trips_to_library_model():
    spec = parse_config(DETECTOR)
    model = spec.hybrid_model()
    reference = builtin_model("qubit-detector", {"omega": 1.0, "kappa": 1.0})
    assert np.array_equal(model.operators_at(0).G, reference.operators_at(0).G)
    assert np.array_equal(model.operators_at(0).H, reference.operators_at(0).H)
    assert spec.initial_state().alpha == 1


def test_diagonal_coupling_located():
    text = _explicit("[{from: 1, to: 1, matrix: [[1, 0], [0, 1]]}]")
    with pytest.raises(ConfigModelError) as err:
        parse_config(text)
    assert err.value.path == "model.couplings[0]"
    assert isinstance(err.value.cause, NonzeroDiagonalCoupling)


def test_non_hermitian_hamiltonian_located():
    with pytest.raises(ConfigModelError) as err:
        parse_config(_explicit(h1="[[0, 1], [0, 0]]"))
    assert err.value.path == "model.hamiltonians[0]"


def test_missing_t_end_names_field():
    text = DETECTOR.replace("  t_end: 2.0\n", "")
    with pytest.raises(SchemaViolation) as err:
        parse_config(text)
    assert err.value.path == "run.t_end"


def test_syntax_error_has_line():
    with pytest.raises(ConfigSyntaxError) as err:
        parse_config("model:\n  builtin: [unclosed\n")
    assert err.value.line is not None


def test_initial_state_normalized_with_warning(caplog):
    text = DETECTOR.replace("psi: [[1, 0], [0, 0]]", "psi: [1, 1]")
    with caplog.at_level("WARNING"):
        spec = parse_config(text)
    assert np.allclose(spec.initial_state().psi, [2 ** -0.5, 2 ** -0.5])
    assert any("normalizing" in r.getMessage() for r in caplog.records)


def test_complex_entries_and_segments():
    coupling = "[{from: 1, to: 2, matrix: [[0, 0], [0, [1, 0]]]}]"
    segments = f"""  segments:
    - start: 1.0
      couplings: {coupling}"""
    spec = parse_config(_explicit(extra=segments))
    model = spec.hybrid_model()
    assert model.breakpoints() == (0.0, 1.0)
    assert np.allclose(lambda_operator(model, 1, t=0.5), 0)
    assert np.allclose(lambda_operator(model, 1, t=1.5), projector(1, 2))


def test_overrides_take_precedence():
    spec = with_overrides(parse_config(DETECTOR), seed=99, scheme="norm-threshold")
    assert spec.run.master_seed == 99
    assert spec.run.scheme == "norm-threshold"
    assert spec.hybrid_model() is not None


# ---------- commands ----------

def test_validate_lists_all_channels(tmp_path, capsys):
    text = DETECTOR.replace("builtin: qubit-detector", "builtin: branching-detector").replace(
        "parameters: {omega: 1.0, kappa: 1.0}", "parameters: {kappa_a: 1.0}"
    )
    code = eeqt_cli.main(["validate", "--config", _write(tmp_path, text)])
    out = capsys.readouterr().out
    assert code == 0
    assert "Event channels (6)" in out


def test_usage_and_config_errors_exit_1(tmp_path):
    assert eeqt_cli.main(["validate"]) == 1
    assert eeqt_cli.main(["explode", "--config", "x.yaml"]) == 1
    assert eeqt_cli.main(["validate", "--config", str(tmp_path / "missing.yaml")]) == 1
    bad = _write(tmp_path, DETECTOR.replace("  t_end: 2.0\n", ""))
    assert eeqt_cli.main(["master", "--config", bad]) == 1


def test_trajectory_and_master_files(tmp_path):
    config = _write(tmp_path, DETECTOR)
    out = str(tmp_path / "out")
    assert eeqt_cli.main(["trajectory", "--config", config, "--out", out, "--no-progress"]) == 0
    comment, header, rows = read_table(os.path.join(out, "snapshots.csv"))
    assert comment.startswith("# seed=7 scheme=fixed-dt")
    assert header == ["t", "alpha", "component", "re", "im"]
    assert len(rows) == 3 * 2

    assert eeqt_cli.main(["master", "--config", config, "--out", out]) == 0
    _, header, rows = read_table(os.path.join(out, "master_occupation.csv"))
    assert header == ["t", "p_1", "p_2"]
    assert len(rows) == 3


def test_compare_pass_and_transposed_fail(tmp_path):
    config = _write(tmp_path, DETECTOR)
    out = str(tmp_path / "cmp")
    assert eeqt_cli.main(["compare", "--config", config, "--out", out, "--no-progress"]) == 0
    _, header, rows = read_table(os.path.join(out, "comparison.csv"))
    assert header == ["t", "trace_distance", "threshold"]
    assert all(float(d) <= float(c) for _, d, c in rows)

    code = eeqt_cli.main([
        "compare", "--config", config, "--out", out, "--no-progress", "--debug-transpose-couplings",
    ])
    assert code == 2


def test_ensemble_files_independent_of_workers(tmp_path):
    config = _write(tmp_path, DETECTOR.replace("n_trajectories: 1000", "n_trajectories: 400"))
    one, many = str(tmp_path / "w1"), str(tmp_path / "w8")
    assert eeqt_cli.main(["ensemble", "--config", config, "--out", one, "--workers", "1", "--no-progress"]) == 0
    assert eeqt_cli.main(["ensemble", "--config", config, "--out", many, "--workers", "8", "--no-progress"]) == 0
    names = sorted(os.listdir(one))
    assert "event_statistics.csv" in names and "reduced_density.csv" in names
    assert names == sorted(os.listdir(many))
    for name in names:
        with open(os.path.join(one, name), "rb") as a, open(os.path.join(many, name), "rb") as b:
            assert a.read() == b.read(), name


def test_metadata_reparses_to_same_spec(tmp_path):
    config = _write(tmp_path, DETECTOR)
    out = str(tmp_path / "meta")
    assert eeqt_cli.main(["master", "--config", config, "--out", out, "--seed", "123"]) == 0
    meta = load_metadata(out)
    assert meta["seed"] == 123
    assert len(meta["config_sha256"]) == 64
    with open(config, "rb") as f:
        assert meta["config_sha256"] == hashlib.sha256(f.read()).hexdigest()

    again = spec_from_dict(json.loads(json.dumps(meta["spec"])))
    original = with_overrides(parse_config(DETECTOR), seed=123)
    assert again.run.model_dump() == original.run.model_dump()
    assert again.model.model_dump() == original.model.model_dump()
    assert np.allclose(again.initial_state().psi, original.initial_state().psi)
