"""
Run-configuration and output package.

YAML configs validated into SimulationSpec, delimited data writers and
the subcommand implementations behind scripts/eeqt_cli.py.
"""

from simio.commands import (
    RunOptions,
    cmd_compare,
    cmd_ensemble,
    cmd_master,
    cmd_trajectory,
    cmd_validate,
    model_summary,
    resolve_output_dir,
)
from simio.parser import (
    load_config,
    parse_config,
    sample_times,
    spec_from_dict,
    trajectory_params,
    with_overrides,
)
from simio.schema import SimulationSpec

__all__ = [
    "RunOptions",
    "SimulationSpec",
    "cmd_compare",
    "cmd_ensemble",
    "cmd_master",
    "cmd_trajectory",
    "cmd_validate",
    "load_config",
    "model_summary",
    "parse_config",
    "resolve_output_dir",
    "sample_times",
    "spec_from_dict",
    "trajectory_params",
    "with_overrides",
]
