# scripts/eeqt_cli.py

import argparse
import logging
import os
import sys

# ---- ensure project root is on path ----
ROOT_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

from config import EXIT_CONFIG_ERROR, EXIT_OK, PROJECT_NAME
from simio.commands import (
    RunOptions,
    cmd_compare,
    cmd_ensemble,
    cmd_master,
    cmd_trajectory,
    cmd_validate,
)
from simio.parser import load_config, with_overrides
from utils.errors import ConfigError, EEQTError, ModelError
from utils.run_state import config_digest


def _validate(spec, options) -> int:
    cmd_validate(spec, options)
    return EXIT_OK


COMMANDS = {
    "validate": _validate,
    "trajectory": cmd_trajectory,
    "ensemble": cmd_ensemble,
    "master": cmd_master,
    "compare": cmd_compare,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the config-error exit code
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="YAML run configuration")
    common.add_argument("--seed", type=int, default=None, help="override run.master_seed")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--workers", type=int, default=1, help="worker processes (speed only)")
    common.add_argument("--scheme", choices=["fixed-dt", "norm-threshold"], default=None)
    common.add_argument("--verbose", action="store_true", help="debug logging")
    common.add_argument("--no-progress", action="store_true", help="hide the progress bar")

    parser = _Parser(prog="eeqt", description=f"{PROJECT_NAME}: hybrid quantum-classical event simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("validate", "trajectory", "ensemble", "master"):
        sub.add_parser(name, parents=[common])
    compare = sub.add_parser("compare", parents=[common])
    compare.add_argument(
        "--debug-transpose-couplings",
        action="store_true",
        help="run trajectories with source/destination swapped (should FAIL)",
    )
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"❌ Usage error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )

    if args.workers < 1:
        logging.error("❌ --workers must be at least 1")
        return EXIT_CONFIG_ERROR

    try:
        spec = with_overrides(load_config(args.config), seed=args.seed, scheme=args.scheme)
    except OSError as e:
        logging.error(f"❌ Cannot read config: {e}")
        return EXIT_CONFIG_ERROR
    except (ConfigError, ModelError) as e:
        logging.error(f"❌ Invalid config: {e}")
        return EXIT_CONFIG_ERROR

    options = RunOptions(
        out_dir=args.out,
        workers=args.workers,
        progress=not args.no_progress,
        config_sha256=config_digest(args.config),
        debug_transpose=getattr(args, "debug_transpose_couplings", False),
    )

    try:
        return COMMANDS[args.command](spec, options)
    except EEQTError as e:
        logging.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
