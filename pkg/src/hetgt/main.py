"""hetgt command-line entry point.

Subcommands: ``train``, ``depth-sweep``, ``ablation``, ``gen-synthetic``
and ``gradcheck``.  Exit codes follow :mod:`hetgt.core.errors`.
"""

from __future__ import annotations

import argparse
import logging
import os
from typing import Any

_log = logging.getLogger(__name__)

# Kernel libraries read these once, at import time.
_THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _bound_kernel_threads() -> None:
    threads = os.environ.get("HETGT_THREADS")
    if threads and threads.isdigit():
        for var in _THREAD_ENV_VARS:
            os.environ.setdefault(var, threads)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetgt", description="Heterogeneous graph tree networks: experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="Experiment config JSON (default: HETGT_CONFIG_FILE or the shipped config)")
        p.add_argument("--seed", type=int, help="Base seed; run i uses seed + i")
        p.add_argument("--runs", type=int, help="Number of seeded runs per configuration")
        p.add_argument("--depth", type=int, help="Number of propagation layers")
        p.add_argument("--out", help="Output directory")
        p.add_argument("--precision", choices=("f32", "f64"), help="Working float precision")
        return p

    experiment("train", "Train the configured model over repeated seeded runs")
    sweep = experiment("depth-sweep", "Train the configured model at several depths")
    sweep.add_argument("--depths", type=int, nargs="+", help="Depths to sweep (default: config.depths)")
    experiment("ablation", "Compare aggregators of the configured tree model")

    gen = sub.add_parser("gen-synthetic", help="Write a synthetic dataset directory")
    gen.add_argument("--spec", required=True, help="Synthetic spec JSON")
    gen.add_argument("--out", required=True, help="Output dataset directory")

    check = sub.add_parser("gradcheck", help="Finite-difference check of every op and model kind")
    check.add_argument("--corrupt", metavar="OP", help=argparse.SUPPRESS)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, dict[str, Any]]:
    return {
        "": {"runs": args.runs, "output_dir": args.out},
        "train": {"seed": args.seed, "precision": args.precision},
        "model": {"depth": args.depth},
    }


def _dispatch(args: argparse.Namespace) -> int:
    from hetgt.experiments import commands

    if args.command == "gradcheck":
        commands.cmd_gradcheck(args.corrupt)
        return 0
    if args.command == "gen-synthetic":
        commands.cmd_gen_synthetic(args.spec, args.out)
        return 0

    from hetgt.config.config_manager import load_config
    from hetgt.log_config.logger import setup_logging

    config = load_config(args.config, _overrides(args))
    setup_logging(config.system.log_level, config.system.log_dir)
    _log.info("hetgt %s (%s)", args.command, config.model.label)

    if args.command == "train":
        commands.cmd_train(config)
    elif args.command == "depth-sweep":
        commands.cmd_depth_sweep(config, args.depths)
    elif args.command == "ablation":
        commands.cmd_ablation(config)
    return 0


def main(argv: list[str] | None = None) -> int:
    """Parse *argv*, run the subcommand and return its exit code."""
    args = _build_parser().parse_args(argv)
    _bound_kernel_threads()

    from hetgt.core.errors import EXIT_FAILURE, HetGTError
    from hetgt.log_config.logger import setup_logging

    # Console only until the config names a log directory.
    setup_logging(os.environ.get("HETGT_LOG_LEVEL", "INFO"), log_dir=None)
    try:
        return _dispatch(args)
    except HetGTError as exc:
        _log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except Exception:
        _log.exception("Unexpected error in %s", args.command)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
