"""
Command line entry point: ``rising-gue [options] [command] --config FILE``.

The config file holds the experiment; flags only override ``seed``, ``out``,
``threads`` and the command. Exit status is 0 on success, 2 for an invalid
configuration and 3 when a numerical method does not converge.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, exceptions as ex
from .experiments import COMMANDS, ExperimentConfig, run

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rising-gue",
        description="Kernels, samplers and convergence experiments for the "
        "rising GUE process started from a fixed configuration.",
    )
    parser.add_argument(
        "command",
        nargs="?",
        help=f"Experiment to run, overrides the config: {', '.join(COMMANDS)}",
    )
    parser.add_argument("--config", type=Path, help="Experiment config (JSON)")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--seed", type=int, help="Batch seed")
    parser.add_argument(
        "--threads", type=int, help="Worker processes (default: MK_THREADS or all)"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log at DEBUG level"
    )
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT
    )
    logging.captureWarnings(True)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "command": args.command,
        "out": None if args.out is None else str(args.out),
        "seed": args.seed,
        "threads": args.threads,
    }
    if args.config is None:
        return ExperimentConfig.from_dict({}, overrides)
    return ExperimentConfig.from_file(args.config, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        config = load_config(args)
        paths = run(config)
    except (ex.ConfigError, ex.ConfigurationError) as e:
        log.error("%s", e)
        print(f"rising-gue: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ex.NonConvergence, ex.NonFiniteValue) as e:
        log.error("%s", e)
        print(f"rising-gue: no convergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ex.RisingGUEException as e:
        log.exception("Experiment failed")
        print(f"rising-gue: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE

    for path in paths:
        print(path)
    return EXIT_OK
