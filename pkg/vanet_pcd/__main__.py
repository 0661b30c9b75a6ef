#!/usr/bin/env python3
"""
Entry point for the VANET content distribution simulator.
This file allows the simulator to be run as a module with:
python -m vanet_pcd
"""

import sys
import logging
import argparse
from pathlib import Path

from vanet_pcd.core.experiment import ExperimentRunner
from vanet_pcd.utils.config import ScenarioConfig, emit_config, load_config, parse_sweep
from vanet_pcd.utils.constants import APP_DESCRIPTION, APP_NAME, APP_VERSION, EXIT_CODES, SCHEMES
from vanet_pcd.utils.exceptions import ConfigError
from vanet_pcd.utils.logger import setup_logging


def build_parser() -> argparse.ArgumentParser:
    """Command line parser"""
    parser = argparse.ArgumentParser(
        description=f"{APP_NAME} - {APP_DESCRIPTION}",
        prog="vanet_pcd"
    )

    parser.add_argument(
        "--config",
        type=str,
        help="Path to a scenario file (default: built-in parameters)"
    )

    parser.add_argument(
        "--scheme",
        choices=list(SCHEMES) + ["both"],
        help="Broadcast scheme to simulate (default: scheme key of the config)"
    )

    parser.add_argument(
        "--seed",
        type=int,
        help="First seed (default: seed key of the config)"
    )

    parser.add_argument(
        "--seeds",
        type=int,
        help="Number of consecutive seeds per point (default: 1, or seeds_per_point when sweeping)"
    )

    parser.add_argument(
        "--sweep",
        action="append",
        default=[],
        metavar="KEY=LIST",
        help="Sweep a key over values and start:stop[:step] ranges, e.g. N=5:30:5 (repeatable)"
    )

    parser.add_argument(
        "--out",
        type=str,
        default="results",
        help="Output directory (default: results)"
    )

    parser.add_argument(
        "--t-max",
        type=int,
        help="Slot horizon (overrides t_max)"
    )

    parser.add_argument(
        "--workers",
        type=int,
        help="Parallel simulation processes (overrides workers)"
    )

    parser.add_argument(
        "--dump-config",
        action="store_true",
        help="Print the effective configuration and exit"
    )

    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default="INFO",
        help="Set the logging level (default: INFO)"
    )

    parser.add_argument(
        "--log-file",
        type=str,
        help="Path to a rotating log file (default: console only)"
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"{APP_NAME} v{APP_VERSION}"
    )

    return parser


def resolve_config(args) -> ScenarioConfig:
    """Scenario from the config file with command line overrides applied"""
    config = load_config(args.config) if args.config else ScenarioConfig()

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.scheme in SCHEMES:
        overrides["scheme"] = args.scheme
    return config.replace(**overrides) if overrides else config


def main(argv=None) -> int:
    """Main entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)

    setup_logging(getattr(logging, args.log_level.upper()), Path(args.log_file) if args.log_file else None)
    logger = logging.getLogger("vanet_pcd.main")

    try:
        config = resolve_config(args)
        sweeps = [parse_sweep(expression) for expression in args.sweep]
        if args.seeds is not None and args.seeds < 1:
            raise ConfigError(f"--seeds must be at least 1, got {args.seeds}")

        if args.dump_config:
            sys.stdout.write(emit_config(config))
            return EXIT_CODES["SUCCESS"]

        schemes = list(SCHEMES) if args.scheme == "both" else [config.scheme]
        count = args.seeds if args.seeds is not None else (config.seeds_per_point if sweeps else 1)
        seeds = list(range(config.seed, config.seed + count))

        logger.info(f"{APP_NAME} v{APP_VERSION} starting")
        runner = ExperimentRunner(config, Path(args.out))
        runner.run(schemes, seeds, sweeps)
        logger.info("All runs finished")
        return EXIT_CODES["SUCCESS"]

    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CODES["CONFIG_ERROR"]
    except KeyboardInterrupt:
        print("\nInterrupted by user.", file=sys.stderr)
        return EXIT_CODES["RUNTIME_ERROR"]
    except Exception as e:
        logger.critical(f"Fatal error: {e}", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CODES["RUNTIME_ERROR"]


if __name__ == "__main__":
    sys.exit(main())
