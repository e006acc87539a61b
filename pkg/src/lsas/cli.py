"""Command-line entry point: ``simulate <config-path> [--seed N] [--trials N] [--output PATH]``."""

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from .config import load_config
from .exceptions import ConfigError, ExperimentError
from .experiments import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser():
    p = argparse.ArgumentParser(prog="simulate",
                                description="Run a large-scale antenna system experiment "
                                            "and write its results as CSV.")
    p.add_argument("config", help="experiment configuration file")
    p.add_argument("--seed", type=int, help="override [scenario] rng_seed")
    p.add_argument("--trials", type=int, help="override [scenario] num_trials")
    p.add_argument("--output", help="override [experiment] output")
    p.add_argument("-v", "--verbose", action="store_true", help="log each sweep point")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = load_config(args.config)
        for flag, name, value in (("--seed", "rng_seed", args.seed),
                                  ("--trials", "num_trials", args.trials)):
            if value is None:
                continue
            try:
                spec = replace(spec, scenario=spec.scenario.replace(**{name: value}))
            except ValueError as exc:
                raise ConfigError(str(exc), key=flag) from None
        if args.output is not None:
            spec = replace(spec, output_path=args.output)
    except OSError as exc:
        print(f"simulate: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"simulate: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows = run_experiment(spec)
    except (ExperimentError, np.linalg.LinAlgError) as exc:
        print(f"simulate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {len(rows)} rows to {spec.output_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
