"""``apptemp`` command line: one subcommand per experiment."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import ApptempError, ConfigError, TruncationInsufficient
from .experiments import CONFIG_SCHEMA, DEFAULTS, PARAMETER_SCHEMAS, load_config, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_TRUNCATION = 0, 2, 3, 4


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, TruncationInsufficient):
        return EXIT_TRUNCATION
    # NumericalFailure and anything else raised by the library
    return EXIT_NUMERICAL


def build_parser():
    # argparse exits with 2 on usage errors, the same code as a config error
    p = argparse.ArgumentParser(prog="apptemp", description="Apparent-temperature experiments.")
    p.add_argument("--version", action="version", version=f"apptemp {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name in sorted(PARAMETER_SCHEMAS):
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", metavar="PATH", help="JSON config; omitted parameters take defaults")
        sp.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
    run = sub.add_parser("run", help="run the experiment named in a config file")
    run.add_argument("--config", metavar="PATH", required=True)
    run.add_argument("--out", metavar="PATH")
    run.add_argument("--seed", type=int)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    sc = sub.add_parser("schema", help="print the config schema and defaults of an experiment")
    sc.add_argument("experiment", nargs="?", choices=sorted(PARAMETER_SCHEMAS))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "schema":
        if args.experiment is None:
            doc = {"config": CONFIG_SCHEMA, "parameters": PARAMETER_SCHEMAS, "defaults": DEFAULTS}
        else:
            doc = {"parameters": PARAMETER_SCHEMAS[args.experiment], "defaults": DEFAULTS[args.experiment]}
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK
    try:
        experiment = None if args.command == "run" else args.command
        cfg = load_config(args.config, experiment, args.seed)
        rec = run_experiment(cfg)
        text = rec.render(args.format)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except ApptempError as exc:
        print(f"apptemp: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(exc)
    # wall time goes to stderr only so outputs stay byte-identical across runs
    print(f"apptemp: {cfg.experiment} finished in {rec.wall_time:.2f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
