"""Command-line interface.

    pcslab figure <id> [--out DIR] [--workers N]
    pcslab sweep --config FILE [--out DIR] [--workers N]
    pcslab validate --config FILE
    pcslab selftest [--out DIR] [--workers N]

Exit codes: 0 success, 1 usage or config error, 2 numerical warnings.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from . import __version__
from .sweeps import (
    PRESETS,
    ConfigError,
    default_workers,
    format_params,
    parse_config,
    run_figure,
    run_sweep,
    selftest,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; usage errors here map to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcslab", description="Pair coherent state measurement sweeps and figure data.")
    parser.add_argument("--version", action="version", version=f"pcslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def workers_arg(p):
        p.add_argument(
            "--workers", type=int, default=None,
            help="parallel worker processes (default: available CPUs); output does not depend on it",
        )

    fig = sub.add_parser("figure", help="write the CSV curves of a figure preset")
    fig.add_argument("id", help="preset id: " + ", ".join(PRESETS))
    fig.add_argument("--out", default=".", help="output directory (default: current)")
    workers_arg(fig)

    sw = sub.add_parser("sweep", help="run a sweep described by a key=value config file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", default=".", help="output directory (default: current)")
    workers_arg(sw)

    val = sub.add_parser("validate", help="check a config file and print the resolved sweep")
    val.add_argument("--config", required=True)

    st = sub.add_parser("selftest", help="closed-form vs Fock-grid moment equivalence on random draws")
    st.add_argument("--out", default=".", help="directory for selftest.csv (default: current)")
    workers_arg(st)
    return parser


def _workers(args) -> int:
    n = args.workers if args.workers is not None else default_workers()
    if n < 1:
        raise ConfigError("--workers must be at least 1")
    return n


def cmd_figure(args) -> int:
    paths, problems = run_figure(args.id, args.out, _workers(args))
    for path in paths:
        print(path)
    for msg in problems:
        print(f"warning: {msg}", file=sys.stderr)
    return EXIT_NUMERICAL if problems else EXIT_OK


def cmd_sweep(args) -> int:
    spec = parse_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.config))[0]
    path = os.path.join(args.out, f"{stem}.csv")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        problems = run_sweep(spec, path, _workers(args))
    print(path)
    for msg in problems:
        print(f"warning: {msg}", file=sys.stderr)
    return EXIT_NUMERICAL if problems else EXIT_OK


def cmd_validate(args) -> int:
    spec = parse_config(args.config)
    print(f"{args.config}: ok")
    print(format_params(spec))
    for key, value in spec.resolved().items():
        print(f"  {key} = {value}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "selftest.csv")
    passed, total = selftest(path, _workers(args))
    print(f"{path}: {passed}/{total} draws within tolerance")
    return EXIT_OK if passed == total else EXIT_NUMERICAL


COMMANDS = {"figure": cmd_figure, "sweep": cmd_sweep, "validate": cmd_validate, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
