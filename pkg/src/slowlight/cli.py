"""``slowlight`` command line entry point."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .config import format_config, load_config
from .errors import ConfigError, SlowLightError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowlight",
        description="Slow-light delay and polarization routing of single photons in hot cesium vapor.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "scan": "continuous-wave port transmission versus detuning",
        "pulse": "ensemble-averaged port traces, TCSPC histograms and delays",
        "sweep": "per-helicity delay versus magnetic field",
        "validate": "resolve and check a configuration, print it, run nothing",
    }
    for name, text in helps.items():
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", help="INI configuration file (defaults apply when omitted)")
        cmd.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="override a field by dotted path, e.g. vapor.b_field=0.016; repeatable")
        if name != "validate":
            cmd.add_argument("--out", help="output directory (overrides run.output_dir)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.command != "validate":
        overrides.append(f"run.runner={args.command}")
        if args.out:
            overrides.append(f"run.output_dir={args.out}")
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        sys.stdout.write(format_config(cfg))
        return EXIT_OK

    from .runners import run

    try:
        files = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SlowLightError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in files.values():
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
