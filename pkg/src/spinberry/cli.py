"""Command-line front end.

Exit status: 0 success (all checks pass), 1 invalid configuration or input,
2 a tolerance check or acceptance criterion failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import acceptance, config, runs
from .errors import ConfigError, SpinBerryError

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2

COMMANDS = {
    "spin-expectation": runs.run_spin_expectation,
    "connection": runs.run_connection,
    "curvature": runs.run_curvature,
    "phase": runs.run_phase,
    "adiabatic": runs.run_adiabatic,
}


def _parse_set(items):
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinberry", description="Berry phases of spin-parametrized Dirac wave packets.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--output", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="report format (default json)")
    common.add_argument("--seed", type=int, help="seed for the randomized acceptance points")
    common.add_argument("--quiet", action="store_true", help="suppress progress and summary lines on stderr")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config entry, e.g. contour.theta=0.5")
    common.add_argument(
        "--resolution-scale", type=float, metavar="F", help="multiply every discretization count (quadrature, contour, mesh, steps) by F"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "verify-all"):
        sub.add_parser(name, parents=[common])
    return parser


def load_config(args) -> dict:
    overrides = _parse_set(args.set)
    if args.format:
        overrides["output.format"] = args.format
    if args.output:
        overrides["output.path"] = str(args.output)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.resolution_scale is not None:
        overrides["resolution_scale"] = args.resolution_scale
    return config.load(args.config, overrides)


def render(report, cfg) -> str:
    if cfg["output"]["format"] == "csv":
        return report.to_csv()
    extra = {}
    if cfg["output"]["timestamp"]:
        extra["timestamp"] = datetime.now(timezone.utc).isoformat()
    if cfg["output"]["timing"] and hasattr(report, "results"):
        extra["timing"] = {str(r.number): r.seconds for r in report.results}
    return report.to_json(extra)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    try:
        cfg = load_config(args)
        if args.command == "verify-all":
            report = acceptance.run_all(cfg, progress=lambda r: log(r.headline()))
        else:
            report = COMMANDS[args.command](cfg)
    except (SpinBerryError, ValueError) as exc:
        print(f"spinberry: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(report, cfg)
    path = cfg["output"]["path"]
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)
    if report.failed:
        log("FAILED: " + ", ".join(report.failed))
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
