"""Command-line front end: ``valuegap --scenario NAME [parameters]``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from valuegap.report import FORMATS, SCENARIOS, ConfigError, ScenarioConfig, render, run

PARAM_FLAGS = ("alpha", "delta", "gamma", "cells", "mode", "levels", "eps", "eta0", "eta1",
               "trunc", "witness-m", "y", "b-file", "samples")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="valuegap", description="Run a value-function scenario and print its report.")
    ap.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    for name in PARAM_FLAGS:
        ap.add_argument(f"--{name}", dest=name.replace("-", "_"), default=None, metavar=name.upper())
    ap.add_argument("--tol", default=None, help="comparison tolerance (rational)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=FORMATS, default="json")
    return ap


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    params = {name: getattr(args, name.replace("-", "_")) for name in PARAM_FLAGS}
    params = {k: v for k, v in params.items() if v is not None}
    return ScenarioConfig.make(args.scenario, params, tol=args.tol, seed=args.seed, format=args.format)


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from_args(args)
        rep = run(cfg)
    except ConfigError as exc:
        ap.error(f"invalid --{exc.field}: {exc}")
    sys.stdout.write(render(rep, cfg.format))
    failed = [c["name"] for c in rep.checks if not c["pass"]]
    for name in failed:
        print(f"check failed: {name}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
