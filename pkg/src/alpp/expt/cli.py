"""Command-line entry point ``alpp``.

Exit codes: 0 success, 2 configuration error, 3 model-consistency failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from ..errors import AlppError, ConfigError, DomainError, ModelConsistencyError
from .config import COMMANDS, build_config, parse_value, read_config_file
from .experiments import run
from .io import _jsonable, write_result

_FLAGS = ("n", "delta", "seeds", "eps", "M", "eta", "out", "threads", "alpha", "x", "y", "zstep",
          "mlist", "K", "avg_trials", "synthetic", "n_boot")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alpp", description="Brownian LPP experiments in KPZ-scaled coordinates.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", help="number of lines (INT)")
    p.add_argument("--delta", help="grid spacing; default n^(-1/3)")
    p.add_argument("--seeds", help="BASE:COUNT")
    p.add_argument("--eps", help="comma-separated list; 2^-k is accepted")
    p.add_argument("--M", dest="M", help="half-width of the z window")
    p.add_argument("--eta")
    p.add_argument("--out", help="output directory for CSV and JSON")
    p.add_argument("--threads")
    p.add_argument("--config", help="key = value file")
    p.add_argument("--alpha")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--zstep", help="profile grid spacing; default min(eps)/4")
    p.add_argument("--mlist", help="M values for nondegen")
    p.add_argument("--K", dest="K")
    p.add_argument("--avg-trials", dest="avg_trials")
    p.add_argument("--synthetic", help="dimension: constant, linear, cantor or cantor4")
    p.add_argument("--n-boot", dest="n_boot")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cli_values = dict(parse_value(k, getattr(args, k)) for k in _FLAGS if getattr(args, k) is not None)
        cfg = build_config(args.command, file_values, cli_values)
        result = run(cfg)
    except (ConfigError, DomainError) as exc:
        print(f"alpp: configuration error: {exc}", file=sys.stderr)
        return 2
    except ModelConsistencyError as exc:
        print(f"alpp: model-consistency failure: {exc}", file=sys.stderr)
        return 3
    except AlppError as exc:
        print(f"alpp: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        for path in write_result(result, cfg.out):
            print(path)
    print(json.dumps(_jsonable(result.summary), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
