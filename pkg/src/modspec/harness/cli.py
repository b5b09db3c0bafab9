"""Command-line entry point: one subcommand per experiment driver."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from . import experiments

DRIVERS = {
    "conserve": experiments.run_conservation,
    "normequiv": experiments.run_norm_equivalence,
    "apriori": experiments.run_apriori,
    "galilei": experiments.run_galilei,
    "scaling": experiments.run_scaling,
    "tails": experiments.run_tails,
    "weights": experiments.run_weights,
}

HELP = {
    "conserve": "determinant-functional drift along a flow",
    "normequiv": "banded norm vs boosted quadratic-functional norm",
    "apriori": "global norm bounds over an amplitude sweep",
    "galilei": "boost/evolve two-path consistency",
    "scaling": "scaling-factor and embedding constants over a field suite",
    "tails": "quartic and sextic-and-up tail inequalities",
    "weights": "equicontinuity weight construction and verification",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modspec",
                                description="desk-scale experiments for the spectral toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name in DRIVERS:
        q = sub.add_parser(name, help=HELP[name])
        q.add_argument("--config", type=Path, help="JSON config file (defaults otherwise)")
        q.add_argument("--out", type=Path, default=Path("reports"), help="output directory")
        q.add_argument("--seed", type=int, help="override config seed")
        q.add_argument("--dt", type=float, help="override config dt")
        q.add_argument("--grid", type=str, metavar="N,L", help="override grid, e.g. 1024,100.5")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    if args.dt is not None:
        cfg.dt = args.dt
    if args.grid is not None:
        try:
            n_str, l_str = args.grid.split(",")
            cfg.grid_n, cfg.grid_length = int(n_str), float(l_str)
        except ValueError:
            print(f"error: --grid expects N,L, got {args.grid!r}", file=sys.stderr)
            return 2

    result = DRIVERS[args.command](cfg)
    csv_path, json_path = result.write(args.out)
    for e in result.summary:
        status = "PASS" if e.passed else "FAIL"
        print(f"[{status}] {e.criterion}: measured {e.measured:.6g} vs threshold {e.threshold:.6g}")
    print(f"rows: {len(result.rows)} -> {csv_path}")
    print(f"summary -> {json_path}")
    return 0 if result.all_pass else 1


if __name__ == "__main__":
    raise SystemExit(main())
