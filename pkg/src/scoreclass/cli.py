"""Command-line front end.

Subcommands: ``eval`` (cost one strategy on one instance file),
``experiment`` (ratio sweep to CSV), ``gen`` (write generated instances),
and ``reproduce-appendix-a`` (recheck the bundled counterexample).
Exit codes: 0 success and all bounds hold, 1 bound or reproduction failure,
2 usage or resource errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .appendix_a import run_reproduction
from .errors import ScoreClassError
from .harness import (build_strategy, canonical_oracle, generate, load_config,
                      run_experiment, write_csv)
from .model import load_instance, save_instance
from .oracle import optimal_adaptive, optimal_nonadaptive, strategy_cost


def _cmd_eval(args) -> int:
    instance = load_instance(args.instance)
    strategy = build_strategy(args.strategy, instance)
    report = strategy_cost(instance, strategy)
    out = {
        "strategy": args.strategy,
        "strategy_id": report.strategy_id,
        "expected_cost": report.total,
        "per_block": {str(j): v for j, v in sorted(report.per_block.items())},
    }
    if args.strategy == "trr":
        from .unanimous import trr_best
        out["plan"] = trr_best(instance)[0].as_dict()
    if args.oracle:
        kind = canonical_oracle(args.strategy, instance)
        oracle_cost = (optimal_adaptive(instance)[0] if kind == "ADAPTIVE"
                       else optimal_nonadaptive(instance)[0])
        out["oracle"] = kind
        out["oracle_cost"] = oracle_cost
        out["ratio"] = report.total / oracle_cost
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    records = run_experiment(config)
    write_csv(records, args.out)
    violations = sum(1 for r in records if not r.within_bound)
    print(f"wrote {len(records)} records to {args.out}; {violations} bound violations")
    return 1 if violations else 0


def _cmd_gen(args) -> int:
    config = load_config(args.config)
    os.makedirs(args.out_dir, exist_ok=True)
    count = 0
    for instance_id, instance in generate(config):
        save_instance(instance, os.path.join(args.out_dir, f"instance_{instance_id}.json"))
        count += 1
    print(f"wrote {count} instances to {args.out_dir}")
    return 0


def _cmd_reproduce(args) -> int:
    report = run_reproduction()
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scoreclass",
        description="Sequential test ordering for score classification: "
                    "strategies, exact oracles, and ratio experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="expected cost of one strategy on one instance")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--strategy", required=True, help="registered strategy name")
    p.add_argument("--oracle", action="store_true",
                   help="also report the matching optimum and the cost ratio")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a seeded ratio sweep to CSV")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("gen", help="write generated instances as JSON files")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--out-dir", required=True, help="directory for instance files")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("reproduce-appendix-a",
                       help="recheck the bundled verification-gap counterexample")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScoreClassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
