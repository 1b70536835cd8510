"""Command-line experiment runner.

One subcommand per analysis kind; exit code 0 iff every analysis passed
its declared tolerances. Without --config, a tuned default experiment for
that subcommand is used.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import harness

_SUBCOMMANDS = {
    "validate-encounters": "encounter-fit",
    "validate-tasks": "task-fit",
    "estimator-bias": "estimator-bias",
    "closed-loop": "closed-loop",
    "throughput-curve": "throughput-curve",
    "optimal-density": "optimal-density",
    "full-sim": "full-sim",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmretreat",
        description="Swarm density-regulation simulator and model validation suite",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config file (YAML key-value)")
        p.add_argument("--seed", type=int, help="base seed (replica i uses seed + i)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--replicas", type=int, help="number of replicas")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    kind = _SUBCOMMANDS[args.command]
    if args.config:
        spec = harness.load_config(args.config)
        if args.seed is not None:
            spec = dataclasses.replace(
                spec, sim=dataclasses.replace(spec.sim, seed=args.seed)
            )
        if args.replicas is not None:
            spec = dataclasses.replace(spec, replicas=args.replicas)
        if args.out is not None:
            spec = dataclasses.replace(spec, outputs=args.out)
    else:
        spec = harness.default_spec(
            kind,
            seed=args.seed if args.seed is not None else 20260826,
            replicas=args.replicas,
            outputs=args.out or "out",
        )
    reports = harness.run_experiment(spec)
    ok = True
    print("analysis,metric,value,tolerance,pass")
    for rep in reports:
        ok = ok and rep.passed
        for line in rep.lines():
            print(line)
    print(f"# overall: {'PASS' if ok else 'FAIL'}  (report in {spec.outputs}/report.csv)")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
