"""Command-line entry points.

  altsim run <spec.json> [--out DIR] [--threads N]
  altsim suite <name> [--fast]

`run` executes one experiment spec (or a previously written manifest) and
exits 0 on success, 1 if a verdict-bearing diagnostic failed, 2 on config
errors, 3 on numerical failures. `suite` executes a named acceptance group
(identities, convergence, stationary, fixation, chaos, invasion, all) with
pinned seeds and prints one PASS/FAIL line per criterion. The ALTSIM_OUT
environment variable sets the default output root for `run`.
"""

from __future__ import annotations

import argparse
import json
import sys

from .acceptance import FAST_NOTES, SUITES, run_suite
from .experiments import EXIT_CONFIG_ERROR, run_experiment_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="altsim", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run one experiment spec (JSON)")
    run_p.add_argument("spec", help="path to the experiment spec or manifest JSON")
    run_p.add_argument("--out", default=None, help="output root directory (default: $ALTSIM_OUT or ./altsim_out)")
    run_p.add_argument("--threads", type=int, default=1,
                       help="reserved concurrency knob; outputs are identical for every value")

    suite_p = sub.add_parser("suite", help="run a named acceptance group")
    suite_p.add_argument("name", help=f"one of {', '.join(sorted(SUITES))}")
    suite_p.add_argument("--fast", action="store_true",
                         help="10x fewer replicas, 2x wider statistical tolerances")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        code, out_dir = run_experiment_file(args.spec, out_root=args.out, threads=args.threads)
        if out_dir:
            print(f"outputs in {out_dir}")
        return code
    if args.command == "suite":
        if args.fast and args.name in SUITES:
            notes = [f"  criterion {k}: {v}" for k, v in sorted(FAST_NOTES.items()) if k in SUITES[args.name]]
            if notes:
                print("fast-mode adjustments:")
                print("\n".join(notes))
        code, results = run_suite(args.name, fast=args.fast)
        if code == 2:
            return EXIT_CONFIG_ERROR
        summary = {
            "suite": args.name,
            "fast": args.fast,
            "criteria": [
                {"index": r.index, "name": r.name, "passed": r.passed, "seconds": round(r.seconds, 2)}
                for r in results
            ],
        }
        print(json.dumps(summary))
        return code
    parser.print_help()
    return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
