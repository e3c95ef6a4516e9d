#!/usr/bin/env python3
"""Differential fuzzing of the analysis and the monitor.

For randomly generated programs this cross-checks
  * constraint-based safety inference against brute-force enumeration, and
  * the streaming aperiodicity monitor against a materialized-tree check.

Usage: python3 scripts/differential_fuzz.py [--n 500] [--seed 1]
"""

import argparse
import pathlib
import random
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

import treecheck  # noqa: E402
from tierlang import genprog, interp1, parser, safety1  # noqa: E402


def monitor_verdict(program, inputs):
    try:
        interp1.run_program(program, inputs, budget=5000, monitor=True)
    except interp1.AperiodicityViolation:
        return True
    except interp1.TopLevelBreak:
        pass
    return False


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    safety_checked = safety_safe = 0
    monitor_checked = monitor_periodic = 0
    for i in range(args.n):
        program = genprog.random_program(rng)
        inferred = safety1.infer_safety(program).safe
        brute = safety1.brute_force_safe(program, 3)
        if inferred != brute:
            print("SAFETY DISAGREEMENT:")
            print(parser.pretty_print(program))
            return 1
        safety_checked += 1
        safety_safe += inferred

        inputs = [
            "".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
            for _ in program.params
        ]
        try:
            interp1.run_program(program, inputs, budget=50)
        except interp1.BudgetExhausted:
            continue
        except interp1.TopLevelBreak:
            pass
        streaming = monitor_verdict(program, inputs)
        tree = treecheck.periodic_by_tree(program, inputs)
        if streaming != tree:
            print("MONITOR DISAGREEMENT:")
            print(parser.pretty_print(program), inputs)
            return 1
        monitor_checked += 1
        monitor_periodic += streaming

    print(
        f"safety: {safety_checked} programs, {safety_safe} safe, 0 disagreements"
    )
    print(
        f"monitor: {monitor_checked} runs, {monitor_periodic} periodic, "
        f"0 disagreements"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
