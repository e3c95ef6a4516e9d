#!/usr/bin/env python3
"""Measure step-count growth of the corpus programs under input doubling.

Prints a table of steps and doubling ratios for bubble (cubic envelope)
and the declass-bounded doubling program (quadratic envelope).

Usage: python3 scripts/growth_ratios.py [--sizes 8,16,32,64,128]
"""

import argparse
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from tierlang import interp1, parser  # noqa: E402


def measure(program, inputs_for):
    rows = []
    prev = None
    for n in SIZES:
        _, stats = interp1.run_program(program, inputs_for(n))
        ratio = stats.steps / prev if prev else float("nan")
        rows.append((n, stats.steps, ratio))
        prev = stats.steps
    return rows


def show(title, rows, envelope):
    print(f"\n{title} (doubling envelope {envelope})")
    print(f"{'n':>6} {'steps':>10} {'ratio':>7}")
    for n, steps, ratio in rows:
        mark = "" if ratio != ratio or ratio <= envelope else "  <-- exceeds"
        print(f"{n:>6} {steps:>10} {ratio:>7.2f}{mark}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="8,16,32,64")
    args = ap.parse_args()
    SIZES = [int(s) for s in args.sizes.split(",")]

    bubble = parser.parse_file(str(ROOT / "corpus" / "bubble.tl"))
    show(
        "bubble on alternating lists",
        measure(bubble, lambda n: [("10" * n)[:n]]),
        8.5,
    )

    exp1 = parser.parse_file(str(ROOT / "corpus" / "exp1.tl"))
    show(
        "declass-bounded doubling on unary inputs",
        measure(exp1, lambda n: ["1" * n, "1" * n]),
        4.25,
    )
