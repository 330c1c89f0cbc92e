#!/usr/bin/env python3
"""Print the full relation spectrum between two pointed structure files.

For each bound k the report lists every relation verdict, and for each failed
fragment the shortest distinguishing formula found.

    python scripts/spectrum_report.py fixtures/fix3.json fixtures/fix4.json --max-k 3
"""

import argparse
import sys

from linspect.games import solve_bisim
from linspect.logic import render_formula, synth_distinguishing
from linspect.structures import load_pointed
from linspect.traces import check_trace_relation

FRAGMENTS = ("DiamondPos", "Diamond", "DeadlockDiamond", "Graded")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("fileA")
    parser.add_argument("fileB")
    parser.add_argument("--max-k", type=int, default=3)
    args = parser.parse_args(argv)

    a = load_pointed(args.fileA)
    b = load_pointed(args.fileB)

    print(f"{'k':>2}  {'tr':>3} {'ltr':>3} {'cltr':>4} {'gltr':>4} {'rt':>3} {'bisim':>5}")
    for k in range(args.max_k + 1):
        cells = []
        for rel in ("tr", "ltr", "cltr", "gltr", "rt"):
            cells.append("T" if check_trace_relation(rel, a, b, k).holds else "F")
        cells.append("T" if solve_bisim(a, b, k).duplicator_wins else "F")
        print(f"{k:>2}  {cells[0]:>3} {cells[1]:>3} {cells[2]:>4} {cells[3]:>4} {cells[4]:>3} {cells[5]:>5}")

    print()
    for rel in ("tr", "ltr", "cltr"):
        verdict = check_trace_relation(rel, a, b, "exact")
        line = "holds" if verdict.holds else f"fails: {verdict.render_witness()}"
        print(f"exact {rel:4s} {line}")

    print()
    k = args.max_k
    for fragment in FRAGMENTS:
        formula = synth_distinguishing(a, b, k, fragment)
        if formula is None:
            print(f"{fragment:16s} equivalent at k={k}")
        else:
            print(f"{fragment:16s} separated by {render_formula(formula)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
