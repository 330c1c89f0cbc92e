#!/usr/bin/env python3
"""Replay the preservation chain between two pointed structure files.

Evaluates a formula at the twelve stations (sources, grafted unravelings,
workspace sums, radius-k windows, plain unravelings) and prints the truth
value at each, followed by the decidable side conditions that justify the
hops.

    python scripts/chain_replay.py fixtures/fix1.json fixtures/fix2.json \
        --rank 1 --formula "(dia a tt)"
"""

import argparse
import sys

from linspect.logic import parse_formula
from linspect.oracle import replay_prop86
from linspect.structures import load_pointed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("fileA")
    parser.add_argument("fileB")
    parser.add_argument("--rank", type=int, default=1, help="observation rank r; depth bound is 2^r")
    parser.add_argument("--formula", required=True)
    args = parser.parse_args(argv)

    a = load_pointed(args.fileA)
    b = load_pointed(args.fileB)
    replay = replay_prop86(a, b, args.rank, parse_formula(args.formula))

    for name, value in replay.stations:
        print(f"{name:28s} {'TRUE' if value else 'FALSE'}")
    print()
    for name, ok in replay.checks:
        print(f"{'ok ' if ok else 'BAD'} {name}")
    print()
    print(f"constant across stations: {replay.constant}")
    print(f"side conditions hold:     {replay.sound}")
    return 0 if (replay.constant and replay.sound) else 1


if __name__ == "__main__":
    sys.exit(main())
