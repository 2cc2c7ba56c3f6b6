#!/usr/bin/env python3
"""Run both counterexample searches and print the witnesses.

Usage: python scripts/search_counterexamples.py [--budget N]
"""

import argparse
import json
import math
import sys

from mercerlab.errors import BudgetExhausted
from mercerlab.harness import search_counterexample


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=10)
    args = parser.parse_args()

    found = 0
    try:
        findings = search_counterexample(
            "classic-nonconvex", args.budget,
            function_spec="sin", m=math.pi / 4, M=math.pi / 2,
        )
        witness = findings["witness"]
        print(f"classic-nonconvex: gap {witness['gap']:+.7f} "
              f"(function {witness['function']}, trial {witness['trial']})")
        found += 1
    except BudgetExhausted as exhausted:
        print(f"classic-nonconvex: exhausted, best gap {exhausted.best['gap']:+.3e}")

    try:
        findings = search_counterexample("th3-th4-order", args.budget)
        print(
            "refined-vs-geometric sign flip: "
            f"negative {json.dumps(findings['negative'])} / "
            f"positive {json.dumps(findings['positive'])}"
        )
        found += 1
    except BudgetExhausted:
        print("refined-vs-geometric: only one sign found")

    return 0 if found == 2 else 2


if __name__ == "__main__":
    sys.exit(main())
