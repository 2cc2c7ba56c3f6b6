#!/usr/bin/env python3
"""Print both fixed showcase cases as JSON.

Usage: python scripts/reproduce_cases.py
"""

import json

from mercerlab.harness import REPRODUCE_CASES, reproduce


def main() -> int:
    for case in REPRODUCE_CASES:
        print(json.dumps(reproduce(case), indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
