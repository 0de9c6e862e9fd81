"""Run the acceptance suite and print one line per criterion.

    python3 scripts/run_acceptance.py [oracle|statistical|all] [--workers W]
"""

import argparse
import sys

from gwburn.checks import run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("suite", nargs="?", default="all", choices=("oracle", "statistical", "all"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    results = run_suite(args.suite, args.workers)
    failed = [r.criterion for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f", failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
