"""Run each verification suite over a range of seeds and tabulate failures.

    python scripts/lemma_sweep.py --seeds 0-9 --cases 100
    python scripts/lemma_sweep.py --suite imp3 --seeds 7 --cases 20
"""

import argparse
import sys

from hypercyclic.suites import SUITES, run_suite


def seed_range(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",")]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--suite", action="append", choices=sorted(SUITES), help="default: all")
    ap.add_argument("--seeds", default="0-4")
    ap.add_argument("--cases", type=int, default=50)
    args = ap.parse_args(argv)

    print(f"{'suite':<10}{'seed':>6}{'checked':>9}{'failed':>8}{'flagged':>9}  notes")
    any_failed = False
    for name in args.suite or sorted(SUITES):
        for seed in seed_range(args.seeds):
            rep = run_suite(name, seed, args.cases)
            any_failed |= not rep.passed
            notes = ", ".join(f"{k}={v}" for k, v in rep.notes.items())
            print(f"{name:<10}{seed:>6}{rep.checked:>9}{rep.failed:>8}{rep.flagged:>9}  {notes}")
    return 1 if any_failed else 0


if __name__ == "__main__":
    sys.exit(main())
