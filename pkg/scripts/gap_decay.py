"""Gap decay for catalog pairs: one CSV row per (pair, budget checkpoint).

    python scripts/gap_decay.py --budget 100000 --out gaps.csv
    python scripts/gap_decay.py --only 001 --only 014
"""

import argparse
import csv
import sys
import time
from fractions import Fraction

from hypercyclic.catalog import load_catalog
from hypercyclic.cli import pair_from_json
from hypercyclic.orbit import OrbitConfig, enumerate_orbit


def checkpoints(budget: int) -> tuple:
    out, b = [], 100
    while b < budget:
        out += [b, 3 * b]
        b *= 10
    return tuple(c for c in out if c < budget)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--bits", type=int, default=128)
    ap.add_argument("--only", action="append", default=[], help="id prefix to include (repeatable)")
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    args = ap.parse_args(argv)

    entries = [e for e in load_catalog() if not args.only or any(e["id"].startswith(p) for p in args.only)]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["id", "hypercyclic", "budget", "max_gap"])
    for e in entries:
        spec = pair_from_json(e)
        t0 = time.perf_counter()
        cfg = OrbitConfig(budget=args.budget, precision_bits=args.bits, checkpoints=checkpoints(args.budget))
        rep = enumerate_orbit(spec.f, spec.g, Fraction(e["start"]), config=cfg)
        marks = set(cfg.checkpoints) | {len(rep.points)}
        for gp in rep.gap_series:
            if gp.budget in marks:
                w.writerow([e["id"], e["expected"]["hypercyclic"], gp.budget, f"{float(gp.max_gap):.6g}"])
        print(f"{e['id']:<32} gap {float(rep.max_gap):.4f}  {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    if args.out:
        fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
