"""Build the classification catalog fixture.

Pairs are generated from the canonical families with parameters chosen on
a known side of each density condition, so the expected label is fixed by
construction.  Some pairs are then moved to other intervals by increasing
Mobius charts, which must not change the verdict.

    python3 scripts/build_catalog.py            # write the fixture
    python3 scripts/build_catalog.py --measure  # also run the orbit cross-check
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction as Q
from pathlib import Path

from hypercyclic.classifier import classify
from hypercyclic.intervals import IntervalSpec, NotSelfMap, PoleInsideInterval, validate
from hypercyclic.mobius import MobiusMap, compose, evaluate
from hypercyclic.normalize import (
    affine_chart,
    conjugate,
    decreasing_family,
    increasing_family,
    involution,
    lower_half_chart,
    mixed_family,
    onto_increasing,
    theta_u,
    upper_half_chart,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "hypercyclic" / "data" / "catalog.json"
UNIT = IntervalSpec.unit()


CHARTS = {
    "affine[-1,2]": (affine_chart(-1, 2), ("-1", "2")),
    "twisted[1/2,3/2]": (compose(affine_chart(Q(1, 2), Q(3, 2)), theta_u(Q(1, 3))), ("1/2", "3/2")),
    "half[0,inf)": (upper_half_chart(0), ("0", "inf")),
    "half[2,inf)": (compose(upper_half_chart(2), theta_u(Q(-1, 2))), ("2", "inf")),
    "half(-inf,0]": (lower_half_chart(0), ("-inf", "0")),
}


def place(f: MobiusMap, g: MobiusMap, chart_name: str | None):
    """Conjugate a [0,1] pair to another interval; endpoints are closed
    unless a conjugated map has its pole there."""
    if chart_name is None:
        return f, g, UNIT, None
    phi, (lo, hi) = CHARTS[chart_name]
    F, G = conjugate(f, phi), conjugate(g, phi)
    for kind in ("cc", "oc", "co", "oo"):
        J = IntervalSpec.parse(lo, hi, kind)
        try:
            validate(F, J)
            validate(G, J)
        except (PoleInsideInterval, NotSelfMap):
            continue
        return F, G, J, phi
    raise ValueError(f"no admissible interval for chart {chart_name}")


ENTRIES: list[dict] = []


def add(name, f, g, hyper, label, why, chart=None, start_unit=Q(1, 3), interval=None, start=None):
    if interval is None:
        F, G, J, phi = place(f, g, chart)
        start = start_unit if phi is None else evaluate(phi, start_unit)
    else:
        F, G, J = f, g, interval
    ENTRIES.append(
        {
            "id": f"{len(ENTRIES) + 1:03d}-{name}" + (f"@{chart}" if chart else ""),
            "f": [str(v) for v in F.coeffs],
            "g": [str(v) for v in G.coeffs],
            "interval": J.to_json(),
            "start": str(start),
            "expected": {"hypercyclic": hyper, "label": label},
            "why": why,
        }
    )


def build():
    ENTRIES.clear()
    # -- dense families ------------------------------------------------------
    add("x+1,1/x", MobiusMap(1, 1, 0, 1), MobiusMap(0, 1, 1, 0), True, "MixedOntoSubcase",
        "orbit of 1 is all positive rationals", interval=IntervalSpec.parse("0", "inf", "oo"), start=1)
    add("x/2,2x+1", MobiusMap(1, 0, 0, 2), MobiusMap(2, 1, 0, 1), True, "Thm1-i",
        "b>1>a, c>0 on the half-line", interval=IntervalSpec.parse("0", "inf", "oo"), start=1)
    for a, b, c in [(2, 2, 1), (3, 2, Q(1, 2)), (2, 3, Q(1, 3)), (Q(5, 2), Q(3, 2), 1), (4, 2, Q(1, 4)),
                    (Q(3, 2), 3, Q(2, 3)), (2, Q(3, 2), Q(1, 2)), (3, 3, 1)]:
        R, T = increasing_family(a, b, c)
        add(f"inc({a},{b},{c})", T, R, True, "Thm1-i", "a,b>1, 0<c<=1: union covers, o=0 and 1")
    for a, b, c in [(1, 2, Q(1, 2)), (2, Q(3, 2), Q(1, 3)), (Q(1, 2), 2, Q(1, 4)), (3, 2, Q(2, 3)),
                    (1, 3, Q(3, 4)), (Q(3, 2), Q(5, 2), Q(1, 2))]:
        R, T = mixed_family(a, b, c)
        add(f"mix({a},{b},{c})", R, T, True, "Thm1-ii", "b>1>c>0: union covers, o(R)=0, T(0)=1")
    for a, b, c in [(1, 2, Q(1, 2)), (2, Q(3, 2), Q(1, 2)), (Q(1, 2), 2, 1), (1, 2, 1), (1, 3, Q(2, 3))]:
        R, T = decreasing_family(a, b, c)
        add(f"dec({a},{b},{c})", T, R, True, "Thm1-iii", "b>1>=c>0: union covers, o(RT)=0, o(TR)=1")
    for p, q in [(2, Q(1, 3)), (3, Q(1, 2)), (Q(5, 2), Q(1, 3)), (2, Q(2, 5)), (Q(3, 2), Q(1, 2))]:
        add(f"onto({p},{q})", onto_increasing(p), onto_increasing(q), True, "BothOntoIncreasing-Irrational",
            "multipliers on both sides of 1, log ratio irrational", start_unit=Q(1, 2))
    for a, k in [(2, 3), (3, 8)]:
        add(f"monto({a},{k})", MobiusMap(1, 0, 1, a), involution(k), True, "MixedOntoSubcase",
            "o(f)=0, g(0)=1, fixed point of g <= f(1)")
        P, Y = MobiusMap(1, 0, 1, a), involution(k)
        add(f"donto({a},{k})", Y, compose(Y, P), True, "DecreasingOntoSubcase",
            "(fg,gf)=(P,YPY): union covers, o=0 and 1")

    # -- non-dense families --------------------------------------------------
    add("f=g", MobiusMap(1, 0, 1, 2), MobiusMap(1, 0, 1, 2), False, "StructuralFail(union:f+g)",
        "single generator", start_unit=Q(1))
    add("f=g-dec", MobiusMap(0, 1, 1, 1), MobiusMap(0, 1, 1, 1), False, "StructuralFail(o_fg,o_gf=boundary)",
        "single decreasing generator")
    add("f=g-R", MobiusMap(3, 1, 1, 3), MobiusMap(3, 1, 1, 3), False, "StructuralFail(union:f+g)",
        "single generator")
    for a, b, c in [(2, 2, 3), (3, 2, 2), (2, 3, Q(5, 2))]:
        R, T = increasing_family(a, b, c)
        add(f"inc-gap({a},{b},{c})", T, R, False, "StructuralFail(union:f+g)", "c>1 leaves (1/(1+a), c/(a+c)) uncovered")
    add("inc-interior", MobiusMap(1, 0, 1, 2), MobiusMap(0, 1, -2, 3), False, "StructuralFail(o_f,o_g=boundary)",
        "o(g)=1/2; start below 1/2 never rises above it")
    for a, b, c in [(1, 2, 2), (2, Q(3, 2), 3)]:
        R, T = mixed_family(a, b, c)
        add(f"mix-gap({a},{b},{c})", R, T, False, "StructuralFail(union:f+g)", "c>1 leaves (a/(a+c), a/(a+1)) uncovered")
    for a, b, c in [(1, 2, 2), (2, 2, 3)]:
        R, T = decreasing_family(a, b, c)
        add(f"dec-gap({a},{b},{c})", T, R, False, "StructuralFail(union:f+g)", "c>1 leaves (a/(a+c), a/(a+1)) uncovered")
    for p, q in [(2, Q(1, 4)), (9, Q(1, 3)), (4, Q(1, 8)), (Q(4, 9), Q(3, 2))]:
        add(f"onto-rat({p},{q})", onto_increasing(p), onto_increasing(q), False, "BothOntoIncreasing-Rational",
            "log ratio rational: orbit is discrete", start_unit=Q(1, 2))
    for p, q in [(2, 3), (Q(1, 2), Q(1, 5)), (Q(3, 2), Q(5, 2))]:
        add(f"onto-same({p},{q})", onto_increasing(p), onto_increasing(q), False, "BothOnto-NotDense",
            "multipliers on the same side of 1", start_unit=Q(1, 2))
    for a, k in [(2, 0), (3, 0), (2, 3)]:
        add(f"mix-onto-onto({a},{k})", onto_increasing(a), involution(k), False, "BothOnto-NotDense",
            "both generators onto")
    add("dec-onto-onto", involution(0), involution(3), False, "BothOnto-NotDense", "both generators onto")
    add("dec-onto-onto2", involution(3), involution(8), False, "BothOnto-NotDense", "both generators onto")
    add("identity", MobiusMap(1, 0, 0, 1), MobiusMap(1, 0, 1, 2), False, "StructuralFail(identity generator)",
        "identity generator")
    add("monto-gap", MobiusMap(1, 0, 1, 2), involution(0), False, "StructuralFail(union:f+gf)",
        "Im f and Im gf leave (1/3, 2/3) uncovered")
    add("donto-gap", involution(0), MobiusMap(0, 2, 1, 2), False, "StructuralFail(union:fg+gf)",
        "Im fg and Im gf leave (1/3, 2/3) uncovered")

    # -- the same pairs on other intervals -----------------------------------
    moved = [
        (increasing_family(2, 2, 1)[::-1], True, "Thm1-i", "affine[-1,2]"),
        (increasing_family(3, 2, Q(1, 2))[::-1], True, "Thm1-i", "half[0,inf)"),
        (increasing_family(2, 3, Q(1, 3))[::-1], True, "Thm1-i", "half(-inf,0]"),
        (mixed_family(1, 2, Q(1, 2)), True, "Thm1-ii", "twisted[1/2,3/2]"),
        (mixed_family(2, Q(3, 2), Q(1, 3)), True, "Thm1-ii", "half[2,inf)"),
        (decreasing_family(1, 2, Q(1, 2))[::-1], True, "Thm1-iii", "affine[-1,2]"),
        (decreasing_family(Q(1, 2), 3, Q(1, 2))[::-1], True, "Thm1-iii", "half(-inf,0]"),
        ((onto_increasing(2), onto_increasing(Q(1, 3))), True, "BothOntoIncreasing-Irrational", "twisted[1/2,3/2]"),
        ((MobiusMap(1, 0, 1, 2), involution(3)), True, "MixedOntoSubcase", "affine[-1,2]"),
        ((involution(3), compose(involution(3), MobiusMap(1, 0, 1, 2))), True, "DecreasingOntoSubcase", "half[0,inf)"),
        (increasing_family(2, 2, 3)[::-1], False, "StructuralFail(union:f+g)", "affine[-1,2]"),
        (mixed_family(1, 2, 2), False, "StructuralFail(union:f+g)", "twisted[1/2,3/2]"),
        ((onto_increasing(2), onto_increasing(Q(1, 4))), False, "BothOntoIncreasing-Rational", "affine[-1,2]"),
        ((onto_increasing(2), onto_increasing(3)), False, "BothOnto-NotDense", "twisted[1/2,3/2]"),
        ((MobiusMap(1, 0, 1, 2), MobiusMap(1, 0, 1, 2)), False, "StructuralFail(union:f+g)", "half[0,inf)"),
        ((MobiusMap(1, 0, 1, 2), involution(0)), False, "StructuralFail(union:f+gf)", "twisted[1/2,3/2]"),
    ]
    for (f, g), hyper, label, chart in moved:
        start = Q(1, 2) if label.startswith("BothOnto") else Q(1, 3)
        add("moved", f, g, hyper, label, "conjugate of a [0,1] pair", chart=chart, start_unit=start)
    return ENTRIES


def check(entries) -> int:
    from hypercyclic.cli import pair_from_json

    bad = 0
    for e in entries:
        spec = pair_from_json(e)
        v = classify(spec.f, spec.g)
        if (v.hypercyclic, v.label) != (e["expected"]["hypercyclic"], e["expected"]["label"]):
            bad += 1
            print(f"MISMATCH {e['id']}: got {v.label}, expected {e['expected']['label']}", file=sys.stderr)
    return bad


def measure(entries):
    from hypercyclic.cli import pair_from_json
    from hypercyclic.orbit import consistency_check

    for e in entries:
        spec = pair_from_json(e)
        t = time.time()
        c = consistency_check(spec.f, spec.g, spec.start)
        gaps = " ".join(f"{float(g):.4f}" for _, g in c.gaps)
        print(f"{'ok ' if c.consistent else 'BAD'} {e['id']:<40} {gaps}  {time.time() - t:.1f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measure", action="store_true")
    args = parser.parse_args()
    entries = build()
    bad = check(entries)
    if bad:
        sys.exit(f"{bad} catalog entries disagree with their construction")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(entries, indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(entries)} pairs to {OUT}")
    if args.measure:
        measure(entries)


if __name__ == "__main__":
    main()
