"""Command line entry point.

Reports go to stdout as JSON with sorted keys; pass/fail is carried by the
exit code (0 pass, 1 fail, 2 invalid input); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classifier import classify
from .intervals import IntervalError, IntervalSpec, MapOnInterval, parse_point, validate
from .mobius import DegenerateMap, MobiusMap, as_rational
from .normalize import NotCanonicalizable, canonicalize_pair, theta_for
from .orbit import OrbitConfig, density_certificate, enumerate_orbit

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(ValueError):
    """Unparseable or inadmissible pair specification."""


@dataclass
class PairSpec:
    f: MapOnInterval
    g: MapOnInterval
    interval: IntervalSpec
    start: Optional[Fraction] = None
    budget: Optional[int] = None
    epsilon: Optional[float] = None
    precision_bits: Optional[int] = None


def _coeffs(value) -> MobiusMap:
    if isinstance(value, str):
        value = value.split(",")
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise InputError(f"a map needs four coefficients A,B,C,D, got {value!r}")
    try:
        return MobiusMap(*(as_rational(v if isinstance(v, str) else str(v)) for v in value))
    except DegenerateMap as exc:
        raise InputError(f"determinant zero: {exc}") from exc
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad coefficient in {value!r}: {exc}") from exc


def _interval_from_flag(text: str) -> IntervalSpec:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise InputError("--interval expects lo,hi[,oo|oc|co|cc]")
    kind = parts[2] if len(parts) == 3 else "cc"
    return IntervalSpec.parse(parts[0], parts[1], kind)


def _interval_from_json(obj) -> IntervalSpec:
    if isinstance(obj, str):
        return _interval_from_flag(obj)
    return IntervalSpec(
        parse_point(str(obj["lo"])),
        parse_point(str(obj["hi"])),
        bool(obj.get("lo_closed", True)),
        bool(obj.get("hi_closed", True)),
    )


def build_pair(f, g, interval: IntervalSpec, **extra) -> PairSpec:
    theta_for(interval)  # rejects the whole line
    fm, gm = _coeffs(f), _coeffs(g)
    try:
        pf, pg = validate(fm, interval), validate(gm, interval)
    except IntervalError as exc:
        raise InputError(str(exc)) from exc
    start = extra.get("start")
    if start is not None:
        start = as_rational(str(start))
        if not interval.contains(start):
            raise InputError(f"start {start} is not in {interval}")
    return PairSpec(pf, pg, interval, start, extra.get("budget"), extra.get("epsilon"), extra.get("precision_bits"))


def pair_from_json(obj) -> PairSpec:
    if not isinstance(obj, dict):
        raise InputError("a pair specification must be a JSON object")
    try:
        interval = _interval_from_json(obj["interval"])
        return build_pair(
            obj["f"],
            obj["g"],
            interval,
            start=obj.get("start"),
            budget=obj.get("budget"),
            epsilon=obj.get("epsilon"),
            precision_bits=obj.get("precision_bits"),
        )
    except KeyError as exc:
        raise InputError(f"missing field {exc}") from exc
    except IntervalError as exc:
        raise InputError(str(exc)) from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def pair_from_args(args) -> PairSpec:
    if args.input:
        spec = pair_from_json(_load_json(args.input))
    else:
        if not (args.f and args.g and args.interval):
            raise InputError("give --input PATH or all of --f, --g, --interval")
        try:
            interval = _interval_from_flag(args.interval)
        except (IntervalError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        spec = build_pair(args.f, args.g, interval, start=getattr(args, "start", None))
    return spec


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def err(msg: str) -> None:
    sys.stderr.write(msg.rstrip() + "\n")


# -- subcommands -------------------------------------------------------------


def cmd_classify(args) -> int:
    spec = pair_from_args(args)
    verdict = classify(spec.f, spec.g)
    emit(verdict.to_json())
    err(f"{verdict.label}: {'hypercyclic' if verdict.hypercyclic else 'not hypercyclic'}")
    return EXIT_PASS if verdict.hypercyclic else EXIT_FAIL


def _default_start(interval: IntervalSpec) -> Fraction:
    lo, hi = interval.lo, interval.hi
    if interval.is_finite:
        return (lo + hi) / 2
    return Fraction(lo) + 1 if lo != -float("inf") else Fraction(hi) - 1


def cmd_orbit(args) -> int:
    spec = pair_from_args(args)
    budget = args.budget if args.budget is not None else (spec.budget or 10_000)
    epsilon = args.epsilon if args.epsilon is not None else (spec.epsilon or 0.02)
    bits = args.precision_bits if args.precision_bits is not None else (spec.precision_bits or 128)
    start = spec.start if spec.start is not None else _default_start(spec.interval)
    if budget < 1:
        raise InputError("budget must be at least 1")
    if bits < 24:
        raise InputError("precision-bits must be at least 24")
    cfg = OrbitConfig(budget=budget, precision_bits=bits, workers=args.workers, exact_levels=args.exact_levels)
    report = enumerate_orbit(spec.f, spec.g, start, config=cfg)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    out = report.to_json(include_points=not args.omit_points)
    out["epsilon"] = epsilon
    passed = density_certificate(report, epsilon)
    out["certificate"] = "Pass" if passed else "Fail"
    emit(out)
    err(f"max gap {float(report.max_gap):.6g} with {len(report.points)} points: {out['certificate']}")
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_verify(args) -> int:
    from .suites import SUITES, run_suite

    if args.suite not in SUITES:
        err(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
        return EXIT_INVALID
    if args.cases < 1:
        raise InputError("cases must be at least 1")
    report = run_suite(args.suite, args.seed, args.cases)
    emit(report.to_json())
    err(f"{args.suite}: {report.checked} checks, {report.failed} failed, {report.flagged} flagged")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _classify_entry(obj):
    try:
        spec = pair_from_json(obj)
    except (InputError, IntervalError) as exc:
        return {"error": str(exc)}
    return classify(spec.f, spec.g).to_json()


def cmd_batch(args) -> int:
    data = _load_json(args.input) if args.input else json.load(sys.stdin)
    if not isinstance(data, list):
        raise InputError("batch input must be a JSON array of pair specifications")
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_classify_entry, data, chunksize=8))
    else:
        rows = [_classify_entry(obj) for obj in data]
    for row in rows:
        emit(row)
    bad = sum("error" in row for row in rows)
    if bad:
        err(f"{bad} of {len(rows)} entries were invalid")
    return EXIT_INVALID if bad else EXIT_PASS


def cmd_normalize(args) -> int:
    spec = pair_from_args(args)
    try:
        pair = canonicalize_pair(spec.f, spec.g)
    except NotCanonicalizable as exc:
        err(f"no canonical form: {exc}")
        return EXIT_FAIL
    emit(pair.to_json())
    return EXIT_PASS


def _add_pair_flags(p):
    p.add_argument("--input", help="PairSpec JSON file")
    p.add_argument("--f", help="coefficients A,B,C,D of f")
    p.add_argument("--g", help="coefficients A,B,C,D of g")
    p.add_argument("--interval", help="lo,hi[,oo|oc|co|cc]; use inf/-inf for infinite ends")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercyclic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="decide density of orbits for a pair")
    _add_pair_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("orbit", help="enumerate an orbit and measure its largest gap")
    _add_pair_flags(p)
    p.add_argument("--start", help="starting point (rational)")
    p.add_argument("--budget", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--precision-bits", dest="precision_bits", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact-levels", dest="exact_levels", type=int, default=0)
    p.add_argument("--csv", help="write the gap series here")
    p.add_argument("--omit-points", action="store_true", help="leave the point list out of the report")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", help="run a seeded lemma verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("batch", help="classify a JSON array of pairs, one verdict per line")
    p.add_argument("--input", help="JSON array file (stdin if omitted)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("normalize", help="conjugate a pair to its canonical family")
    _add_pair_flags(p)
    p.set_defaults(func=cmd_normalize)
    return parser


VALUE_FLAGS = ("--f", "--g", "--interval", "--start")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """argparse reads "-1,0,1,2" or "-inf,0" as an option; bind it to its flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except (InputError, IntervalError, DegenerateMap) as exc:
        err(f"invalid input: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
