"""Breadth-first orbit enumeration and gap measurement.

Every pair is moved to [0,1] first, so gaps are plain lengths.  Points are
evaluated in mpfr at a configurable precision.  Words up to ``exact_levels``
letters can be evaluated in exact rationals and rounded once at the end.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import gmpy2

from .classifier import DenseFor, Verdict, classify
from .intervals import MapOnInterval, UnsupportedInterval
from .mobius import MobiusMap, evaluate, is_finite
from .normalize import _unit_pair


class EmptyInterval(ValueError):
    """Gap requested for an empty point set."""


@dataclass(frozen=True)
class OrbitConfig:
    budget: int = 10_000
    precision_bits: int = 128
    target_gap: Optional[float] = None
    exact_levels: int = 0
    max_levels: int = 100_000
    workers: int = 1
    checkpoints: tuple = ()

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.precision_bits < 24:
            raise ValueError("precision_bits must be at least 24")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class GapPoint:
    budget: int
    max_gap: object
    gap_lo: object
    gap_hi: object


@dataclass
class OrbitReport:
    start: Fraction
    start_unit: Fraction
    points: list
    word_count: int
    levels: int
    max_gap: object
    gap_interval: tuple
    gap_series: list = field(default_factory=list)
    precision_bits: int = 128
    exhausted: bool = False
    truncated: bool = False

    def to_json(self, include_points: bool = True) -> dict:
        digits = _digits(self.precision_bits)
        out = {
            "start": str(self.start),
            "start_unit": str(self.start_unit),
            "word_count": self.word_count,
            "levels": self.levels,
            "point_count": len(self.points),
            "max_gap": _fmt(self.max_gap, digits),
            "gap_interval": [_fmt(x, digits) for x in self.gap_interval],
            "gap_series": [
                {
                    "budget": gp.budget,
                    "max_gap": _fmt(gp.max_gap, digits),
                    "gap_lo": _fmt(gp.gap_lo, digits),
                    "gap_hi": _fmt(gp.gap_hi, digits),
                }
                for gp in self.gap_series
            ],
            "precision_bits": self.precision_bits,
            "exhausted": self.exhausted,
            "truncated": self.truncated,
        }
        if include_points:
            out["points"] = [_fmt(x, digits) for x in self.points]
        return out

    def to_csv(self) -> str:
        digits = _digits(self.precision_bits)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["budget", "max_gap", "gap_lo", "gap_hi"])
        for gp in self.gap_series:
            writer.writerow(
                [gp.budget, _fmt(gp.max_gap, digits), _fmt(gp.gap_lo, digits), _fmt(gp.gap_hi, digits)]
            )
        return buf.getvalue()

    def dumps(self, include_points: bool = True) -> str:
        return json.dumps(self.to_json(include_points), sort_keys=True)


def _digits(bits: int) -> int:
    return int(bits * 0.30103) + 2


def _fmt(x, digits: int) -> str:
    if isinstance(x, Fraction):
        x = gmpy2.mpfr(x)
    return format(x, f".{digits}g")


def max_gap(points: Sequence, lo=Fraction(0), hi=Fraction(1)):
    """Longest open subinterval of [lo, hi] free of points; ties go leftmost.

    ``points`` must be sorted and lie in [lo, hi].
    """
    if not is_finite(lo) or not is_finite(hi):
        raise UnsupportedInterval("gaps are measured on finite intervals")
    if len(points) == 0:
        raise EmptyInterval("no points to measure a gap against")
    best = points[0] - lo
    where = (lo, points[0])
    for left, right in zip(points, points[1:]):
        if right - left > best:
            best, where = right - left, (left, right)
    if hi - points[-1] > best:
        best, where = hi - points[-1], (points[-1], hi)
    return best, where


def density_certificate(report: OrbitReport, epsilon) -> bool:
    """True (Pass) iff the measured gap is below epsilon."""
    return report.max_gap < epsilon


# -- level expansion ---------------------------------------------------------

_WORKER_PREC = 128


def _init_worker(bits: int):
    global _WORKER_PREC
    _WORKER_PREC = bits
    gmpy2.get_context().precision = bits


def _mpfr_apply(coeffs, x):
    A, B, C, D = coeffs
    if C == 0:
        return (A * x + B) / D
    return (A * x + B) / (C * x + D)


def _expand_chunk(args):
    fc, gc, values = args
    gmpy2.get_context().precision = _WORKER_PREC
    return [(_mpfr_apply(fc, x), _mpfr_apply(gc, x)) for x in values]


def _expand(fc, gc, values, pool, workers):
    if pool is None or len(values) < 4 * workers:
        return _expand_chunk((fc, gc, values))
    size = -(-len(values) // workers)
    chunks = [(fc, gc, values[i:i + size]) for i in range(0, len(values), size)]
    out = []
    for part in pool.map(_expand_chunk, chunks):
        out.extend(part)
    return out


def enumerate_orbit(
    f: MapOnInterval,
    g: MapOnInterval,
    start,
    budget: int = 10_000,
    precision_bits: int = 128,
    *,
    config: Optional[OrbitConfig] = None,
) -> OrbitReport:
    """Enumerate w(start) over words of increasing length.

    Stops when ``budget`` distinct points are found, when the gap drops below
    ``target_gap`` (checked at gap-series checkpoints), when a whole level
    produces nothing new, or after ``max_levels`` levels.
    """
    if config is None:
        config = OrbitConfig(budget=budget, precision_bits=precision_bits)
    bits = config.precision_bits
    theta, F, G = _unit_pair(f, g)
    start = Fraction(start)
    if not f.interval.contains(start):
        raise ValueError(f"start {start} is not in {f.interval}")
    x0 = Fraction(evaluate(theta, start))

    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return _run(F.map, G.map, start, x0, config)


def _run(Fm: MobiusMap, Gm: MobiusMap, start, x0: Fraction, cfg: OrbitConfig) -> OrbitReport:
    bits = cfg.precision_bits
    shift = bits // 2
    fc, gc = Fm.coeffs, Gm.coeffs

    def key(x):
        return int(gmpy2.floor(gmpy2.mul_2exp(x, shift)))

    first = gmpy2.mpfr(x0)
    seen = {key(first)}
    points = [first]
    sorted_pts = [first]
    pending: list = []
    series: list[GapPoint] = []
    checkpoints = sorted(set(int(c) for c in cfg.checkpoints if c >= 1))
    word_count = 0
    levels = 0
    truncated = exhausted = False
    frontier = [(first, 1)]
    exact_frontier = [(x0, 1)] if cfg.exact_levels > 0 else None
    next_record = 1

    def gap_now():
        nonlocal sorted_pts, pending
        if pending:
            sorted_pts = sorted(sorted_pts + sorted(pending))
            pending = []
        return max_gap(sorted_pts, gmpy2.mpfr(0), gmpy2.mpfr(1))

    def record(count):
        gap, (lo, hi) = gap_now()
        if series and series[-1].budget == count:
            return gap
        series.append(GapPoint(count, gap, lo, hi))
        return gap

    def target_hit(gap):
        return cfg.target_gap is not None and gap < cfg.target_gap

    if cfg.budget == 1:
        truncated = True
    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(bits,))
    try:
        stop = truncated
        while not stop and levels < cfg.max_levels:
            levels += 1
            if exact_frontier is not None and levels <= cfg.exact_levels:
                images = [(Fm(x), Gm(x)) for x, _ in exact_frontier]
                mults = [m for _, m in exact_frontier]
                next_exact: dict = {}
                level_vals = []
                for (yf, yg), m in zip(images, mults):
                    for y in (yf, yg):
                        level_vals.append((gmpy2.mpfr(y), m))
                        next_exact[y] = next_exact.get(y, 0) + m
                exact_frontier = list(next_exact.items()) if levels < cfg.exact_levels else None
            else:
                vals = [x for x, _ in frontier]
                images = _expand(fc, gc, vals, pool, cfg.workers)
                level_vals = []
                for (yf, yg), (_, m) in zip(images, frontier):
                    level_vals.append((yf, m))
                    level_vals.append((yg, m))

            nxt: dict = {}
            fresh = 0
            for y, m in level_vals:
                k = key(y)
                word_count += m
                if k not in seen:
                    seen.add(k)
                    points.append(y)
                    pending.append(y)
                    fresh += 1
                    count = len(points)
                    if checkpoints and count == checkpoints[0]:
                        checkpoints.pop(0)
                        if target_hit(record(count)):
                            stop = True
                    if count >= cfg.budget:
                        truncated = True
                        stop = True
                if k in nxt:
                    nxt[k] = (nxt[k][0], nxt[k][1] + m)
                else:
                    nxt[k] = (y, m)
                if stop:
                    break
            if stop:
                break
            frontier = list(nxt.values())
            if fresh == 0:
                exhausted = True
                break
            if len(points) >= 2 * next_record:
                next_record = len(points)
                if target_hit(record(len(points))):
                    break
    finally:
        if pool is not None:
            pool.shutdown()

    gap = record(len(points))
    final = series[-1]
    return OrbitReport(
        start=start,
        start_unit=x0,
        points=sorted_pts,
        word_count=word_count,
        levels=levels,
        max_gap=gap,
        gap_interval=(final.gap_lo, final.gap_hi),
        gap_series=series,
        precision_bits=bits,
        exhausted=exhausted,
        truncated=truncated,
    )


# -- classifier cross-check --------------------------------------------------


@dataclass
class Consistency:
    consistent: bool
    verdict: Verdict
    expect_dense: bool
    gaps: list
    details: str

    def to_json(self) -> dict:
        return {
            "consistent": self.consistent,
            "label": self.verdict.label,
            "hypercyclic": self.verdict.hypercyclic,
            "expect_dense": self.expect_dense,
            "gaps": [{"budget": b, "max_gap": _fmt(g, 20)} for b, g in self.gaps],
            "details": self.details,
        }


def expects_dense(verdict: Verdict, start, interval) -> bool:
    """Whether the verdict predicts a dense orbit from this particular start."""
    if not verdict.hypercyclic:
        return False
    start = Fraction(start)
    if verdict.dense_for is DenseFor.INTERIOR:
        return start != interval.lo and start != interval.hi
    return start not in verdict.excluded_starts


def consistency_check(
    f: MapOnInterval,
    g: MapOnInterval,
    start,
    budgets: Iterable[int] = (1_000, 10_000, 100_000),
    epsilon: float = 0.02,
    floor: float = 0.05,
    precision_bits: int = 128,
    workers: int = 1,
) -> Consistency:
    """Compare the classifier with a measured orbit.

    One enumeration runs at the largest budget; smaller budgets are read
    from its checkpoints.  Dense predictions need a final gap below epsilon,
    non-dense ones need every gap to stay at or above ``floor``.
    """
    budgets = sorted(set(budgets))
    verdict = classify(f, g)
    dense = expects_dense(verdict, start, f.interval)
    cfg = OrbitConfig(
        budget=budgets[-1],
        precision_bits=precision_bits,
        target_gap=None,
        workers=workers,
        checkpoints=tuple(budgets),
    )
    report = enumerate_orbit(f, g, start, config=cfg)
    gaps = []
    for b in budgets:
        hit = [gp for gp in report.gap_series if gp.budget <= b]
        gaps.append((b, hit[-1].max_gap))
    final_gap = report.max_gap
    if dense:
        ok = final_gap < epsilon
        details = f"final gap {float(final_gap):.6g} vs epsilon {epsilon}"
    else:
        ok = all(gp >= floor for _, gp in gaps)
        details = f"smallest gap {float(min(gp for _, gp in gaps)):.6g} vs floor {floor}"
    return Consistency(ok, verdict, dense, gaps, details)
