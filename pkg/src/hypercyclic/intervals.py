"""Mobius maps as self-maps of a real interval: membership in F_I, images,
onto-ness, fixed points and their classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .mobius import (
    INF,
    NEG_INF,
    MobiusMap,
    Point,
    Surd,
    as_rational,
    compose,
    derivative_at,
    evaluate,
    is_finite,
    point_str,
    _sign_surd,
)


class IntervalError(ValueError):
    pass


class PoleInsideInterval(IntervalError):
    pass


class NotSelfMap(IntervalError):
    pass


class UnsupportedInterval(IntervalError):
    pass


class MixedIntervals(IntervalError):
    pass


class IdentityMap(ValueError):
    pass


def parse_point(text) -> Point:
    if isinstance(text, float) and math.isinf(text):
        return text
    if isinstance(text, str) and text.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    if isinstance(text, str) and text.strip().lower() in ("-inf", "-infinity"):
        return NEG_INF
    return as_rational(text)


@dataclass(frozen=True)
class IntervalSpec:
    lo: Point
    hi: Point
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise IntervalError(f"empty interval: lo={self.lo} hi={self.hi}")
        if self.lo == NEG_INF and self.hi == INF:
            raise IntervalError("the whole real line is not an admissible interval")
        # infinite endpoints are never closed
        if not is_finite(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if not is_finite(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def unit(cls) -> "IntervalSpec":
        return cls(Fraction(0), Fraction(1), True, True)

    @classmethod
    def parse(cls, lo, hi, kind: str = "cc") -> "IntervalSpec":
        if kind not in ("oo", "oc", "co", "cc"):
            raise IntervalError(f"interval kind must be oo|oc|co|cc, got {kind!r}")
        return cls(parse_point(lo), parse_point(hi), kind[0] == "c", kind[1] == "c")

    @property
    def is_finite(self) -> bool:
        return is_finite(self.lo) and is_finite(self.hi)

    @property
    def length(self) -> Fraction:
        if not self.is_finite:
            raise UnsupportedInterval("infinite interval has no length")
        return self.hi - self.lo

    def closure(self) -> "IntervalSpec":
        return IntervalSpec(self.lo, self.hi, True, True)

    def contains(self, x: Point) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo:
            return self.lo_closed
        if x == self.hi:
            return self.hi_closed
        return True

    def contains_interval(self, other: "IntervalSpec") -> bool:
        if other.lo < self.lo or other.hi > self.hi:
            return False
        if other.lo == self.lo and other.lo_closed and not self.lo_closed:
            return False
        if other.hi == self.hi and other.hi_closed and not self.hi_closed:
            return False
        return True

    def same_closure(self, other: "IntervalSpec") -> bool:
        return self.lo == other.lo and self.hi == other.hi

    def endpoints(self) -> tuple[Point, Point]:
        return (self.lo, self.hi)

    def __str__(self):
        return (
            ("[" if self.lo_closed else "(")
            + point_str(self.lo)
            + ", "
            + point_str(self.hi)
            + ("]" if self.hi_closed else ")")
        )

    def to_json(self) -> dict:
        return {
            "lo": point_str(self.lo),
            "hi": point_str(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


class Monotonicity(str, enum.Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"


class FixedKind(str, enum.Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    PARABOLIC_ATTRACTING = "ParabolicAttracting"
    PARABOLIC_REPELLING = "ParabolicRepelling"
    # multiplier -1: the fixed point of an involution
    INDIFFERENT = "Indifferent"


class Side(str, enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"
    BOTH = "Both"
    NONE = "None"


@dataclass(frozen=True)
class FixedPointInfo:
    location: Point
    multiplier: object  # Fraction or Surd
    kind: FixedKind
    attracting_side: Side

    @property
    def attracts(self) -> bool:
        return self.attracting_side is not Side.NONE


@dataclass(frozen=True)
class MapOnInterval:
    map: MobiusMap
    interval: IntervalSpec

    def __call__(self, x):
        return evaluate(self.map, x)


def _pole_in(f: MobiusMap, interval: IntervalSpec) -> bool:
    pole = f.pole
    return pole is not None and interval.contains(pole)


def _limit_at(f: MobiusMap, x: Point, from_above: bool) -> Point:
    """One-sided limit of f at x (handles x at the pole)."""
    pole = f.pole
    if pole is not None and is_finite(x) and x == pole:
        increasing = f.det > 0
        up = increasing != from_above  # increasing & from below -> +inf
        return INF if up else NEG_INF
    return evaluate(f, x)


def _image(f: MobiusMap, interval: IntervalSpec) -> IntervalSpec:
    lo_val = _limit_at(f, interval.lo, from_above=True)
    hi_val = _limit_at(f, interval.hi, from_above=False)
    lo_closed = interval.lo_closed and is_finite(lo_val)
    hi_closed = interval.hi_closed and is_finite(hi_val)
    if f.det > 0:
        return IntervalSpec(lo_val, hi_val, lo_closed, hi_closed)
    return IntervalSpec(hi_val, lo_val, hi_closed, lo_closed)


def image_of(f: MobiusMap, interval: IntervalSpec) -> IntervalSpec:
    """f(J) for an interval J that avoids the pole of f."""
    if _pole_in(f, interval):
        raise PoleInsideInterval(f"pole {f.pole} of {f} lies in {interval}")
    return _image(f, interval)


def validate(f: MobiusMap, interval: IntervalSpec) -> MapOnInterval:
    if _pole_in(f, interval):
        raise PoleInsideInterval(f"pole {f.pole} of {f} lies in {interval}")
    img = _image(f, interval)
    if not interval.contains_interval(img):
        raise NotSelfMap(f"image {img} of {f} escapes {interval}")
    return MapOnInterval(f, interval)


def monotonicity(m: MapOnInterval) -> Monotonicity:
    return Monotonicity.INCREASING if m.map.det > 0 else Monotonicity.DECREASING


def image(m: MapOnInterval) -> IntervalSpec:
    return _image(m.map, m.interval)


def is_onto(m: MapOnInterval) -> bool:
    """Onto-ness on closures."""
    return image(m).same_closure(m.interval)


def _fixed_point_locations(f: MobiusMap) -> list[Point]:
    A, B, C, D = f.coeffs
    if C == 0:
        pts: list[Point] = [INF, NEG_INF]
        if A != D:
            pts.append(Fraction(B, D - A))
        return pts
    # C x^2 + (D - A) x - B = 0
    disc = (D - A) ** 2 + 4 * B * C
    if disc < 0:
        return []
    r = math.isqrt(disc)
    if r * r == disc:
        roots = {Fraction(A - D - r, 2 * C), Fraction(A - D + r, 2 * C)}
        return sorted(roots)
    p = Fraction(A - D, 2 * C)
    q = Fraction(1, 2 * C)
    return sorted([Surd.make(p, -q, disc), Surd.make(p, q, disc)])


def _sign_f_minus_x(f: MobiusMap, x0: Fraction, side: int) -> int:
    """Sign of f(x) - x just to the right (side=+1) or left (-1) of a double
    fixed point x0.  f(x) - x = -C (x - x0)^2 / (Cx + D)."""
    A, B, C, D = f.coeffs
    den = C * x0 + D
    return -((C > 0) - (C < 0)) * ((den > 0) - (den < 0))


def fixed_points(m: MapOnInterval) -> list[FixedPointInfo]:
    f, interval = m.map, m.interval
    if f.is_identity():
        raise IdentityMap("every point is fixed by the identity")
    closure = interval.closure()
    out = []
    for x in _fixed_point_locations(f):
        if not closure.contains(x) and not (
            not is_finite(x) and x in (interval.lo, interval.hi)
        ):
            continue
        out.append(_classify_fixed(f, x, interval))
    return out


def _sides_available(x: Point, interval: IntervalSpec) -> tuple[bool, bool]:
    """(left side inside interval, right side inside interval)."""
    return (x > interval.lo, x < interval.hi)


def _restrict(side: Side, x: Point, interval: IntervalSpec) -> Side:
    left, right = _sides_available(x, interval)
    if side is Side.BOTH:
        if left and right:
            return Side.BOTH
        if right:
            return Side.RIGHT
        if left:
            return Side.LEFT
        return Side.NONE
    if side is Side.LEFT and left:
        return Side.LEFT
    if side is Side.RIGHT and right:
        return Side.RIGHT
    return Side.NONE


def _classify_fixed(f: MobiusMap, x: Point, interval: IntervalSpec) -> FixedPointInfo:
    A, B, C, D = f.coeffs
    if not is_finite(x):
        # f(x) = (A/D) x + B/D; conjugation by 1/x sends the multiplier to D/A
        mult = Fraction(A, D)
        if abs(mult) > 1:
            kind, side = FixedKind.ATTRACTING, Side.BOTH
        elif abs(mult) < 1:
            kind, side = FixedKind.REPELLING, Side.NONE
        elif mult == -1:
            kind, side = FixedKind.INDIFFERENT, Side.NONE
        else:
            # translation x + B/D: moves toward +inf iff B/D > 0
            toward_pos = Fraction(B, D) > 0
            attracted = toward_pos == (x > 0)
            side = (Side.LEFT if x > 0 else Side.RIGHT) if attracted else Side.NONE
            kind = FixedKind.PARABOLIC_ATTRACTING if attracted else FixedKind.PARABOLIC_REPELLING
        side = _restrict(side, x, interval)
        return FixedPointInfo(x, mult, kind, side)

    mult = derivative_at(f, x)
    amult = abs(mult)
    if amult < 1:
        return FixedPointInfo(x, mult, FixedKind.ATTRACTING, _restrict(Side.BOTH, x, interval))
    if amult > 1:
        return FixedPointInfo(x, mult, FixedKind.REPELLING, Side.NONE)
    if mult == -1:
        return FixedPointInfo(x, mult, FixedKind.INDIFFERENT, Side.NONE)
    # double fixed point (rational); sign of f(x) - x is the same on both sides
    s = _sign_f_minus_x(f, x, +1)
    # f(x) < x: points on the right move down onto x, points on the left move away
    side = Side.RIGHT if s < 0 else Side.LEFT
    side = _restrict(side, x, interval)
    kind = FixedKind.PARABOLIC_ATTRACTING if side is not Side.NONE else FixedKind.PARABOLIC_REPELLING
    return FixedPointInfo(x, mult, kind, side)


def is_involution(f: MobiusMap) -> bool:
    return not f.is_identity() and compose(f, f).is_identity()


def attracting_fixed_point(m: MapOnInterval) -> Optional[Point]:
    """o(f): the fixed point attracting interior orbits, or None for
    involutions (period-2 dynamics)."""
    if m.map.is_identity():
        raise IdentityMap("o(f) is undefined for the identity")
    if is_involution(m.map):
        return None
    for info in fixed_points(m):
        if info.attracts:
            return info.location
    return None


def is_length_decreasing(m: MapOnInterval) -> bool:
    f, interval = m.map, m.interval
    if not interval.is_finite:
        raise UnsupportedInterval("length-decreasing test needs a finite interval")
    if f.is_identity():
        return False
    # |f'| = |det|/(Cx+D)^2 is monotone on a pole-free interval
    sup = max(abs(derivative_at(f, interval.lo)), abs(derivative_at(f, interval.hi)))
    if sup < 1:
        return True
    if sup > 1:
        return False
    # sup == 1: fine unless |f'| == 1 everywhere (affine of slope +-1)
    return f.C != 0


def union_of_closures(images: Iterable[IntervalSpec]) -> list[tuple[Point, Point]]:
    """Merge closed intervals into disjoint sorted components."""
    spans = sorted((iv.lo, iv.hi) for iv in images)
    merged: list[tuple[Point, Point]] = []
    for lo, hi in spans:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def covers(images: Iterable[IntervalSpec], interval: IntervalSpec) -> bool:
    parts = union_of_closures(images)
    return len(parts) == 1 and parts[0] == (interval.lo, interval.hi)


def covers_union(maps: list[MapOnInterval]) -> bool:
    if not maps:
        raise ValueError("no maps given")
    interval = maps[0].interval
    if any(m.interval != interval for m in maps):
        raise MixedIntervals("maps live on different intervals")
    return covers((image(m) for m in maps), interval)
