"""Changes of variable: move an interval to [0,1] and a generator pair to
one of the canonical (R, T) families."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .intervals import (
    IntervalError,
    IntervalSpec,
    MapOnInterval,
    MixedIntervals,
    Monotonicity,
    attracting_fixed_point,
    is_onto,
    monotonicity,
    validate,
)
from .mobius import INF, NEG_INF, MobiusMap, compose, derivative_at, evaluate, invert

REFLECTION = MobiusMap(-1, 1, 0, 1)


class WholeLine(IntervalError):
    pass


class NotCanonicalizable(ValueError):
    pass


def theta_for(J: IntervalSpec) -> MobiusMap:
    """Bijection J -> [0,1]: affine for finite J, 1/(x-a+1) on [a,inf),
    1/(-x+b+1) on (-inf,b]."""
    if J.lo == NEG_INF and J.hi == INF:
        raise WholeLine("no normalizing map for the whole line")
    if J.is_finite:
        return MobiusMap(1, -J.lo, 0, J.hi - J.lo)
    if J.hi == INF:
        return MobiusMap(0, 1, 1, 1 - J.lo)
    return MobiusMap(0, 1, -1, J.hi + 1)


def conjugate(f: MobiusMap, theta: MobiusMap) -> MobiusMap:
    """theta o f o theta^-1."""
    return compose(compose(theta, f), invert(theta))


def to_unit(m: MapOnInterval, theta: Optional[MobiusMap] = None) -> MapOnInterval:
    """The conjugate of m acting on the closed unit interval."""
    theta = theta_for(m.interval) if theta is None else theta
    return validate(conjugate(m.map, theta), IntervalSpec.unit())


def theta_u(u: Fraction) -> MobiusMap:
    """x/(ux + 1 - u): fixes 0 and 1, increasing on [0,1] for u < 1."""
    return MobiusMap(1, 0, u, 1 - u)


def affine_chart(p, q) -> MobiusMap:
    """Increasing affine bijection [0,1] -> [p,q]."""
    return MobiusMap(Fraction(q) - Fraction(p), Fraction(p), 0, 1)


def upper_half_chart(p) -> MobiusMap:
    """Increasing bijection [0,1) -> [p,inf): p + x/(1-x)."""
    return MobiusMap(1 - Fraction(p), Fraction(p), -1, 1)


def lower_half_chart(q) -> MobiusMap:
    """Increasing bijection (0,1] -> (-inf,q]: q - (1-x)/x."""
    return MobiusMap(Fraction(q) + 1, -1, 1, 0)


def involution(k) -> MobiusMap:
    """(1-x)/(1+kx), an onto decreasing involution of [0,1] for k > -1."""
    return MobiusMap(-1, 1, k, 1)


# canonical families ------------------------------------------------------

def increasing_family(a, b, c) -> tuple[MobiusMap, MobiusMap]:
    """Both increasing: R = ((ab-c)x+c)/((ab-a-c)x+a+c), T = x/(x+a)."""
    return MobiusMap(a * b - c, c, a * b - a - c, a + c), MobiusMap(1, 0, 1, a)


def mixed_family(a, b, c) -> tuple[MobiusMap, MobiusMap]:
    """Mixed: R = ax/((-ab+a+c)x+ab) increasing, T = a/(x+a) decreasing."""
    return MobiusMap(a, 0, -a * b + a + c, a * b), MobiusMap(0, a, 1, a)


def decreasing_family(a, b, c) -> tuple[MobiusMap, MobiusMap]:
    """Both decreasing: R = a(1-x)/((b-a-c)x+a+c), T = a/(x+a)."""
    return MobiusMap(-a, a, b - a - c, a + c), MobiusMap(0, a, 1, a)


def onto_increasing(a) -> MobiusMap:
    """ax/((a-1)x+1), the onto increasing self-map of [0,1] with f'(0)=a."""
    return MobiusMap(a, 0, a - 1, 1)


class CaseTag(str, enum.Enum):
    BOTH_INCREASING = "BothIncreasing"
    MIXED = "Mixed"
    BOTH_DECREASING = "BothDecreasing"
    BOTH_ONTO_INCREASING = "BothOntoIncreasing"
    # increasing f not onto with an onto decreasing involution g: (R, T) are
    # the both-increasing forms of (g f g, f)
    MIXED_ONTO = "MixedOnto"


@dataclass(frozen=True)
class CanonicalPair:
    """Result of canonicalize_pair.

    ``R`` and ``T`` are the canonical generators (for BothOntoIncreasing,
    R carries parameter a and T parameter b).  By default input f becomes T
    in the BothIncreasing/BothDecreasing cases and R in the Mixed and
    BothOntoIncreasing cases; ``swapped`` records the opposite assignment.
    ``conjugator`` is the full change of variable (interval normalization,
    optional reflection, and the x/(ux+1-u) step) applied to both inputs.
    """

    case_tag: CaseTag
    a: Fraction
    b: Fraction
    c: Optional[Fraction]
    conjugator: MobiusMap
    swapped: bool
    reflected: bool
    R: MobiusMap
    T: MobiusMap
    checks: dict = field(default_factory=dict, compare=False)

    def roles(self) -> tuple[MobiusMap, MobiusMap]:
        """(image of input f, image of input g)."""
        if self.case_tag is CaseTag.MIXED_ONTO:
            inv = MobiusMap(*self.checks["involution"])
            return (inv, self.T) if self.swapped else (self.T, inv)
        default_f_is_T = self.case_tag in (CaseTag.BOTH_INCREASING, CaseTag.BOTH_DECREASING)
        f_is_T = default_f_is_T != self.swapped
        return (self.T, self.R) if f_is_T else (self.R, self.T)

    def reproduces(self, f: MobiusMap, g: MobiusMap) -> bool:
        expected = self.roles()
        got = (conjugate(f, self.conjugator), conjugate(g, self.conjugator))
        if got != expected:
            return False
        if self.case_tag is CaseTag.MIXED_ONTO:
            inv = MobiusMap(*self.checks["involution"])
            if compose(compose(inv, self.T), inv) != self.R:
                return False
        rebuilt = {
            CaseTag.BOTH_INCREASING: lambda: increasing_family(self.a, self.b, self.c),
            CaseTag.MIXED_ONTO: lambda: increasing_family(self.a, self.b, self.c),
            CaseTag.MIXED: lambda: mixed_family(self.a, self.b, self.c),
            CaseTag.BOTH_DECREASING: lambda: decreasing_family(self.a, self.b, self.c),
            CaseTag.BOTH_ONTO_INCREASING: lambda: (onto_increasing(self.a), onto_increasing(self.b)),
        }[self.case_tag]()
        return rebuilt == (self.R, self.T)

    def to_json(self) -> dict:
        return {
            "case_tag": self.case_tag.value,
            "a": str(self.a),
            "b": str(self.b),
            "c": None if self.c is None else str(self.c),
            "conjugator": list(self.conjugator.coeffs),
            "swapped": self.swapped,
            "reflected": self.reflected,
            "R": list(self.R.coeffs),
            "T": list(self.T.coeffs),
            "checks": dict(sorted(self.checks.items())),
        }


def _unit_pair(f: MapOnInterval, g: MapOnInterval):
    if f.interval != g.interval:
        raise MixedIntervals("maps live on different intervals")
    theta = theta_for(f.interval)
    return theta, to_unit(f, theta), to_unit(g, theta)


def _reflect(m: MapOnInterval) -> MapOnInterval:
    return validate(conjugate(m.map, REFLECTION), m.interval)


def _u_moving_zero_to_infinity(Y: MobiusMap) -> Fraction:
    """u such that x/(ux+1-u) sends the zero of Y to infinity."""
    if Y.A == 0:
        return Fraction(0)
    z0 = Fraction(-Y.B, Y.A)
    if z0 == 1:
        raise NotCanonicalizable("decreasing map vanishes at 1 (onto); no a/(x+a) form")
    return 1 / (1 - z0)


def _increasing_parameters(X: MapOnInterval, Y: MapOnInterval):
    """X not onto with o(X)=0, Y with o(Y)=1 on [0,1]: find u with
    x/(ux+1-u) conjugating X to x/(x+a), then read (b, c) off Y."""
    if attracting_fixed_point(Y) != 1:
        raise NotCanonicalizable("second map is not attracted to the opposite endpoint")
    # X = px/(qx+r): in w = 1/x it is w -> (r/p) w + q/p
    p, q, r = Fraction(X.map.A), Fraction(X.map.C), Fraction(X.map.D)
    alpha, beta = r / p, q / p
    a = alpha
    u = 1 - alpha / (alpha + beta - 1)
    th = theta_u(u)
    T = conjugate(X.map, th)
    if T != MobiusMap(1, 0, 1, a):
        raise NotCanonicalizable(f"conjugated first map {T} is not x/(x+a)")
    Yc = conjugate(Y.map, th)
    A, B, C, D = (Fraction(v) for v in Yc.coeffs)
    if A + B != C + D:
        raise NotCanonicalizable("second map does not fix 1")
    if A + B < 0:
        A, B, C, D = -A, -B, -C, -D
    if not (D > B >= 0):
        raise NotCanonicalizable("second map violates D > B >= 0")
    b = (A + B) / (D - B)
    c = a * B / (D - B)
    R, T2 = increasing_family(a, b, c)
    if R != Yc or T2 != T:
        raise NotCanonicalizable("parameter reconstruction failed")
    return a, b, c, th, R, T, {"B_plus_C_nonnegative": B + C >= 0, "u": str(u)}


def _both_increasing(theta, F, G) -> CanonicalPair:
    oF, oG = attracting_fixed_point(F), attracting_fixed_point(G)
    ontoF, ontoG = is_onto(F), is_onto(G)
    choice = None
    for reflected in (False, True):
        target = 1 if reflected else 0
        for swapped, X, oX, ontoX, Y in (
            (False, F, oF, ontoF, G),
            (True, G, oG, ontoG, F),
        ):
            if not ontoX and oX == target:
                choice = (reflected, swapped, X, Y)
                break
        if choice:
            break
    if choice is None:
        raise NotCanonicalizable("no non-onto member attracted to an endpoint")
    reflected, swapped, X, Y = choice
    conj = theta
    if reflected:
        X, Y = _reflect(X), _reflect(Y)
        conj = compose(REFLECTION, conj)
    a, b, c, th, R, T, checks = _increasing_parameters(X, Y)
    return CanonicalPair(
        CaseTag.BOTH_INCREASING, a, b, c, compose(th, conj), swapped, reflected, R, T,
        checks=checks,
    )


def _mixed_onto(theta, X, Y, swapped) -> CanonicalPair:
    """Increasing X not onto, decreasing Y onto (an involution): reduce to
    the increasing pair (X, Y X Y)."""
    oX = attracting_fixed_point(X)
    if oX not in (0, 1):
        raise NotCanonicalizable("o(f) is not an endpoint")
    reflected = oX == 1
    conj = theta
    if reflected:
        X, Y = _reflect(X), _reflect(Y)
        conj = compose(REFLECTION, conj)
    YXY = validate(compose(compose(Y.map, X.map), Y.map), X.interval)
    a, b, c, th, R, T, checks = _increasing_parameters(X, YXY)
    involution = conjugate(Y.map, th)
    checks["involution"] = list(involution.coeffs)
    return CanonicalPair(
        CaseTag.MIXED_ONTO, a, b, c, compose(th, conj), swapped, reflected, R, T,
        checks=checks,
    )


def _both_onto(theta, F, G) -> CanonicalPair:
    a = derivative_at(F.map, Fraction(0))
    b = derivative_at(G.map, Fraction(0))
    if F.map != onto_increasing(a) or G.map != onto_increasing(b):
        raise NotCanonicalizable("onto increasing maps do not fix 0 and 1")
    return CanonicalPair(
        CaseTag.BOTH_ONTO_INCREASING, a, b, None, theta, False, False, F.map, G.map
    )


def _mixed(theta, F, G) -> CanonicalPair:
    swapped = monotonicity(F) is Monotonicity.DECREASING
    X, Y = (G, F) if swapped else (F, G)
    if is_onto(Y):
        if is_onto(X):
            raise NotCanonicalizable("both members onto")
        return _mixed_onto(theta, X, Y, swapped)
    oX = attracting_fixed_point(X)
    if oX not in (0, 1) or evaluate(Y.map, oX) != 1 - oX:
        raise NotCanonicalizable("{o(f), g(o(f))} != {0, 1}")
    reflected = oX == 1
    conj = theta
    if reflected:
        X, Y = _reflect(X), _reflect(Y)
        conj = compose(REFLECTION, conj)
    u = _u_moving_zero_to_infinity(Y.map)
    th = theta_u(u)
    Tc = conjugate(Y.map, th)
    t1 = evaluate(Tc, Fraction(1))
    a = t1 / (1 - t1)
    if Tc != MobiusMap(0, a, 1, a):
        raise NotCanonicalizable(f"conjugated decreasing map {Tc} is not a/(x+a)")
    Rc = conjugate(X.map, th)
    if Rc.B != 0:
        raise NotCanonicalizable("increasing map does not fix 0")
    P, Q = Fraction(Rc.C, Rc.A), Fraction(Rc.D, Rc.A)
    b = Q
    c = a * (P + b - 1)
    R, T = mixed_family(a, b, c)
    if R != Rc or T != Tc:
        raise NotCanonicalizable("parameter reconstruction failed")
    return CanonicalPair(
        CaseTag.MIXED, a, b, c, compose(th, conj), swapped, reflected, R, T,
        checks={"u": str(u)},
    )


def _both_decreasing(theta, F, G) -> CanonicalPair:
    if is_onto(F) or is_onto(G):
        raise NotCanonicalizable("an onto decreasing member has no canonical form")
    one, zero = Fraction(1), Fraction(0)
    if evaluate(F.map, zero) == one and evaluate(G.map, one) == zero:
        swapped, Tm, Rm = False, F, G
    elif evaluate(G.map, zero) == one and evaluate(F.map, one) == zero:
        swapped, Tm, Rm = True, G, F
    else:
        raise NotCanonicalizable("need one member with f(0)=1 and the other with g(1)=0")
    u = _u_moving_zero_to_infinity(Tm.map)
    th = theta_u(u)
    Tc = conjugate(Tm.map, th)
    t1 = evaluate(Tc, one)
    a = t1 / (1 - t1)
    if Tc != MobiusMap(0, a, 1, a):
        raise NotCanonicalizable(f"conjugated map {Tc} is not a/(x+a)")
    Rc = conjugate(Rm.map, th)
    p, q, r, s = (Fraction(v) for v in Rc.coeffs)
    if p != -q or q == 0:
        raise NotCanonicalizable("second map does not vanish at 1")
    lam = a / q
    c = lam * s - a
    b = lam * r + lam * s
    R, T = decreasing_family(a, b, c)
    if R != Rc or T != Tc:
        raise NotCanonicalizable("parameter reconstruction failed")
    return CanonicalPair(
        CaseTag.BOTH_DECREASING, a, b, c, compose(th, theta), swapped, False, R, T,
        checks={"u": str(u)},
    )


def canonicalize_pair(f: MapOnInterval, g: MapOnInterval) -> CanonicalPair:
    theta, F, G = _unit_pair(f, g)
    if F.map.is_identity() or G.map.is_identity():
        raise NotCanonicalizable("identity member")
    mF, mG = monotonicity(F), monotonicity(G)
    if mF is Monotonicity.INCREASING and mG is Monotonicity.INCREASING:
        if is_onto(F) and is_onto(G):
            return _both_onto(theta, F, G)
        return _both_increasing(theta, F, G)
    if mF is Monotonicity.DECREASING and mG is Monotonicity.DECREASING:
        return _both_decreasing(theta, F, G)
    return _mixed(theta, F, G)
