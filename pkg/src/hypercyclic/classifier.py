"""Exact decision procedure for density of orbits of <f, g>."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .intervals import (
    IntervalSpec,
    MapOnInterval,
    Monotonicity,
    attracting_fixed_point,
    covers,
    image,
    is_onto,
    monotonicity,
    union_of_closures,
    validate,
)
from .mobius import MobiusMap, Point, compose, derivative_at, evaluate, invert, point_str
from .normalize import NotCanonicalizable, _unit_pair, canonicalize_pair


class NonPositiveInput(ValueError):
    pass


# log_a b ------------------------------------------------------------------

@dataclass(frozen=True)
class LogRatio:
    kind: str  # "Rational" | "Irrational" | "Degenerate"
    value: Optional[Fraction] = None

    @property
    def is_rational(self) -> bool:
        return self.kind == "Rational"


def coprime_base(numbers) -> list[int]:
    """Pairwise coprime integers > 1 generating every input multiplicatively."""
    base = [n for n in numbers if n > 1]
    changed = True
    while changed:
        changed = False
        for i in range(len(base)):
            for j in range(i + 1, len(base)):
                g = math.gcd(base[i], base[j])
                if g > 1:
                    x, y = base[i] // g, base[j] // g
                    rest = [base[k] for k in range(len(base)) if k not in (i, j)]
                    base = rest + [v for v in (x, y, g) if v > 1]
                    changed = True
                    break
            if changed:
                break
    return sorted(set(base))


def _valuation(n: int, t: int) -> int:
    e = 0
    while n % t == 0:
        n //= t
        e += 1
    return e


def exponent_vector(x: Fraction, base: list[int]) -> tuple[int, ...]:
    return tuple(_valuation(x.numerator, t) - _valuation(x.denominator, t) for t in base)


def log_ratio_is_rational(a, b) -> LogRatio:
    """Decide whether log_a b is rational; return it as q/p when it is."""
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise NonPositiveInput("log_a b needs a, b > 0")
    if a == 1 or b == 1:
        return LogRatio("Degenerate")
    base = coprime_base([a.numerator, a.denominator, b.numerator, b.denominator])
    va, vb = exponent_vector(a, base), exponent_vector(b, base)
    i = next(k for k, e in enumerate(va) if e != 0)
    ratio = Fraction(vb[i], va[i])
    if all(ratio * ea == eb for ea, eb in zip(va, vb)):
        return LogRatio("Rational", ratio)
    return LogRatio("Irrational")


# verdicts -----------------------------------------------------------------

class Case(str, enum.Enum):
    THM1_I = "Thm1-i"
    THM1_II = "Thm1-ii"
    THM1_III = "Thm1-iii"
    ONTO_IRRATIONAL = "BothOntoIncreasing-Irrational"
    ONTO_RATIONAL = "BothOntoIncreasing-Rational"
    MIXED_ONTO = "MixedOntoSubcase"
    DECREASING_ONTO = "DecreasingOntoSubcase"
    BOTH_ONTO_NOT_DENSE = "BothOnto-NotDense"
    STRUCTURAL_FAIL = "StructuralFail"


class DenseFor(str, enum.Enum):
    ALL = "AllPoints"
    INTERIOR = "InteriorPoints"
    NONE = "None"


@dataclass
class Witnesses:
    """Everything needed to recompute the cited conditions, in the
    normalized [0,1] frame.  ``frame`` maps the input interval onto it."""

    frame: MobiusMap
    F: MobiusMap
    G: MobiusMap
    o_f: Optional[Point] = None
    o_g: Optional[Point] = None
    o_fg: Optional[Point] = None
    o_gf: Optional[Point] = None
    g_at_o_f: Optional[Point] = None
    images: dict = field(default_factory=dict)
    log_ratio: Optional[LogRatio] = None
    multipliers: Optional[tuple] = None
    parameters: object = None

    def to_json(self) -> dict:
        def pt(x):
            return None if x is None else point_str(x)

        out = {
            "frame": list(self.frame.coeffs),
            "F": list(self.F.coeffs),
            "G": list(self.G.coeffs),
            "o_f": pt(self.o_f),
            "o_g": pt(self.o_g),
            "o_fg": pt(self.o_fg),
            "o_gf": pt(self.o_gf),
            "g_at_o_f": pt(self.g_at_o_f),
            "images": {k: v.to_json() for k, v in sorted(self.images.items())},
            "unions": {
                k: [[point_str(lo), point_str(hi)] for lo, hi in union_of_closures(self.images[n] for n in k.split("+"))]
                for k in sorted(self._union_keys())
            },
            "log_ratio": None
            if self.log_ratio is None
            else {"kind": self.log_ratio.kind, "value": None if self.log_ratio.value is None else str(self.log_ratio.value)},
            "multipliers": None if self.multipliers is None else [str(m) for m in self.multipliers],
            "parameters": None if self.parameters is None else self.parameters.to_json(),
        }
        return out

    def _union_keys(self):
        keys = []
        for pair in (("f", "g"), ("f", "gf"), ("fg", "gf")):
            if all(p in self.images for p in pair):
                keys.append("+".join(pair))
        return keys


@dataclass
class Verdict:
    hypercyclic: bool
    case: Case
    dense_for: DenseFor
    witnesses: Witnesses
    conditions: dict
    reason: Optional[str] = None
    excluded_starts: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.case is Case.STRUCTURAL_FAIL:
            return f"StructuralFail({self.reason})"
        return self.case.value

    def to_json(self) -> dict:
        return {
            "hypercyclic": self.hypercyclic,
            "case": self.case.value,
            "label": self.label,
            "reason": self.reason,
            "dense_for": self.dense_for.value,
            "excluded_starts": [point_str(x) for x in self.excluded_starts],
            "conditions": dict(sorted(self.conditions.items())),
            "witnesses": self.witnesses.to_json(),
        }


UNIT = IntervalSpec.unit()
ZERO, ONE = Fraction(0), Fraction(1)


def _endpoints(*points) -> bool:
    return set(points) == {ZERO, ONE} and len(points) == 2


def condition_holds(name: str, w: Witnesses) -> bool:
    """Recompute one named condition from witness data alone."""
    if name.startswith("union:"):
        names = name.split(":", 1)[1].split("+")
        return covers([w.images[n] for n in names], UNIT)
    if name == "o_f,o_g=boundary":
        return _endpoints(w.o_f, w.o_g)
    if name == "o_f,g(o_f)=boundary":
        return w.o_f is not None and _endpoints(w.o_f, w.g_at_o_f)
    if name == "o_fg,o_gf=boundary":
        return _endpoints(w.o_fg, w.o_gf)
    if name == "no_identity":
        return not (w.F.is_identity() or w.G.is_identity())
    if name == "not_both_onto":
        return not ("f" in w.images and "g" in w.images and w.images["f"].same_closure(UNIT) and w.images["g"].same_closure(UNIT))
    if name == "opposite_sides":
        a, b = w.multipliers
        return (a > 1 > b) or (b > 1 > a)
    if name == "log_irrational":
        return w.log_ratio is not None and w.log_ratio.kind == "Irrational"
    if name == "f_or_g_not_onto":
        return not all(w.images[n].same_closure(UNIT) for n in ("f", "g"))
    raise KeyError(name)


def recheck(verdict: Verdict) -> bool:
    """True iff every recorded condition recomputes to the recorded value and
    the verdict equals their conjunction."""
    for name, value in verdict.conditions.items():
        if condition_holds(name, verdict.witnesses) != value:
            return False
    return verdict.hypercyclic == all(verdict.conditions.values())


def _fail(w, conditions, reason, case=Case.STRUCTURAL_FAIL) -> Verdict:
    return Verdict(False, case, DenseFor.NONE, w, conditions, reason=reason)


def _try_parameters(f, g):
    try:
        return canonicalize_pair(f, g)
    except NotCanonicalizable:
        return None


def _o(m: MobiusMap) -> Optional[Point]:
    return attracting_fixed_point(validate(m, UNIT))


def _pull_back(x: Point, frame: MobiusMap, interval: IntervalSpec) -> Optional[Point]:
    y = evaluate(invert(frame), x)
    return y if interval.contains(y) else None


def classify(f: MapOnInterval, g: MapOnInterval) -> Verdict:
    theta, F, G = _unit_pair(f, g)
    w = Witnesses(frame=theta, F=F.map, G=G.map)
    w.images["f"], w.images["g"] = image(F), image(G)
    conds: dict = {"no_identity": not (F.map.is_identity() or G.map.is_identity())}
    if not conds["no_identity"]:
        return _fail(w, conds, "identity generator")

    mF, mG = monotonicity(F), monotonicity(G)
    inc = Monotonicity.INCREASING
    ontoF, ontoG = is_onto(F), is_onto(G)

    if mF is inc and mG is inc:
        if ontoF and ontoG:
            return _both_onto_increasing(f, g, F, G, w, conds)
        w.o_f, w.o_g = attracting_fixed_point(F), attracting_fixed_point(G)
        conds["f_or_g_not_onto"] = True
        conds["union:f+g"] = condition_holds("union:f+g", w)
        conds["o_f,o_g=boundary"] = condition_holds("o_f,o_g=boundary", w)
        if not all(conds.values()):
            return _fail(w, conds, _first_failed(conds))
        w.parameters = _try_parameters(f, g)
        excluded = [
            e for e in (ZERO, ONE) if evaluate(F.map, e) == e and evaluate(G.map, e) == e
        ]
        starts = [p for p in (_pull_back(e, theta, f.interval) for e in excluded) if p is not None]
        return Verdict(True, Case.THM1_I, DenseFor.ALL, w, conds, excluded_starts=starts)

    if mF is not inc and mG is not inc:
        return _both_decreasing(f, g, F, G, w, conds, ontoF, ontoG)

    # mixed: name the increasing map X and the decreasing map Y
    swapped = mF is not inc
    X, Y = (G, F) if swapped else (F, G)
    ontoX, ontoY = (ontoG, ontoF) if swapped else (ontoF, ontoG)
    conds["not_both_onto"] = not (ontoX and ontoY)
    if not conds["not_both_onto"]:
        # Y is an involution commuting with X: orbits accumulate only at 0 and 1
        w.o_f = attracting_fixed_point(X)
        return _fail(w, conds, "both onto", Case.BOTH_ONTO_NOT_DENSE)
    w.o_f = attracting_fixed_point(X)
    w.g_at_o_f = None if w.o_f is None else evaluate(Y.map, w.o_f)
    if swapped:
        # witnesses are stored with f := increasing map
        w.F, w.G = X.map, Y.map
        w.images["f"], w.images["g"] = image(X), image(Y)
    conds["o_f,g(o_f)=boundary"] = condition_holds("o_f,g(o_f)=boundary", w)
    if not ontoY:
        conds["union:f+g"] = condition_holds("union:f+g", w)
        case = Case.THM1_II
    else:
        w.images["gf"] = image(validate(compose(Y.map, X.map), UNIT))
        conds["union:f+gf"] = condition_holds("union:f+gf", w)
        case = Case.MIXED_ONTO
    if not all(conds.values()):
        return _fail(w, conds, _first_failed(conds))
    w.parameters = _try_parameters(f, g)
    return Verdict(True, case, DenseFor.ALL, w, conds)


def _first_failed(conds: dict) -> str:
    return next(k for k, v in conds.items() if not v)


def _both_onto_increasing(f, g, F, G, w, conds) -> Verdict:
    a = derivative_at(F.map, ZERO)
    b = derivative_at(G.map, ZERO)
    w.multipliers = (a, b)
    w.o_f, w.o_g = attracting_fixed_point(F), attracting_fixed_point(G)
    w.log_ratio = log_ratio_is_rational(a, b)
    w.parameters = _try_parameters(f, g)
    conds["log_irrational"] = condition_holds("log_irrational", w)
    conds["opposite_sides"] = condition_holds("opposite_sides", w)
    if w.log_ratio.is_rational:
        return _fail(w, conds, "log ratio rational", Case.ONTO_RATIONAL)
    if not conds["opposite_sides"]:
        return _fail(w, conds, "multipliers on the same side of 1", Case.BOTH_ONTO_NOT_DENSE)
    return Verdict(True, Case.ONTO_IRRATIONAL, DenseFor.INTERIOR, w, conds)


def _both_decreasing(f, g, F, G, w, conds, ontoF, ontoG) -> Verdict:
    conds["not_both_onto"] = not (ontoF and ontoG)
    if not conds["not_both_onto"]:
        return _fail(w, conds, "both onto", Case.BOTH_ONTO_NOT_DENSE)
    fg = compose(F.map, G.map)
    gf = compose(G.map, F.map)
    w.o_fg, w.o_gf = _o(fg), _o(gf)
    conds["o_fg,o_gf=boundary"] = condition_holds("o_fg,o_gf=boundary", w)
    if not (ontoF or ontoG):
        conds["union:f+g"] = condition_holds("union:f+g", w)
        case = Case.THM1_III
    else:
        w.images["fg"] = image(validate(fg, UNIT))
        w.images["gf"] = image(validate(gf, UNIT))
        conds["union:fg+gf"] = condition_holds("union:fg+gf", w)
        case = Case.DECREASING_ONTO
    if not all(conds.values()):
        return _fail(w, conds, _first_failed(conds))
    if case is Case.THM1_III:
        w.parameters = _try_parameters(f, g)
    return Verdict(True, case, DenseFor.INTERIOR, w, conds)
