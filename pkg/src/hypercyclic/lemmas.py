"""Exact per-instance checks of derivative forms, derivative bounds and the
gap pull-back construction for the three canonical families.

All quantities are Fractions and every comparison is exact.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .intervals import (
    IntervalSpec,
    MapOnInterval,
    MixedIntervals,
    UnsupportedInterval,
    attracting_fixed_point,
    covers_union,
    image,
    image_of,
    is_length_decreasing,
)
from .mobius import MobiusMap, Word, compose, evaluate, invert
from .normalize import increasing_family, mixed_family, decreasing_family

UNIT = IntervalSpec.unit()


class HypothesisViolated(ValueError):
    """Parameters or word shape outside the range a form is claimed for."""


class FormMismatch(AssertionError):
    """A claimed exact identity or inequality failed."""


class BoundViolated(AssertionError):
    """A claimed derivative bound failed."""


class NotDisjoint(ValueError):
    """The interval to pull back contains a sampled orbit point."""


class Stuck(RuntimeError):
    """Neither inverse keeps the interval inside [0,1]."""


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _fraction_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def scaled_representative(f: MobiusMap, det_abs: Fraction) -> tuple[Fraction, ...]:
    """The matrix of f scaled so |det| = det_abs and the constant term of the
    denominator is positive (its slope if the constant vanishes)."""
    s = _fraction_sqrt(Fraction(det_abs) / abs(f.det))
    if s is None:
        raise FormMismatch(f"|det| of {f} cannot be rescaled to {det_abs} rationally")
    A, B, C, D = (s * v for v in f.coeffs)
    if D < 0 or (D == 0 and C < 0):
        A, B, C, D = -A, -B, -C, -D
    return A, B, C, D


# polynomials as coefficient lists, lowest degree first

def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def chain_rule_derivative(letters: str, gens) -> tuple[list, list]:
    """Numerator and denominator polynomials of the derivative of the word,
    built factor by factor from the chain rule (no matrix product)."""
    num, den = [Fraction(1)], [Fraction(1)]
    inner = MobiusMap.identity()
    for ch in reversed(letters):
        g = gens[ch]
        p, q, r, s = inner.coeffs
        # g'(inner(x)) = det_g (r x + s)^2 / ((C p + D r) x + (C q + D s))^2
        lin_in = [Fraction(s), Fraction(r)]
        lin_out = [Fraction(g.C * q + g.D * s), Fraction(g.C * p + g.D * r)]
        num = _pmul(num, [Fraction(g.det) * v for v in _pmul(lin_in, lin_in)])
        den = _pmul(den, _pmul(lin_out, lin_out))
        inner = compose(g, inner)
    return num, den


def identity_holds(letters: str, gens, scale, slope, intercept) -> bool:
    """scale/(slope x + intercept)^2 equals the chain-rule derivative as
    rational functions (cross-multiplied, coefficient-wise)."""
    num, den = chain_rule_derivative(letters, gens)
    lin = [Fraction(intercept), Fraction(slope)]
    lhs = _trim(_pmul([Fraction(scale)], den))
    rhs = _trim(_pmul(num, _pmul(lin, lin)))
    return lhs == rhs


@dataclass
class DerivativeForm:
    word: str
    params: tuple
    numerator_scale: Fraction
    slope: Fraction
    intercept: Fraction
    extracted: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    identity: bool = True

    @property
    def passed(self) -> bool:
        return self.identity and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "params": [str(p) for p in self.params],
            "numerator_scale": str(self.numerator_scale),
            "denominator": {"slope": str(self.slope), "intercept": str(self.intercept)},
            "extracted": {k: _jsonable(v) for k, v in sorted(self.extracted.items())},
            "checks": dict(sorted(self.checks.items())),
            "flags": list(self.flags),
            "identity": self.identity,
            "passed": self.passed,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in sorted(v.items())}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _finish(form: DerivativeForm, strict: bool) -> DerivativeForm:
    if strict and not form.identity:
        raise FormMismatch(f"derivative identity fails for {form.word} at {form.params}")
    if strict and not all(form.checks.values()):
        bad = [k for k, v in form.checks.items() if not v]
        raise FormMismatch(f"{form.word} at {form.params}: failed {bad}")
    return form


# -- both increasing ---------------------------------------------------------


def verify_impt(word: str, a, b, c, strict: bool = True) -> DerivativeForm:
    """Derivative form of a word R g T^k for the both-increasing family."""
    a, b, c = _q(a), _q(b), _q(c)
    if not (a > 1 and b > 1 and 1 >= c > 0 and a * b - a - c >= 0):
        raise HypothesisViolated(f"need a,b > 1 >= c > 0 and ab-a-c >= 0, got {(a, b, c)}")
    if not word or set(word) - {"R", "T"} or word[0] != "R":
        raise HypothesisViolated(f"word must start with R and use R,T only: {word!r}")
    R, T = increasing_family(a, b, c)
    gens = {"R": R, "T": T}
    m, n = word.count("R"), word.count("T")
    k = len(word) - len(word.rstrip("T"))
    scale = a**n * b**m
    A, B, C, D = scaled_representative(Word.build(word, gens).composed, scale)
    base = c * a ** (k - 1) * b ** (m - 1)
    u = C - b**m
    v = D - base
    form = DerivativeForm(word, (a, b, c), scale, C, D)
    form.extracted = {"m": m, "n": n, "k": k, "u": u, "v": v}
    form.checks = {
        "u+a^k b^(m-1)+c a^(k-1) b^(m-1) >= 0": u + a**k * b ** (m - 1) + base >= 0,
        "u+b^m >= 0": u + b**m >= 0,
        "v >= 0": v >= 0,
    }
    form.identity = identity_holds(word, gens, scale, C, D)
    return _finish(form, strict)


# -- mixed -------------------------------------------------------------------


def parse_blocks(word: str) -> list[tuple[int, int]]:
    """R^a1 T^b1 ... R^ak T^bk -> [(a1,b1), ...]; raises on other shapes."""
    runs = Word(word, MobiusMap.identity()).runs()
    if not runs or runs[0][0] != "R" or runs[-1][0] != "T" or set(word) - {"R", "T"}:
        raise HypothesisViolated(f"word must have the shape R^a T^b ... R^a T^b: {word!r}")
    return [(runs[i][1], runs[i + 1][1]) for i in range(0, len(runs), 2)]


def _min_exponent(target_gap: Fraction, coef: Fraction, b: Fraction, lower: int, limit: int = 10_000):
    """Smallest K >= lower with target_gap - coef*b^K >= 0, or None."""
    if b >= 1:
        return lower if target_gap - coef * b**lower >= 0 else None
    if target_gap <= 0:
        return None
    K, term = lower, coef * b**lower
    while target_gap - term < 0:
        K += 1
        term *= b
        if K - lower > limit:
            return None
    return K


def _block_form(block: str, gens, a, b, c, m: int) -> dict:
    """R^m T^n (n odd): numerator a+gamma+delta x, denominator
    a + c b^(m-1) + b^m x + mu + lambda x, |det| = a b^m."""
    A, B, C, D = scaled_representative(Word.build(block, gens).composed, a * b**m)
    vals = {"gamma": B - a, "delta": A, "mu": D - a - c * b ** (m - 1), "lambda": C - b**m}
    ident = identity_holds(block, gens, -a * b**m, C, D)
    return {"word": block, "constants": vals, "nonnegative": all(v >= 0 for v in vals.values()), "identity": ident}


def _pair_form(block: str, gens, a, b, c, a1: int, a2: int) -> dict:
    """k = 2 word h: numerator a b^a2 x + c a b^(a2-1) + C1 + C2 x."""
    scale = a**2 * b ** (a1 + a2)
    A, B, C, D = scaled_representative(Word.build(block, gens).composed, scale)
    vals = {
        "C1": B - c * a * b ** (a2 - 1),
        "C2": A - a * b**a2,
        "u": C - c * b ** (a1 + a2 - 1) - a * b**a2,
        "v": D - a * b**a1 - c**2 * b ** (a1 + a2 - 2),
    }
    ident = identity_holds(block, gens, scale, C, D)
    return {"word": block, "constants": vals, "nonnegative": all(v >= 0 for v in vals.values()), "identity": ident}


def verify_imp2(word: str, a, b, c, strict: bool = True) -> DerivativeForm:
    """Derivative form of R^a1 T^b1 ... R^ak T^bk (all b_i odd) for the
    mixed family, plus the block and two-block auxiliary forms."""
    a, b, c = _q(a), _q(b), _q(c)
    if not (a > 0 and b > 0 and c > 0):
        raise HypothesisViolated(f"need a,b,c > 0, got {(a, b, c)}")
    blocks = parse_blocks(word)
    if any(beta % 2 == 0 for _, beta in blocks):
        raise HypothesisViolated(f"every T-run must be odd: {word!r}")
    R, T = mixed_family(a, b, c)
    gens = {"R": R, "T": T}
    k = len(blocks)
    s = k // 2
    alphas = [al for al, _ in blocks]
    M = sum(alphas[0::2][: s + 1])
    N = sum(alphas[1::2][:s])
    scale = a**k * b ** (M + N)
    A, B, C, D = scaled_representative(Word.build(word, gens).composed, scale)
    form = DerivativeForm(word, (a, b, c), scale if k % 2 == 0 else -scale, C, D)
    ex = {"k": k, "s": s, "M": M, "N": N}
    checks: dict = {}

    if k % 2 == 0:
        # slope = c a^(s-1) b^K + a^s b^N + u ; intercept = v + a^s b^M + c^2 a^(s-1) b^(L-1)
        K = _min_exponent(C - a**s * b**N, c * a ** (s - 1), b, max(M, N))
        L = _min_exponent(D - a**s * b**M, c**2 * a ** (s - 1) / b, b, N)
        checks["main form (even k)"] = K is not None and L is not None
        if K is not None and L is not None:
            ex.update(
                K=K,
                L=L,
                u=C - c * a ** (s - 1) * b**K - a**s * b**N,
                v=D - a**s * b**M - c**2 * a ** (s - 1) * b ** (L - 1),
            )
        if k == 2:
            a1, a2 = alphas
            Kp, Lp = a1 + a2 - 1, a1 + a2 - 2
            up = C - c * b**Kp - a * b**a2
            vp = D - a * b**a1 - c**2 * b ** (Lp - 1)
            ex.update(K_proof=Kp, L_proof=Lp, u_proof=up, v_proof=vp)
            if up < 0 or vp < 0:
                form.flags.append("proof exponents K=a1+a2-1, L=a1+a2-2 give a negative constant")
    elif k >= 3:
        # slope = a^s b^M + c^2 a^(s-1) b^L + u ; intercept = v + a^(s+1) b^N + c a^s b^K
        L = _min_exponent(C - a**s * b**M, c**2 * a ** (s - 1), b, N)
        K = _min_exponent(D - a ** (s + 1) * b**N, c * a**s, b, N)
        checks["main form (odd k)"] = K is not None and L is not None
        if K is not None and L is not None:
            ex.update(
                K=K,
                L=L,
                u=C - a**s * b**M - c**2 * a ** (s - 1) * b**L,
                v=D - a ** (s + 1) * b**N - c * a**s * b**K,
            )

    # auxiliary forms: every block, and every consecutive block pair
    pos, aux_blocks = 0, []
    for al, be in blocks:
        aux_blocks.append(word[pos:pos + al + be])
        pos += al + be
    ex["blocks"] = [_block_form(bw, gens, a, b, c, al) for bw, (al, _) in zip(aux_blocks, blocks)]
    ex["pairs"] = [
        _pair_form(aux_blocks[i] + aux_blocks[i + 1], gens, a, b, c, blocks[i][0], blocks[i + 1][0])
        for i in range(0, k - 1, 2)
    ]
    for aux in ex["blocks"] + ex["pairs"]:
        if not aux["nonnegative"]:
            form.flags.append(f"auxiliary form of {aux['word']} has a negative constant")
    aux_identity = all(aux["identity"] for aux in ex["blocks"] + ex["pairs"])
    form.extracted = ex
    form.checks = checks
    form.identity = identity_holds(word, gens, form.numerator_scale, C, D) and aux_identity
    return _finish(form, strict)


# -- both decreasing ---------------------------------------------------------


@dataclass
class BoundReport:
    m: int
    n: int
    params: tuple
    sup: Fraction
    bound: Fraction
    at_zero: Fraction
    at_one: Fraction
    components: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def parity(self) -> str:
        return "even" if (self.m + self.n) % 2 == 0 else "odd"

    @property
    def holds(self) -> bool:
        return self.sup <= self.bound

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "params": [str(p) for p in self.params],
            "parity": self.parity,
            "sup": str(self.sup),
            "bound": str(self.bound),
            "derivative_at_0": str(self.at_zero),
            "derivative_at_1": str(self.at_one),
            "holds": self.holds,
            "components": _jsonable(self.components),
            "flags": list(self.flags),
        }


def sup_abs_derivative(f: MobiusMap) -> tuple[Fraction, Fraction, Fraction]:
    """max over [0,1] of |f'| and the two endpoint values; |f'| is monotone
    on any interval avoiding the pole, so the max sits at an endpoint."""
    if f.pole is not None and 0 <= f.pole <= 1:
        raise HypothesisViolated(f"{f} has its pole in [0,1]")
    d0 = Fraction(f.det, f.D**2)
    d1 = Fraction(f.det, (f.C + f.D) ** 2)
    return max(abs(d0), abs(d1)), d0, d1


def _component_form(m: int, gens, a, b, c) -> dict:
    """R^m T: |det| = a (m even) or b (m odd) with the displayed constants."""
    letters = "R" * m + "T"
    f = Word.build(letters, gens).composed
    if m % 2 == 0:
        A, B, C, D = scaled_representative(f, a)
        vals = {"gamma": B - a, "lambda": A, "v": D - a - c, "u": C - 1}
        scale = -a
    else:
        A, B, C, D = scaled_representative(f, b)
        vals = {"gamma": B - c, "lambda": A - 1, "v": D - b - c, "u": C - 1}
        scale = b
    ident = identity_holds(letters, gens, scale, C, D)
    return {"word": letters, "constants": vals, "nonnegative": all(v >= 0 for v in vals.values()), "identity": ident}


def verify_imp3(m: int, n: int, a, b, c, strict: bool = True) -> BoundReport:
    """sup |(R^m T R^n T)'| on [0,1] against the parity bound."""
    a, b, c = _q(a), _q(b), _q(c)
    if not (a > 0 and b > 0 and c > 0):
        raise HypothesisViolated(f"need a,b,c > 0, got {(a, b, c)}")
    if m < 1 or n < 1:
        raise HypothesisViolated("m and n must be positive")
    R, T = decreasing_family(a, b, c)
    gens = {"R": R, "T": T}
    f = Word.build("R" * m + "T" + "R" * n + "T", gens).composed
    sup, d0, d1 = sup_abs_derivative(f)
    if (m + n) % 2 == 0:
        bound = max(1 / (1 + a) ** 2, 1 / (b + c) ** 2)
    else:
        bound = a * b / (a * b + b * c) ** 2
    report = BoundReport(m, n, (a, b, c), sup, bound, d0, d1)
    for j in sorted({m, n}):
        comp = _component_form(j, gens, a, b, c)
        report.components.append(comp)
        if not comp["identity"]:
            raise FormMismatch(f"component identity fails for {comp['word']}")
        if not comp["nonnegative"]:
            report.flags.append(f"component form of {comp['word']} has a negative constant")
    if strict and not report.holds:
        raise BoundViolated(f"sup {sup} > bound {bound} for m={m}, n={n}, (a,b,c)=({a}, {b}, {c})")
    return report


def endpoint_derivatives(a, b, c) -> list[dict]:
    """The six endpoint derivatives of RT, RT^2, R^2T in the decreasing
    family, computed exactly and compared with their closed forms."""
    a, b, c = _q(a), _q(b), _q(c)
    R, T = decreasing_family(a, b, c)
    gens = {"R": R, "T": T}
    closed = {
        ("RT", 0): 1 / b,
        ("RT", 1): a**2 * b / (a + a * b + c) ** 2,
        ("RTT", 0): a * b / (a + a * b + c) ** 2,
        ("RTT", 1): a * b / (a + b + a * b + c) ** 2,
        ("RRT", 0): a / (a + c) ** 2,
        ("RRT", 1): a**3 * b**2 / (a**2 * b + c**2 + a * b + a * c + a * b * c) ** 2,
    }
    # intermediate upper bounds used along each chain, all ending below 1
    chain = {
        ("RT", 0): [],
        ("RT", 1): [],
        ("RTT", 0): [a * b / (a * b + c) ** 2],
        ("RTT", 1): [],
        ("RRT", 0): [c / (a + c)],
        ("RRT", 1): [a**3 * b**2 / (a**2 * b + a * b) ** 2],
    }
    out = []
    for (letters, x), value in closed.items():
        f = Word.build(letters, gens).composed
        d = Fraction(f.det) / (f.C * x + f.D) ** 2
        steps = [abs(d)] + chain[(letters, x)]
        out.append(
            {
                "word": letters,
                "at": x,
                "abs_derivative": abs(d),
                "closed_form": value,
                "matches": abs(d) == value,
                "chain": steps,
                "chain_holds": all(p < q for p, q in zip(steps, steps[1:])) and steps[-1] < 1,
            }
        )
    return out


# -- pull-back of gaps -------------------------------------------------------


def mixed_parameters(R: MobiusMap, T: MobiusMap) -> Optional[tuple[Fraction, Fraction, Fraction]]:
    """(a,b,c) if (R,T) is exactly the mixed family pair, else None."""
    t1 = Fraction(evaluate(T, Fraction(1)))
    if t1 >= 1 or t1 <= 0:
        return None
    a = t1 / (1 - t1)
    r1 = Fraction(evaluate(R, Fraction(1)))
    if r1 <= 0 or R.D == 0 or R.A == 0:
        return None
    c = a / r1 - a
    b = Fraction(R.D, R.A)  # R'(0) = A/D = 1/b
    if a <= 0 or b <= 0 or c <= 0:
        return None
    if mixed_family(a, b, c) != (R, T):
        return None
    return a, b, c


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(*x.as_integer_ratio())


@dataclass
class PullBack:
    word: Word
    interval: IntervalSpec
    steps: list
    status: str
    regime: dict

    @property
    def betas(self) -> list[int]:
        return [be for _, be in self.steps]

    def round_trip(self, target: IntervalSpec) -> bool:
        return image_of(self.word.composed, self.interval) == target

    def to_json(self) -> dict:
        return {
            "word": self.word.letters,
            "interval": self.interval.to_json(),
            "steps": [list(s) for s in self.steps],
            "status": self.status,
            "regime": dict(sorted(self.regime.items())),
        }


def _check_disjoint(J: IntervalSpec, sample: list, letters: str):
    """A sample point y in w^-1(A) puts the orbit point w(y) inside A."""
    i = bisect.bisect_left(sample, J.lo)
    for y in sample[i:]:
        if y > J.hi:
            break
        if J.contains(y):
            where = f" (as {letters} applied to it)" if letters else ""
            raise NotDisjoint(f"orbit point {y}{where} lies in the interval")


def _inside_image(J: IntervalSpec, f: MobiusMap) -> bool:
    return image_of(f, UNIT).contains_interval(J.closure())


def _pull_max(J: IntervalSpec, f: MobiusMap, finv: MobiusMap, cap: int) -> tuple[int, IntervalSpec]:
    count = 0
    while count < cap and _inside_image(J, f):
        J = image_of(finv, J)
        count += 1
    return count, J


def pull_back_gap(
    A: IntervalSpec,
    R: MapOnInterval,
    T: MapOnInterval,
    orbit_sample: Sequence = (),
    depth: int = 1,
    strict: bool = False,
    max_power: int = 512,
    certify: bool = False,
) -> PullBack:
    """Write A = w(A_n) greedily: pull back by R as often as possible, then
    by T as often as possible, ``depth`` times.

    The result records which endpoint regime the parameters fall in and
    whether R contracts [0,1] to 0.  A run that cannot move any more (or hits
    ``max_power``) ends with status "stuck"; ``strict`` raises instead.
    With ``certify`` every pulled-back interval is also tested against the
    sample, since a sample point y in w^-1(A) means w(y) is an orbit point
    inside A.
    """
    if R.interval != UNIT or T.interval != UNIT:
        raise UnsupportedInterval("pull-back works on [0,1]")
    if not UNIT.contains_interval(A.closure()):
        raise ValueError(f"{A} is not inside [0,1]")
    sample = sorted(_exact(x) for x in orbit_sample)
    _check_disjoint(A, sample, "")

    params = mixed_parameters(R.map, T.map)
    regime = {"contracts_to_zero": attracting_fixed_point(R) == 0}
    if params is not None:
        a, b, c = params
        regime["params"] = [str(p) for p in params]
        regime["c<=a/(a+c)"] = c <= a / (a + c)
        regime["c>=a/(c+a)"] = c >= a / (c + a)

    Rinv, Tinv = invert(R.map), invert(T.map)
    J, steps, letters, status = A, [], "", "complete"
    for _ in range(depth):
        alpha, J = _pull_max(J, R.map, Rinv, max_power)
        if certify:
            _check_disjoint(J, sample, letters + "R" * alpha)
        beta, J = _pull_max(J, T.map, Tinv, max_power)
        if certify:
            _check_disjoint(J, sample, letters + "R" * alpha + "T" * beta)
        if (alpha == 0 and beta == 0) or alpha == max_power or beta == max_power:
            if alpha or beta:
                steps.append((alpha, beta))
                letters += "R" * alpha + "T" * beta
            status = "stuck"
            break
        steps.append((alpha, beta))
        letters += "R" * alpha + "T" * beta
    if status == "stuck" and strict:
        raise Stuck(f"pull-back of {A} stalls after {len(steps)} steps")
    word = Word.build(letters, {"R": R.map, "T": T.map})
    return PullBack(word, J, steps, status, regime)


# -- general hypotheses ------------------------------------------------------


@dataclass
class HypothesisReport:
    per_map: list
    covers_union: bool

    @property
    def passed(self) -> bool:
        return self.covers_union and all(
            m["length_decreasing"] and m["extrema_at_endpoints"] for m in self.per_map
        )

    def to_json(self) -> dict:
        return {"maps": self.per_map, "covers_union": self.covers_union, "passed": self.passed}


def check_general_hypotheses(maps: Iterable[MapOnInterval]) -> HypothesisReport:
    """Length-decreasing maps whose images cover a closed finite interval."""
    maps = list(maps)
    if not maps:
        raise ValueError("no maps given")
    interval = maps[0].interval
    if any(m.interval != interval for m in maps):
        raise MixedIntervals("maps live on different intervals")
    if not interval.is_finite or not (interval.lo_closed and interval.hi_closed):
        raise UnsupportedInterval("a finite closed interval is required")
    per_map = []
    for m in maps:
        img = image(m)
        per_map.append(
            {
                "map": list(m.map.coeffs),
                "length_decreasing": is_length_decreasing(m),
                # a monotone map attains its extrema at the endpoints
                "extrema_at_endpoints": {img.lo, img.hi} == {m(interval.lo), m(interval.hi)},
            }
        )
    return HypothesisReport(per_map, covers_union(maps))
