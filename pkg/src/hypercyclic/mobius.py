"""Exact algebra of real Mobius maps x -> (Ax+B)/(Cx+D).

Points on the extended line are represented as:

* ``Fraction`` for finite rational points,
* ``math.inf`` / ``-math.inf`` for the two infinities,
* :class:`Surd` for real quadratic irrationals (fixed points of rational
  maps need not be rational).

Floats other than the two infinities never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce, total_ordering
from typing import Mapping, Union

INF = math.inf
NEG_INF = -math.inf


class DegenerateMap(ValueError):
    """AD - BC = 0."""


class PoleError(ValueError):
    """Evaluation of a derivative at the pole."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ("3/2", "-1") to Fraction.

    Float literals are rejected: every downstream decision is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE") or text.lower() in ("inf", "-inf", "nan"):
            raise ValueError(f"not an exact rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def _square_part(d: int) -> tuple[int, int]:
    """(k, e) with d = k^2 e and e square-free."""
    k, e, t = 1, d, 2
    while t * t <= e:
        while e % (t * t) == 0:
            e //= t * t
            k *= t
        t += 1 if t == 2 else 2
    return k, e


def _sign_surd(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of p + q*sqrt(d), d >= 0."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0 or d == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    lhs, rhs = p * p, q * q * d
    if lhs == rhs:
        return 0
    return sp if lhs > rhs else sq


def _sign_two_surds(r: Fraction, q1: Fraction, d1: int, q2: Fraction, d2: int) -> int:
    """Exact sign of r + q1*sqrt(d1) + q2*sqrt(d2)."""
    s = _sign_two_terms(q1, d1, q2, d2)
    sr = (r > 0) - (r < 0)
    if s == 0 or sr == 0 or s == sr:
        return sr or s
    # opposite signs: compare r^2 with (q1 sqrt d1 + q2 sqrt d2)^2
    diff = _sign_surd(r * r - q1 * q1 * d1 - q2 * q2 * d2, -2 * q1 * q2, d1 * d2)
    return sr if diff > 0 else (0 if diff == 0 else s)


def _sign_two_terms(q1: Fraction, d1: int, q2: Fraction, d2: int) -> int:
    s1, s2 = (q1 > 0) - (q1 < 0), (q2 > 0) - (q2 < 0)
    if s1 == 0 or s2 == 0 or s1 == s2:
        return s1 or s2
    big = q1 * q1 * d1 - q2 * q2 * d2
    return s1 if big > 0 else (0 if big == 0 else s2)


@total_ordering
@dataclass(frozen=True)
class Surd:
    """Real number p + q*sqrt(d) with rational p, q and non-square integer d > 1."""

    p: Fraction
    q: Fraction
    d: int

    @staticmethod
    def make(p, q, d: int) -> Union[Fraction, "Surd"]:
        p, q = Fraction(p), Fraction(q)
        if d < 0:
            raise ValueError("complex surd")
        r = math.isqrt(d)
        if r * r == d:
            return p + q * r
        if q == 0:
            return p
        k, d = _square_part(d)
        return Surd(p, q * k, d)

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ValueError("surds over different radicands")
            return other.p, other.q
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return NotImplemented

    def sign(self) -> int:
        return _sign_surd(self.p, self.q, self.d)

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def __neg__(self):
        return Surd(-self.p, -self.q, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Surd.make(self.p + o[0], self.q + o[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Surd.make(self.p - o[0], self.q - o[1], self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p2, q2 = o
        return Surd.make(self.p * p2 + self.q * q2 * self.d, self.p * q2 + self.q * p2, self.d)

    __rmul__ = __mul__

    def reciprocal(self):
        norm = self.p * self.p - self.q * self.q * self.d
        return Surd.make(self.p / norm, -self.q / norm, self.d)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other.reciprocal()
        if isinstance(other, (int, Fraction)):
            return Surd.make(self.p / other, self.q / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            raise TypeError("finite floats are not extended points")
        if isinstance(other, Surd) and other.d != self.d:
            return _sign_two_surds(self.p - other.p, self.q, self.d, -other.q, other.d)
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return _sign_surd(self.p - o[0], self.q - o[1], self.d)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return False

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __str__(self):
        return f"{self.p}{'+' if self.q >= 0 else '-'}{abs(self.q)}*sqrt({self.d})"


Point = Union[Fraction, float, Surd]


def is_finite(x: Point) -> bool:
    return not (isinstance(x, float) and math.isinf(x))


def point_str(x: Point) -> str:
    """Stable text form used in reports."""
    if isinstance(x, float):
        return "inf" if x > 0 else "-inf"
    return str(x)


def _content_free(coeffs) -> tuple[int, int, int, int]:
    fr = [as_rational(v) for v in coeffs]
    den = reduce(math.lcm, (v.denominator for v in fr), 1)
    ints = [int(v * den) for v in fr]
    g = reduce(math.gcd, ints, 0)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


@dataclass(frozen=True, init=False)
class MobiusMap:
    """x -> (Ax+B)/(Cx+D), stored as the content-free integer representative
    whose first nonzero coefficient is positive.  Structural equality is
    therefore projective equality."""

    A: int
    B: int
    C: int
    D: int

    def __init__(self, A, B, C, D):
        if all(as_rational(v) == 0 for v in (A, B, C, D)):
            raise DegenerateMap("all coefficients are zero")
        a, b, c, d = _content_free((A, B, C, D))
        if a * d - b * c == 0:
            raise DegenerateMap(f"AD - BC = 0 for ({A}, {B}, {C}, {D})")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "D", d)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.A * self.D - self.B * self.C

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.A, self.B, self.C, self.D)

    @property
    def trace(self) -> int:
        return self.A + self.D

    def is_identity(self) -> bool:
        return self.B == 0 and self.C == 0 and self.A == self.D

    @property
    def pole(self) -> Point | None:
        """-D/C, or None for affine maps (whose pole is infinity)."""
        if self.C == 0:
            return None
        return Fraction(-self.D, self.C)

    def __call__(self, x: Point) -> Point:
        return evaluate(self, x)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return compose(self, other)

    def __str__(self):
        return f"({self.A}x{self.B:+d})/({self.C}x{self.D:+d})"


def compose(f: MobiusMap, g: MobiusMap) -> MobiusMap:
    """f o g, i.e. the matrix product [f][g]."""
    return MobiusMap(
        f.A * g.A + f.B * g.C,
        f.A * g.B + f.B * g.D,
        f.C * g.A + f.D * g.C,
        f.C * g.B + f.D * g.D,
    )


def invert(f: MobiusMap) -> MobiusMap:
    return MobiusMap(f.D, -f.B, -f.C, f.A)


def power(f: MobiusMap, n: int) -> MobiusMap:
    if n < 0:
        raise ValueError("power expects a nonnegative exponent")
    result = MobiusMap.identity()
    base = f
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def evaluate(f: MobiusMap, x: Point) -> Point:
    """Exact value on the extended line.

    At the pole we return the limit from the right; inside a validated
    self-map this branch is never reached.
    """
    A, B, C, D = f.coeffs
    if isinstance(x, float):
        if not math.isinf(x):
            raise TypeError("finite floats are not extended points")
        if C == 0:
            return x if (A * D > 0) else -x
        return Fraction(A, C)
    num = A * x + B
    den = C * x + D
    if den == 0:
        # limit from the right: sign(num) * sign(C)
        s = (1 if num > 0 else -1) * (1 if C > 0 else -1)
        return INF if s > 0 else NEG_INF
    if isinstance(num, Surd) or isinstance(den, Surd):
        out = num / den
        return out
    return Fraction(num) / Fraction(den)


def derivative_at(f: MobiusMap, x) -> Fraction | Surd:
    """(AD - BC)/(Cx + D)^2."""
    den = f.C * x + f.D
    if den == 0:
        raise PoleError(f"{x} is the pole of {f}")
    if isinstance(den, Surd):
        return f.det / (den * den)
    return Fraction(f.det) / (den * den)


@dataclass(frozen=True)
class Word:
    """A word in the generators; letters compose left to right as written,
    so ``"FG"`` denotes F o G."""

    letters: str
    composed: MobiusMap = field(compare=False)

    @classmethod
    def build(cls, letters: str, generators: Mapping[str, MobiusMap]) -> "Word":
        composed = MobiusMap.identity()
        for ch in letters:
            composed = compose(composed, generators[ch])
        return cls(letters, composed)

    def __len__(self):
        return len(self.letters)

    def runs(self) -> list[tuple[str, int]]:
        """Run-length encoding, e.g. "RRTRT" -> [(R,2),(T,1),(R,1),(T,1)]."""
        out: list[tuple[str, int]] = []
        for ch in self.letters:
            if out and out[-1][0] == ch:
                out[-1] = (ch, out[-1][1] + 1)
            else:
                out.append((ch, 1))
        return out
