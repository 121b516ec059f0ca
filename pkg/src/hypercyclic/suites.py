"""Seeded random verification suites over the lemma checks.

Each suite draws ``cases`` instances from ``random.Random(seed)`` and
returns a SuiteReport; the same seed always gives the same report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .intervals import IntervalSpec, validate
from .lemmas import (
    BoundViolated,
    NotDisjoint,
    check_general_hypotheses,
    endpoint_derivatives,
    pull_back_gap,
    verify_imp2,
    verify_imp3,
    verify_impt,
    _exact,
)
from .normalize import increasing_family, mixed_family

UNIT = IntervalSpec.unit()
DEN = 12
MAX_LISTED = 20


def rand_q(rng: random.Random, lo, hi, den: int = DEN, lo_open: bool = True, hi_open: bool = False) -> Fraction:
    """Uniform draw from the grid (1/den)Z restricted to the interval."""
    first = int(Fraction(lo) * den) + (1 if lo_open else 0)
    if not lo_open and Fraction(first, den) < Fraction(lo):
        first += 1
    last = int(Fraction(hi) * den) - (1 if hi_open else 0)
    return Fraction(rng.randint(first, last), den)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: int
    checked: int = 0
    failed: int = 0
    flagged: int = 0
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def fail(self, detail: str):
        self.failed += 1
        if len(self.failures) < MAX_LISTED:
            self.failures.append(detail)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "checked": self.checked,
            "failed": self.failed,
            "flagged": self.flagged,
            "passed": self.passed,
            "failures": list(self.failures),
            "notes": dict(sorted(self.notes.items())),
        }


# -- instance generators -----------------------------------------------------


def impt_instance(rng: random.Random):
    while True:
        a = rand_q(rng, 1, 5)
        b = rand_q(rng, 1, 5)
        c = rand_q(rng, 0, 1)
        if a * b - a - c >= 0:
            break
    length = rng.randint(1, 10)
    word = "R" + "".join(rng.choice("RT") for _ in range(length - 1))
    return word, a, b, c


def imp2_instance(rng: random.Random):
    a, b, c = (rand_q(rng, 0, 4) for _ in range(3))
    k = rng.randint(1, 4)
    word = "".join("R" * rng.randint(1, 3) + "T" * rng.choice((1, 3, 5)) for _ in range(k))
    return word, a, b, c


def imp3_params(rng: random.Random):
    return tuple(rand_q(rng, 0, 4) for _ in range(3))


def endpoint_params(rng: random.Random):
    """b >= 1 >= c, ab + c > 1 and c > a/(a+c): the range where the six
    endpoint bounds are used."""
    while True:
        a = rand_q(rng, 0, 4)
        b = rand_q(rng, 1, 4, lo_open=False)
        c = rand_q(rng, 0, 1)
        if a * b + c > 1 and c > a / (a + c):
            return a, b, c


# -- suites ------------------------------------------------------------------


def run_impt(seed: int, cases: int) -> SuiteReport:
    rng = random.Random(seed)
    rep = SuiteReport("impt", seed, cases)
    for _ in range(cases):
        word, a, b, c = impt_instance(rng)
        form = verify_impt(word, a, b, c, strict=False)
        rep.checked += 1
        if not form.passed:
            rep.fail(f"{word} at {(str(a), str(b), str(c))}: {form.checks}, identity={form.identity}")
    return rep


def run_imp2(seed: int, cases: int) -> SuiteReport:
    rng = random.Random(seed)
    rep = SuiteReport("imp2", seed, cases)
    flags: dict = {}
    for _ in range(cases):
        word, a, b, c = imp2_instance(rng)
        form = verify_imp2(word, a, b, c, strict=False)
        rep.checked += 1
        if form.flags:
            rep.flagged += 1
            for fl in form.flags:
                key = fl.split(" of ")[0] if " of " in fl else fl
                flags[key] = flags.get(key, 0) + 1
        if not form.passed:
            rep.fail(f"{word} at {(str(a), str(b), str(c))}: {form.checks}, identity={form.identity}")
    rep.notes["flags"] = dict(sorted(flags.items()))
    return rep


def run_imp3(seed: int, cases: int, grid: int = 6, endpoint_cases: int | None = None) -> SuiteReport:
    """``cases`` random (a,b,c), each over the full (m,n) grid, plus the
    endpoint derivative chain for ``endpoint_cases`` (default ``cases``)
    admissible draws."""
    rng = random.Random(seed)
    rep = SuiteReport("imp3", seed, cases)
    bad_pairs: dict = {}
    for _ in range(cases):
        a, b, c = imp3_params(rng)
        for m in range(1, grid + 1):
            for n in range(1, grid + 1):
                rep.checked += 1
                try:
                    r = verify_imp3(m, n, a, b, c)
                except BoundViolated as exc:
                    rep.fail(str(exc))
                    key = f"{m},{n}"
                    bad_pairs[key] = bad_pairs.get(key, 0) + 1
                    continue
                if r.flags:
                    rep.flagged += 1
    rep.notes["violations_by_mn"] = dict(sorted(bad_pairs.items()))
    chain_fail = 0
    for _ in range(cases if endpoint_cases is None else endpoint_cases):
        a, b, c = endpoint_params(rng)
        for row in endpoint_derivatives(a, b, c):
            rep.checked += 1
            if not (row["matches"] and row["chain_holds"]):
                chain_fail += 1
                rep.fail(f"endpoint {row['word']}'({row['at']}) at {(str(a), str(b), str(c))}")
    rep.notes["endpoint_failures"] = chain_fail
    return rep


def gap_interval(points, lo, hi):
    """Largest gap of sorted exact points inside [lo, hi], as an open interval."""
    inside = [p for p in points if lo < p < hi]
    cuts = [lo] + inside + [hi]
    left, right = max(zip(cuts, cuts[1:]), key=lambda ab: ab[1] - ab[0])
    return IntervalSpec(left, right, False, False)


def pullback_instance(rng: random.Random):
    """Mixed-family parameters with b >= 1 (so R^n -> 0); c on either side
    of 1 so both the gapped and the dense regime appear."""
    a = rand_q(rng, 0, 4)
    b = rand_q(rng, 1, 4, lo_open=False)
    c = rand_q(rng, 0, 3)
    return a, b, c


def run_pullback(seed: int, cases: int, budget: int = 2_000, depth: int = 8) -> SuiteReport:
    """Round trip of the greedy decomposition, and parity of the extracted
    T-exponents on runs whose sampled gap survives every pull-back."""
    from .orbit import OrbitConfig, enumerate_orbit

    rng = random.Random(seed)
    rep = SuiteReport("pullback", seed, cases)
    counts = {"refuted": 0, "certified": 0, "vacuous": 0, "regime_3_3": 0, "even_uncertified": 0}
    for _ in range(cases):
        a, b, c = pullback_instance(rng)
        R, T = (validate(m, UNIT) for m in mixed_family(a, b, c))
        orbit = enumerate_orbit(R, T, 0, config=OrbitConfig(budget=budget))
        pts = sorted(_exact(p) for p in orbit.points)
        A = gap_interval(pts, Fraction(0), a / (a + c))
        rep.checked += 1
        res = pull_back_gap(A, R, T, pts, depth=rng.randint(1, depth))
        if not res.round_trip(A):
            rep.fail(f"round trip fails for {A} at {(str(a), str(b), str(c))}")
            continue
        if not res.regime.get("c>=a/(c+a)"):
            continue
        counts["regime_3_3"] += 1
        # uncertified runs may start from a gap the finite sample only fakes
        if any(be > 0 and be % 2 == 0 for be in res.betas):
            counts["even_uncertified"] += 1
        try:
            cert = pull_back_gap(A, R, T, pts, depth=depth, certify=True)
        except NotDisjoint:
            counts["refuted"] += 1
            continue
        counts["certified"] += 1
        betas = [be for be in cert.betas if be > 0]
        if not betas:
            counts["vacuous"] += 1
        if any(be % 2 == 0 for be in betas):
            rep.fail(f"even T-exponent in {cert.steps} at {(str(a), str(b), str(c))}")
    rep.notes.update(counts)
    return rep


def general_instance(rng: random.Random):
    """Half the draws land where both maps contract by at least 3/4
    (sup R' = max(a^2 b/(a+c)^2, 1/b) and sup T' = 1/a), so a desk-sized
    budget can see the orbit fill in; the rest are anywhere in the box."""
    if rng.random() < 0.5:
        while True:
            a, c = rand_q(rng, Fraction(4, 3), 3), rand_q(rng, 0, 1)
            top = Fraction(3, 4) * ((a + c) / a) ** 2
            if top > Fraction(4, 3) + Fraction(1, 24):
                return a, rand_q(rng, Fraction(4, 3), top, den=48, lo_open=False), c
    return rand_q(rng, 1, 5), rand_q(rng, 1, 5), rand_q(rng, 0, 2)


def run_general(seed: int, cases: int, budget: int = 5_000, epsilon: float = 0.05) -> SuiteReport:
    """Both-increasing pairs: the hypothesis report must agree with the
    closed-form derivative and cover conditions.  A passing report must come
    with a gap that shrinks from budget/16 to budget, and, when both maps
    contract by at least 3/4, with a final gap below epsilon."""
    from .orbit import OrbitConfig, enumerate_orbit

    rng = random.Random(seed)
    rep = SuiteReport("general", seed, cases)
    passes = strong = 0
    for _ in range(cases):
        a, b, c = general_instance(rng)
        R, T = (validate(m, UNIT) for m in increasing_family(a, b, c))
        report = check_general_hypotheses([R, T])
        # sup R' = max(a^2 b/(a+c)^2, 1/b), sup T' = 1/a; images [c/(a+c),1] and [0,1/(1+a)]
        contraction = max(a * a * b / (a + c) ** 2, 1 / b, 1 / a)
        expected = contraction < 1 and c <= 1
        rep.checked += 1
        where = (str(a), str(b), str(c))
        if report.passed != expected:
            rep.fail(f"hypothesis report {report.passed} != {expected} at {where}")
            continue
        if not report.passed:
            continue
        passes += 1
        cfg = OrbitConfig(budget=budget, checkpoints=(budget // 16,))
        orbit = enumerate_orbit(R, T, Fraction(1, 2), config=cfg)
        early = next(gp.max_gap for gp in orbit.gap_series if gp.budget == budget // 16)
        if not orbit.max_gap < early:
            rep.fail(f"gap does not shrink ({float(early):.4f} -> {float(orbit.max_gap):.4f}) at {where}")
        elif contraction <= Fraction(3, 4):
            strong += 1
            if not orbit.max_gap < epsilon:
                rep.fail(f"contraction {contraction} but gap {float(orbit.max_gap):.4f} at {where}")
    rep.notes["hypotheses_passed"] = passes
    rep.notes["strongly_contracting"] = strong
    return rep


SUITES = {
    "impt": run_impt,
    "imp2": run_imp2,
    "imp3": run_imp3,
    "pullback": run_pullback,
    "general": run_general,
}


def run_suite(name: str, seed: int, cases: int) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed, cases)
