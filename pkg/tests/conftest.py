from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hypercyclic.catalog import load_catalog
from hypercyclic.mobius import MobiusMap

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-6, hi=6, max_den=12):
    """Grid rationals k/den in [lo, hi]; small draws keep shrinking cheap."""
    lo, hi = Fraction(lo), Fraction(hi)

    def grid(den):
        first = -((-lo.numerator * den) // lo.denominator)
        last = (hi.numerator * den) // hi.denominator
        return st.integers(first, last).map(lambda k: Fraction(k, den))

    return st.integers(1, max_den).flatmap(grid)


def positive(lo=Fraction(1, 12), hi=4, max_den=12):
    return rationals(lo, hi, max_den).filter(lambda x: x > 0)


@st.composite
def mobius_maps(draw, lo=-6, hi=6):
    A, B, C, D = (draw(rationals(lo, hi)) for _ in range(4))
    # repair singular draws deterministically so the all-zero draw stays valid
    for dA, dD in ((0, 0), (1, 1), (1, 2)):
        if (A + dA) * (D + dD) - B * C != 0:
            return MobiusMap(A + dA, B, C, D + dD)
    return MobiusMap(1, B, 0, 1)


@st.composite
def unit_self_maps(draw, onto=None):
    """Random Mobius self-maps of [0,1] with no pole on [0,1]:
    an affine squeeze into [p,q] after an onto map (increasing or decreasing)."""
    from hypercyclic.mobius import compose
    from hypercyclic.normalize import affine_chart, involution, onto_increasing

    a = draw(positive(Fraction(1, 4), 4, 8))
    base = onto_increasing(a)
    if draw(st.booleans()):
        base = compose(involution(draw(rationals(Fraction(-1, 2), 6, 6))), base)
    if onto is True:
        return base
    p = draw(rationals(0, 1, 8))
    q = draw(rationals(0, 1, 8))
    if onto is False and {p, q} == {0, 1}:
        q = Fraction(1, 2)
    if p == q:
        q = 1 - p if p != Fraction(1, 2) else 1
    return compose(affine_chart(p, q), base)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@st.composite
def family_pairs(draw):
    """Canonical-family pairs with parameters on either side of each condition."""
    from hypercyclic.normalize import decreasing_family, increasing_family, mixed_family

    fn = draw(st.sampled_from([increasing_family, mixed_family, decreasing_family]))
    a = draw(positive(Fraction(1, 2), 4, 4))
    b = draw(positive(Fraction(1, 2), 4, 4))
    c = draw(positive(Fraction(1, 4), 2, 4))
    R, T = fn(a, b, c)
    return (T, R) if draw(st.booleans()) else (R, T)


def unit_pairs():
    """(f, g) self-maps of [0,1], random or drawn from the canonical families."""
    return st.one_of(st.tuples(unit_self_maps(), unit_self_maps()), family_pairs())


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
