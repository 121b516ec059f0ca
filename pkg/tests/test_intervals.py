from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals, unit_self_maps
from hypercyclic.intervals import (
    FixedKind,
    IntervalError,
    IntervalSpec,
    MixedIntervals,
    Monotonicity,
    NotSelfMap,
    PoleInsideInterval,
    Side,
    attracting_fixed_point,
    covers,
    covers_union,
    fixed_points,
    image,
    image_of,
    is_length_decreasing,
    is_onto,
    monotonicity,
    validate,
)
from hypercyclic.mobius import INF, MobiusMap, compose, evaluate, power

U = IntervalSpec.unit()
T2 = MobiusMap(1, 0, 1, 2)
R221 = MobiusMap(3, 1, 1, 3)
FLIP = MobiusMap(-1, 1, 0, 1)


def on_unit(f):
    return validate(f, U)


def test_interval_parsing_and_membership():
    J = IntervalSpec.parse("0", "inf", "co")
    assert J.lo_closed and not J.hi_closed
    assert J.contains(Q(0)) and J.contains(Q(10**9)) and not J.contains(Q(-1))
    assert not IntervalSpec.parse("0", "1", "oc").contains(Q(0))
    assert str(IntervalSpec.parse("-inf", "2", "cc")) == "(-inf, 2]"
    with pytest.raises(IntervalError):
        IntervalSpec.parse("-inf", "inf")
    with pytest.raises(IntervalError):
        IntervalSpec.parse("1", "1")
    with pytest.raises(IntervalError):
        IntervalSpec.parse("0", "1", "ox")


def test_validate_examples():
    assert on_unit(T2).map == T2
    with pytest.raises(PoleInsideInterval):
        on_unit(MobiusMap(0, 1, 1, 0))
    with pytest.raises(NotSelfMap):
        on_unit(MobiusMap(1, 1, 0, 1))
    # the pole may sit at an excluded endpoint
    assert validate(MobiusMap(0, 1, 1, 0), IntervalSpec.parse("0", "inf", "oo"))


def test_monotonicity_examples():
    assert monotonicity(on_unit(T2)) is Monotonicity.INCREASING
    assert monotonicity(on_unit(FLIP)) is Monotonicity.DECREASING
    assert monotonicity(on_unit(MobiusMap(0, 1, 1, 1))) is Monotonicity.DECREASING


def test_image_and_onto_examples():
    assert image(on_unit(T2)) == IntervalSpec(Q(0), Q(1, 3))
    assert image(on_unit(R221)) == IntervalSpec(Q(1, 3), Q(1))
    assert image(on_unit(FLIP)) == U
    assert is_onto(on_unit(FLIP))
    assert not is_onto(on_unit(T2))
    assert is_onto(on_unit(MobiusMap(2, 0, 1, 1)))
    assert image_of(T2, IntervalSpec(Q(1, 2), Q(1))) == IntervalSpec(Q(1, 5), Q(1, 3))


def test_image_of_open_half_line_uses_limits():
    J = IntervalSpec.parse("0", "inf", "oo")
    img = image(validate(MobiusMap(0, 1, 1, 0), J))
    assert (img.lo, img.hi) == (0, INF) and not img.lo_closed


def test_fixed_point_examples():
    pts = fixed_points(on_unit(T2))
    assert [(p.location, p.multiplier, p.kind) for p in pts] == [(0, Q(1, 2), FixedKind.ATTRACTING)]
    (p,) = fixed_points(on_unit(MobiusMap(1, 0, 1, 1)))
    assert (p.location, p.multiplier, p.kind, p.attracting_side) == (0, 1, FixedKind.PARABOLIC_ATTRACTING, Side.RIGHT)
    half_line = IntervalSpec.parse("0", "inf", "co")
    inf_pts = [p for p in fixed_points(validate(MobiusMap(1, 1, 0, 1), half_line)) if p.location == INF]
    assert inf_pts and inf_pts[0].attracts


def test_attracting_fixed_point_examples():
    assert attracting_fixed_point(on_unit(T2)) == 0
    assert attracting_fixed_point(on_unit(R221)) == 1
    assert attracting_fixed_point(on_unit(FLIP)) is None


def test_affine_fixed_point_regression():
    # (4x+1)/5 fixes 1, not -1
    f = on_unit(MobiusMap(4, 1, 0, 5))
    assert [p.location for p in fixed_points(f)] == [1]
    assert attracting_fixed_point(f) == 1
    g = on_unit(MobiusMap(1, 1, 0, 3))  # (x+1)/3 fixes 1/2
    assert attracting_fixed_point(g) == Q(1, 2)


def test_length_decreasing_examples():
    assert is_length_decreasing(on_unit(T2))
    assert is_length_decreasing(on_unit(MobiusMap(1, 0, 1, 1)))
    assert not is_length_decreasing(on_unit(MobiusMap.identity()))
    assert not is_length_decreasing(on_unit(FLIP))


def test_covers_examples():
    assert covers([IntervalSpec(Q(0), Q(1, 3)), IntervalSpec(Q(1, 3), Q(1))], U)
    assert not covers([IntervalSpec(Q(0), Q(1, 3)), IntervalSpec(Q(1, 2), Q(1))], U)
    assert covers([U], U)
    assert covers_union([on_unit(T2), on_unit(R221)])
    with pytest.raises(MixedIntervals):
        covers_union([on_unit(T2), validate(T2, IntervalSpec(Q(0), Q(2)))])


@given(unit_self_maps())
def test_image_of_square_is_inside_image(f):
    m = on_unit(f)
    assert image(m).contains_interval(image(on_unit(compose(f, f))))


@given(unit_self_maps(), st.lists(st.tuples(rationals(0, 1), rationals(0, 1)), min_size=1, max_size=100))
def test_monotonicity_agrees_with_samples(f, pairs):
    m = on_unit(f)
    sign = 1 if monotonicity(m) is Monotonicity.INCREASING else -1
    for x, y in pairs:
        if x < y:
            assert (evaluate(f, y) - evaluate(f, x)) * sign > 0


@given(unit_self_maps())
def test_attracting_point_attracts_the_midpoint(f):
    m = on_unit(f)
    if f.is_identity():
        return
    o = attracting_fixed_point(m)
    if o is None:
        return
    assert evaluate(f, o) == o
    x = Q(1, 2)
    dist = []
    for _ in range(64):
        dist.append(abs(x - o))
        x = evaluate(f, x)
        if x == o:
            break
    if monotonicity(m) is Monotonicity.DECREASING:
        # iterates alternate sides; the even iterates follow the increasing map f o f
        dist = dist[::2]
    tail = dist[len(dist) // 2:]
    assert all(b < a for a, b in zip(tail, tail[1:]))


@given(unit_self_maps(onto=True))
def test_decreasing_onto_maps_are_involutions(f):
    m = on_unit(f)
    if monotonicity(m) is Monotonicity.DECREASING:
        assert compose(f, f).is_identity()


@given(unit_self_maps())
def test_length_decreasing_shrinks_the_interval(f):
    m = on_unit(f)
    if is_length_decreasing(m):
        assert image(m).length < 1


@given(st.integers(1, 30))
def test_iterates_of_a_contraction_stay_in_image(n):
    m = on_unit(power(T2, n))
    assert image(m) == IntervalSpec(Q(0), Q(1, 2 ** (n + 1) - 1))
