import random
from fractions import Fraction as Q

import pytest

from hypercyclic.suites import (
    SUITES,
    endpoint_params,
    gap_interval,
    imp2_instance,
    impt_instance,
    rand_q,
    run_suite,
)


def test_rand_q_respects_bounds():
    rng = random.Random(0)
    draws = [rand_q(rng, 0, 1) for _ in range(500)]
    assert min(draws) > 0 and max(draws) <= 1
    closed = [rand_q(rng, 1, 2, lo_open=False, hi_open=True) for _ in range(500)]
    assert min(closed) == 1 and max(closed) < 2
    assert all(q.denominator in (1, 2, 3, 4, 6, 12) for q in closed)


def test_instances_meet_their_preconditions():
    rng = random.Random(3)
    for _ in range(200):
        word, a, b, c = impt_instance(rng)
        assert word[0] == "R" and len(word) <= 10
        assert a > 1 and b > 1 and 0 < c <= 1 and a * b - a - c >= 0
        word, a, b, c = imp2_instance(rng)
        assert word.startswith("R") and word.endswith("T") and min(a, b, c) > 0
        a, b, c = endpoint_params(rng)
        assert b >= 1 >= c and a * b + c > 1 and c > a / (a + c)


def test_gap_interval_picks_the_widest_hole():
    A = gap_interval([Q(0), Q(1, 10), Q(1, 5), Q(4, 5), Q(1)], Q(0), Q(1, 2))
    assert (A.lo, A.hi, A.lo_closed, A.hi_closed) == (Q(1, 5), Q(1, 2), False, False)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_are_deterministic(name):
    one = run_suite(name, 11, 5).to_json()
    two = run_suite(name, 11, 5).to_json()
    assert one == two and one["suite"] == name and one["cases"] == 5


def test_seed_changes_the_draws():
    assert run_suite("impt", 1, 5).to_json() == run_suite("impt", 1, 5).to_json()
    a = [impt_instance(random.Random(1)) for _ in range(3)]
    b = [impt_instance(random.Random(2)) for _ in range(3)]
    assert a != b


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nosuch", 0, 1)


@pytest.mark.parametrize("name", ["impt", "imp2", "pullback", "general"])
def test_green_suites_pass(name):
    rep = run_suite(name, 7, 40)
    assert rep.passed, rep.failures


def test_imp3_failures_are_confined_to_known_cases():
    rep = run_suite("imp3", 7, 10)
    assert set(rep.notes["violations_by_mn"]) <= {"1,1"}
    assert all("m=1, n=1" in f or "RT'(0)" in f for f in rep.failures)
