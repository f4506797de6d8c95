from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from tricontract.metric_core import (FiniteMetricSpace, MetricError, SelfMap, TooFewPoints, parse_rational,
                                     random_map, random_space, render_rational, validate_metric)

rationals = st.fractions(max_denominator=10**6)


def equilateral():
    return FiniteMetricSpace(("a", "b", "c"), ((0, 1, 1), (1, 0, 1), (1, 1, 0)))


@given(rationals)
def test_rational_round_trip(r):
    assert parse_rational(render_rational(r)) == r


@pytest.mark.parametrize("text,value", [("2/3", F(2, 3)), ("-4/6", F(-2, 3)), ("7", F(7)), (" 10/5 ", F(2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["0.5", "1e3", "1/0", "a", "1/2/3", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_rationals_are_lowest_terms():
    r = parse_rational("6/4")
    assert (r.numerator, r.denominator) == (3, 2)
    assert parse_rational("-3/1").denominator == 1


def test_equilateral_is_metric():
    assert validate_metric(equilateral()).ok


def test_example1_line_is_metric():
    assert validate_metric(FiniteMetricSpace.from_values([1, 2, 3, 4])).ok


def test_forced_triangle_violation():
    space = FiniteMetricSpace(("a", "b", "c"), ((0, 1, 5), (1, 0, 1), (5, 1, 0)))
    rep = validate_metric(space)
    assert not rep.ok
    (v,) = rep.violations
    assert v.axiom == "triangle"
    assert v.witness == (0, 1, 2)
    assert (v.lhs, v.rhs) == (5, 2)


def test_each_axiom_reported_once():
    space = FiniteMetricSpace(("a", "b", "c", "d"),
                              ((1, 1, 1, 9), (1, 0, 1, 1), (2, 1, 0, 0), (9, 1, 1, 0)))
    axioms = [v.axiom for v in validate_metric(space).violations]
    assert axioms == ["zero-diagonal", "positivity", "symmetry", "triangle"]
    rep = validate_metric(space)
    assert rep.violations[0].witness == (0, 0)
    assert rep.violations[1].witness == (2, 3)
    assert rep.violations[2].witness == (0, 2)


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        FiniteMetricSpace(("a", "b"), ((0, 1), (1, 0)))


def test_shape_and_labels_checked():
    with pytest.raises(MetricError):
        FiniteMetricSpace(("a", "a", "b"), ((0, 1, 1), (1, 0, 1), (1, 1, 0)))
    with pytest.raises(MetricError):
        FiniteMetricSpace(("a", "b", "c"), ((0, 1), (1, 0), (1, 1)))
    with pytest.raises(MetricError):
        SelfMap((0, 3, 1))


@given(st.integers(3, 9), st.integers(1, 12), st.integers(0, 2**64 - 1))
def test_random_space_is_metric(n, q, seed):
    space = random_space(n, q, seed)
    assert validate_metric(space).ok
    off = [space.d(i, j) for i in range(n) for j in range(n) if i != j]
    assert all(1 <= v <= 2 and v.denominator <= q for v in off)


def test_random_space_denominator_one():
    for seed in range(20):
        space = random_space(3, 1, seed)
        assert {space.d(i, j) for i in range(3) for j in range(3) if i != j} <= {1, 2}


def test_random_space_deterministic():
    assert random_space(5, 10, 42) == random_space(5, 10, 42)
    assert random_space(5, 10, 42) != random_space(5, 10, 43)


def test_random_map_deterministic_and_total():
    space = random_space(6, 5, 1)
    assert random_map(space, 9) == random_map(space, 9)
    assert all(0 <= i < 6 for i in random_map(space, 9).image)


def test_random_map_covers_all_27_maps_on_three_points():
    from itertools import product
    space = equilateral()
    support = set(product(range(3), repeat=3))
    seen = {random_map(space, seed).image for seed in range(2000)}
    assert seen == support


@given(st.integers(3, 7), st.integers(0, 2**32), st.randoms(use_true_random=False))
def test_relabel_then_inverse_is_identity(n, seed, rnd):
    space = random_space(n, 7, seed)
    perm = list(range(n))
    rnd.shuffle(perm)
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    moved = space.permuted(perm)
    assert moved.permuted(inv) == space
    assert all(moved.d(perm[i], perm[j]) == space.d(i, j) for i in range(n) for j in range(n))


def test_validation_independent_of_workers():
    space = FiniteMetricSpace(tuple("abcdefg"), tuple(
        tuple(0 if i == j else (9 if {i, j} == {2, 5} else 1) for j in range(7)) for i in range(7)))
    reps = {validate_metric(space, w) for w in (1, 2, 3, 7)}
    assert len(reps) == 1
    assert next(iter(reps)).violations[0].witness == (2, 0, 5)
