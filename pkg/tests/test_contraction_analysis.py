from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from oracles import brute_m, brute_sups, matrix_metric, tri
from tricontract.contraction_analysis import (canonical_triple, classify, image_perimeter, is_weak_contraction,
                                              m_value, perimeter, petrov_ratio, render_report, report_json,
                                              weak_ratio)
from tricontract.fixtures_corpus import example1, example3
from tricontract.metric_core import FiniteMetricSpace, SelfMap, random_map, random_space

EQ = FiniteMetricSpace(("a", "b", "c"), ((0, 1, 1), (1, 0, 1), (1, 1, 0)))


def idx(space, *labels):
    return tuple(space.index_of(str(x)) for x in labels)


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex3():
    return example3()


def test_canonical_triple():
    assert canonical_triple(3, 1, 2) == (1, 2, 3)
    with pytest.raises(ValueError):
        canonical_triple(1, 1, 2)


def test_perimeter(ex1):
    space, _ = ex1
    assert perimeter(EQ, (0, 1, 2)) == 3
    assert perimeter(space, idx(space, 2, 3, 4)) == 4
    assert perimeter(space, idx(space, 1, 2, 3)) == 4
    with pytest.raises(ValueError):
        perimeter(space, (0, 0, 1))


def test_image_perimeter(ex1):
    space, smap = ex1
    assert image_perimeter(space, smap, idx(space, 2, 3, 4)) == 4
    assert image_perimeter(space, smap, idx(space, 1, 2, 3)) == 2
    assert image_perimeter(space, SelfMap((1, 1, 1, 1)), (0, 1, 2)) == 0


def test_m_value(ex1, ex3):
    space, smap = ex1
    m = m_value(space, smap, idx(space, 2, 3, 4))
    assert m.value == 6
    assert m.support == idx(space, 1, 2, 3, 4)
    m = m_value(EQ, SelfMap((0, 1, 2)), (0, 1, 2))
    assert (m.value, m.support, m.witness) == (3, (0, 1, 2), (0, 1, 2))
    space, smap = ex3
    m = m_value(space, smap, idx(space, 0, 3, 4))
    assert m.support == idx(space, 0, 2, 3, 4)
    assert m.value == 8
    # (0, 3, 4) attains 8 too, but (0, 2, 4) is the lexicographically first maximiser
    assert perimeter(space, idx(space, 0, 3, 4)) == 8
    assert m.witness == idx(space, 0, 2, 4)


def test_ratios(ex1, ex3):
    space, smap = ex1
    t = idx(space, 2, 3, 4)
    assert weak_ratio(space, smap, t) == F(2, 3)
    assert petrov_ratio(space, smap, t) == 1
    assert weak_ratio(EQ, SelfMap((0, 1, 2)), (0, 1, 2)) == 1
    assert petrov_ratio(EQ, SelfMap((2, 2, 2)), (0, 1, 2)) == 0
    space, smap = ex3
    assert weak_ratio(space, smap, idx(space, 0, 3, 4)) == F(3, 4)
    assert petrov_ratio(space, smap, idx(space, 1, 2, 3)) == F(1, 2)


def test_classify_example1(ex1):
    space, smap = ex1
    r = classify(space, smap)
    assert r.petrov_sup == 1 and r.petrov_witness == idx(space, 2, 3, 4)
    assert r.weak_sup == F(2, 3)
    assert not r.is_petrov and r.is_weak
    assert r.fixed_points == idx(space, 1)
    assert not r.has_period2_violation


def test_classify_example3(ex3):
    space, smap = ex3
    r = classify(space, smap)
    assert r.weak_sup == F(3, 4) and r.is_weak
    assert r.fixed_points == idx(space, 0, 1)
    assert not r.has_period2_violation and r.period2_witness is None


def test_classify_identity():
    space = random_space(5, 4, 3)
    r = classify(space, SelfMap.identity(5))
    assert r.petrov_sup == r.weak_sup == 1
    assert not r.is_weak
    assert r.fixed_points == tuple(range(5))


def test_period2_witness():
    r = classify(EQ, SelfMap((1, 0, 2)))
    assert r.has_period2_violation and r.period2_witness == 0


def test_render_report(ex1):
    space, smap = ex1
    lines = render_report(classify(space, smap), space)
    assert lines == [
        "n=4", "petrov_sup=1", "petrov_witness=2,3,4", "weak_sup=2/3", "weak_witness=1,2,4",
        "is_petrov=false", "is_weak=true", "has_period2_violation=false", "period2_witness=",
        "fixed_points=1",
    ]
    assert report_json(classify(space, smap), space)["weak_sup"] == {"num": 2, "den": 3}
    assert render_report(classify(space, smap), space, approx=True)[3] == "weak_sup=0.666667~"


spaces_and_maps = st.builds(
    lambda n, q, s1, s2: (random_space(n, q, s1), s2),
    st.integers(3, 7), st.integers(1, 10), st.integers(0, 2**32), st.integers(0, 2**32),
).map(lambda t: (t[0], random_map(t[0], t[1])))


@given(spaces_and_maps)
def test_m_value_dominates_both_perimeters(sm):
    space, smap = sm
    for t in combinations(range(space.n), 3):
        m = m_value(space, smap, t).value
        assert m >= perimeter(space, t)
        assert m >= image_perimeter(space, smap, t)
        assert weak_ratio(space, smap, t) <= min(1, petrov_ratio(space, smap, t))


@given(spaces_and_maps, st.randoms(use_true_random=False))
def test_relabeling_invariance(sm, rnd):
    space, smap = sm
    perm = list(range(space.n))
    rnd.shuffle(perm)
    a = classify(space, smap)
    b = classify(space.permuted(perm), smap.conjugated(perm))
    assert (a.petrov_sup, a.weak_sup) == (b.petrov_sup, b.weak_sup)
    # witnesses map to maximising triples of the relabelled instance
    moved = tuple(sorted(perm[i] for i in a.weak_witness))
    assert weak_ratio(space.permuted(perm), smap.conjugated(perm), moved) == b.weak_sup
    assert sorted(perm[i] for i in a.fixed_points) == list(b.fixed_points)


@given(spaces_and_maps, st.fractions(min_value=F(1, 1000), max_value=1000))
def test_scaling_invariance(sm, c):
    space, smap = sm
    a, b = classify(space, smap), classify(space.scaled(c), smap)
    assert a == b


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_three_points_single_triple(s1, s2):
    space = random_space(3, 6, s1)
    smap = random_map(space, s2)
    assert classify(space, smap).weak_sup == weak_ratio(space, smap, (0, 1, 2))


@given(spaces_and_maps)
def test_quick_weak_check_agrees(sm):
    space, smap = sm
    assert is_weak_contraction(space, smap) == classify(space, smap).is_weak


@given(spaces_and_maps)
def test_workers_do_not_change_report(sm):
    space, smap = sm
    assert classify(space, smap, 1) == classify(space, smap, 3) == classify(space, smap, 16)


def test_oracle_matches_on_small_cases():
    for seed in range(40):
        space = random_space(4, 5, seed)
        smap = random_map(space, seed + 99)
        r = classify(space, smap)
        assert (r.petrov_sup, r.weak_sup) == brute_sups(matrix_metric(space.dist), 4, smap.image)


def test_oracle_helpers_agree_with_m_value(ex3):
    space, smap = ex3
    d = matrix_metric(space.dist)
    for t in combinations(range(5), 3):
        pts = t + tuple(smap(i) for i in t)
        assert m_value(space, smap, t).value == brute_m(d, pts)
        assert perimeter(space, t) == tri(d, *t)
