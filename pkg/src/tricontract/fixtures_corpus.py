"""Worked examples as exact finite instances, plus random weak instances.

``example1`` and ``example3`` are the integer chains ``{1..4}`` and ``{0..4}``
with ``d(x, y) = |x - y|`` and the shift map ``n -> n - 1`` (with fixed
points at the bottom). The interval map on ``[0, 1]`` is only ever handled
through finite samples closed under the map.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .contraction_analysis import ContractionReport, classify, is_weak_contraction, period2_violations
from .metric_core import FiniteMetricSpace, SelfMap, random_map, random_space

F = Fraction

SPECIAL_SET = (F(1), F(1, 2), F(1, 3))
EXAMPLE2_MANDATORY = (F(0), F(1, 4), F(1, 3), F(1, 2), F(8, 10), F(9, 10), F(1))


def _shift_chain(values: list[int], fixed: set[int]):
    space = FiniteMetricSpace.from_values(values)
    index = {v: i for i, v in enumerate(values)}
    smap = SelfMap(tuple(index[v] if v in fixed else index[v - 1] for v in values))
    return space, smap


def example1() -> tuple[FiniteMetricSpace, SelfMap]:
    """``X = {1, 2, 3, 4}``, ``T1 = 1`` and ``Tn = n - 1`` otherwise."""
    return _shift_chain([1, 2, 3, 4], {1})


def example3() -> tuple[FiniteMetricSpace, SelfMap]:
    """``X = {0, ..., 4}``, ``T0 = 0``, ``T1 = 1`` and ``Tn = n - 1`` otherwise."""
    return _shift_chain([0, 1, 2, 3, 4], {0, 1})


def example2_map(x: Fraction) -> Fraction:
    """``T(1/n) = 1/(n+1)`` for ``n = 1, 2, 3`` and ``Tx = 0`` elsewhere on [0, 1]."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    if x in SPECIAL_SET:
        return Fraction(1, x.denominator + 1)
    return Fraction(0)


def example2_metric(x: Fraction, y: Fraction) -> Fraction:
    return abs(Fraction(x) - Fraction(y))


def example2_instance(extra: Iterable[Fraction] = ()) -> tuple[FiniteMetricSpace, SelfMap]:
    """Finite sample of the interval map: mandatory points, ``extra``, and their images."""
    pts = set(EXAMPLE2_MANDATORY)
    for x in extra:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"{x} is outside [0, 1]")
        pts.add(x)
    pts |= {example2_map(x) for x in pts}
    values = sorted(pts)
    index = {v: i for i, v in enumerate(values)}
    return FiniteMetricSpace.from_values(values), SelfMap(tuple(index[example2_map(v)] for v in values))


def random_weak_instance(n: int, denom_bound: int, seed: int, max_tries: int = 10_000
                         ) -> tuple[FiniteMetricSpace, SelfMap, ContractionReport] | None:
    """Rejection-sample a weak contraction without 2-cycles.

    Returns ``None`` after ``max_tries`` rejected draws. Draw ``i`` uses
    seeds derived from ``seed`` only, so results are reproducible.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    rng = random.Random(seed)
    for _ in range(max_tries):
        space = random_space(n, denom_bound, rng.getrandbits(64))
        smap = random_map(space, rng.getrandbits(64))
        # cheap filters first: 2-cycles and three fixed points both force rejection
        if period2_violations(smap) or len(smap.fixed_points()) > 2:
            continue
        if not is_weak_contraction(space, smap):
            continue
        report = classify(space, smap)
        assert report.is_weak and not report.has_period2_violation
        return space, smap, report
    return None
