"""Triangle perimeters and the two perimeter-contraction tests.

A *Petrov* contraction compares the image perimeter of a triple with its own
perimeter. The *weak* test compares it with ``M``, the largest perimeter of a
pairwise-distinct triple drawn from ``{x, y, z, Tx, Ty, Tz}``. On a finite
space both suprema are attained, so a map is classified as a contraction of
either kind exactly when the maximum ratio is strictly below 1.

Internally perimeters are summed over the integer-scaled distance matrix;
the common denominator cancels in every ratio.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .metric_core import FiniteMetricSpace, SelfMap
from .reporting import Items, items_json, render_items

Triple = tuple[int, int, int]


def canonical_triple(a: int, b: int, c: int) -> Triple:
    if a == b or b == c or a == c:
        raise ValueError(f"triple must be pairwise distinct, got ({a}, {b}, {c})")
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def _m_int(D, pts) -> tuple[int, Triple, tuple[int, ...]]:
    support = tuple(sorted(set(pts)))
    best, wit = -1, None
    for t in combinations(support, 3):
        p = D[t[0]][t[1]] + D[t[1]][t[2]] + D[t[2]][t[0]]
        if p > best:
            best, wit = p, t
    return best, wit, support


def perimeter(space: FiniteMetricSpace, t: Sequence[int]) -> Fraction:
    a, b, c = canonical_triple(*t)
    return space.d(a, b) + space.d(b, c) + space.d(c, a)


def image_perimeter(space: FiniteMetricSpace, smap: SelfMap, t: Sequence[int]) -> Fraction:
    """Perimeter of ``(Ta, Tb, Tc)``; coincident images give a degenerate value."""
    a, b, c = canonical_triple(*t)
    ta, tb, tc = smap(a), smap(b), smap(c)
    return space.d(ta, tb) + space.d(tb, tc) + space.d(tc, ta)


@dataclass(frozen=True)
class MValueResult:
    value: Fraction
    witness: Triple
    support: tuple[int, ...]


def m_value(space: FiniteMetricSpace, smap: SelfMap, t: Sequence[int]) -> MValueResult:
    a, b, c = canonical_triple(*t)
    D, den = space.int_dist
    value, wit, support = _m_int(D, (a, b, c, smap(a), smap(b), smap(c)))
    return MValueResult(Fraction(value, den), wit, support)


def weak_ratio(space: FiniteMetricSpace, smap: SelfMap, t: Sequence[int]) -> Fraction:
    return image_perimeter(space, smap, t) / m_value(space, smap, t).value


def petrov_ratio(space: FiniteMetricSpace, smap: SelfMap, t: Sequence[int]) -> Fraction:
    return image_perimeter(space, smap, t) / perimeter(space, t)


# A scan result is (num, den, witness); larger num/den wins, ties go to the smaller witness.
_Best = tuple[int, int, Triple]


def _better(x: _Best | None, y: _Best | None) -> _Best | None:
    if x is None:
        return y
    if y is None:
        return x
    lhs, rhs = x[0] * y[1], y[0] * x[1]
    if lhs != rhs:
        return x if lhs > rhs else y
    return x if x[2] <= y[2] else y


def _scan(D, image: Sequence[int], triples: Sequence[Triple]) -> tuple[_Best | None, _Best | None]:
    best_p: _Best | None = None
    best_w: _Best | None = None
    for t in triples:
        a, b, c = t
        ta, tb, tc = image[a], image[b], image[c]
        img = D[ta][tb] + D[tb][tc] + D[tc][ta]
        dom = D[a][b] + D[b][c] + D[c][a]
        if best_p is None or img * best_p[1] > best_p[0] * dom:
            best_p = (img, dom, t)
        m, _, _ = _m_int(D, (a, b, c, ta, tb, tc))
        if best_w is None or img * best_w[1] > best_w[0] * m:
            best_w = (img, m, t)
    return best_p, best_w


@dataclass(frozen=True)
class SupRatios:
    petrov_sup: Fraction
    petrov_witness: Triple
    weak_sup: Fraction
    weak_witness: Triple


def sup_ratios(space: FiniteMetricSpace, image: Sequence[int | None],
               domain: Sequence[int] | None = None, workers: int = 1) -> SupRatios:
    """Exact maxima of both ratios over all triples of ``domain``.

    ``image`` may leave points outside ``domain`` unmapped (``None``); only
    the images of domain points are read. Witnesses are the lexicographically
    smallest maximisers regardless of ``workers``.
    """
    dom = sorted(range(space.n) if domain is None else set(domain))
    if len(dom) < 3:
        raise ValueError("need at least three domain points")
    D, _ = space.int_dist
    triples = list(combinations(dom, 3))
    workers = max(1, min(workers, len(triples)))
    if workers == 1:
        parts = [_scan(D, image, triples)]
    else:
        step = -(-len(triples) // workers)
        chunks = [triples[i:i + step] for i in range(0, len(triples), step)]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda ch: _scan(D, image, ch), chunks))
    best_p = best_w = None
    for p, w in parts:
        best_p = _better(best_p, p)
        best_w = _better(best_w, w)
    return SupRatios(Fraction(best_p[0], best_p[1]), best_p[2],
                     Fraction(best_w[0], best_w[1]), best_w[2])


def period2_violations(smap: SelfMap) -> list[int]:
    """Points with ``Tx != x`` and ``T(Tx) == x``."""
    return [x for x, t in enumerate(smap.image) if t != x and smap(t) == x]


@dataclass(frozen=True)
class ContractionReport:
    n: int
    petrov_sup: Fraction
    petrov_witness: Triple
    weak_sup: Fraction
    weak_witness: Triple
    has_period2_violation: bool
    period2_witness: int | None
    fixed_points: tuple[int, ...]

    @property
    def is_petrov(self) -> bool:
        return self.petrov_sup < 1

    @property
    def is_weak(self) -> bool:
        return self.weak_sup < 1


def classify(space: FiniteMetricSpace, smap: SelfMap, workers: int = 1) -> ContractionReport:
    smap.check_space(space)
    sup = sup_ratios(space, smap.image, workers=workers)
    p2 = period2_violations(smap)
    return ContractionReport(
        n=space.n,
        petrov_sup=sup.petrov_sup,
        petrov_witness=sup.petrov_witness,
        weak_sup=sup.weak_sup,
        weak_witness=sup.weak_witness,
        has_period2_violation=bool(p2),
        period2_witness=p2[0] if p2 else None,
        fixed_points=tuple(smap.fixed_points()),
    )


def is_weak_contraction(space: FiniteMetricSpace, smap: SelfMap) -> bool:
    """Early-exit version of ``classify(...).is_weak`` for rejection sampling."""
    D, _ = space.int_dist
    image = smap.image
    for a, b, c in combinations(range(space.n), 3):
        ta, tb, tc = image[a], image[b], image[c]
        img = D[ta][tb] + D[tb][tc] + D[tc][ta]
        if img == 0:
            continue
        if img >= _m_int(D, (a, b, c, ta, tb, tc))[0]:
            return False
    return True


REPORT_KEYS = ("n", "petrov_sup", "petrov_witness", "weak_sup", "weak_witness", "is_petrov",
               "is_weak", "has_period2_violation", "period2_witness", "fixed_points")


def report_items(report: ContractionReport, space: FiniteMetricSpace) -> Items:
    """Report fields in :data:`REPORT_KEYS` order, with points as labels."""
    def labs(idx):
        return [space.labels[i] for i in idx]

    p2 = report.period2_witness
    return [
        ("n", report.n),
        ("petrov_sup", report.petrov_sup),
        ("petrov_witness", labs(report.petrov_witness)),
        ("weak_sup", report.weak_sup),
        ("weak_witness", labs(report.weak_witness)),
        ("is_petrov", report.is_petrov),
        ("is_weak", report.is_weak),
        ("has_period2_violation", report.has_period2_violation),
        ("period2_witness", None if p2 is None else space.labels[p2]),
        ("fixed_points", labs(report.fixed_points)),
    ]


def render_report(report: ContractionReport, space: FiniteMetricSpace, approx: bool = False) -> list[str]:
    """E.g. ``weak_sup=2/3`` and ``weak_witness=1,2,4``; decimals only with ``approx``."""
    return render_items(report_items(report, space), approx)


def report_json(report: ContractionReport, space: FiniteMetricSpace) -> dict:
    """Rationals become ``{"num": p, "den": q}``."""
    return items_json(report_items(report, space))
