"""Picard orbits, orbit perimeters and the diagnostics built on them.

Orbit perimeters are maxima over triples of *indices*; two indices may carry
the same point, in which case the triple contributes a degenerate perimeter.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .metric_core import FiniteMetricSpace, SelfMap, render_rational

DEFAULT_TOL = Fraction(1, 10**6)


class CycleDetected(RuntimeError):
    def __init__(self, entry: int, period: int):
        super().__init__(f"orbit enters a cycle of period {period} at step {entry}")
        self.entry = entry
        self.period = period


class MaxStepsExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OrbitTrace:
    start: int
    points: tuple[int, ...]
    stabilized_at: int | None = None
    cycle: tuple[int, int] | None = None


def orbit(space: FiniteMetricSpace, smap: SelfMap, x0: int, max_steps: int | None = None) -> OrbitTrace:
    """Iterate from ``x0`` until a fixed point, a revisit, or ``max_steps``.

    The recorded points end with the repeated point, e.g. ``4, 3, 2, 1, 1``.
    """
    smap.check_space(space)
    if max_steps is None:
        max_steps = space.n + 1
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    pts = [x0]
    seen = {x0: 0}
    for _ in range(max_steps):
        cur = pts[-1]
        nxt = smap(cur)
        pts.append(nxt)
        if nxt == cur:
            return OrbitTrace(x0, tuple(pts), stabilized_at=len(pts) - 2)
        if nxt in seen:
            entry = seen[nxt]
            return OrbitTrace(x0, tuple(pts), cycle=(entry, len(pts) - 1 - entry))
        seen[nxt] = len(pts) - 1
    return OrbitTrace(x0, tuple(pts))


def iterates(smap: SelfMap, x0: int, n: int) -> list[int]:
    """``[x0, T x0, ..., T^n x0]``."""
    pts = [x0]
    for _ in range(n):
        pts.append(smap(pts[-1]))
    return pts


@dataclass(frozen=True)
class OrbitPerimeter:
    n: int
    value: Fraction
    witnesses: tuple[tuple[int, int, int], ...]


def orbit_perimeter(space: FiniteMetricSpace, smap: SelfMap, x0: int, n: int) -> OrbitPerimeter:
    if n < 2:
        raise ValueError("horizon must be >= 2")
    D, den = space.int_dist
    pts = iterates(smap, x0, n)
    best, wits = -1, []
    for i, j, k in combinations(range(n + 1), 3):
        a, b, c = pts[i], pts[j], pts[k]
        p = D[a][b] + D[b][c] + D[c][a]
        if p > best:
            best, wits = p, [(i, j, k)]
        elif p == best:
            wits.append((i, j, k))
    return OrbitPerimeter(n, Fraction(best, den), tuple(wits))


@dataclass(frozen=True)
class Lemma1Result:
    holds: bool
    bound: Fraction
    violations: tuple[tuple[tuple[int, int, int], Fraction], ...]


def check_lemma1(space: FiniteMetricSpace, smap: SelfMap, x0: int, n: int, k: Fraction) -> Lemma1Result:
    """Every triple of iterates with indices in ``1..n`` has perimeter at most ``k * p(O(x0, n))``.

    Index 0 is excluded: the bound comes from applying the contraction to
    preimages, which only exist for indices >= 1.
    """
    if n < 3:
        raise ValueError("horizon must be >= 3")
    k = Fraction(k)
    bound = k * orbit_perimeter(space, smap, x0, n).value
    pts = iterates(smap, x0, n)
    bad = []
    for i, j, l in combinations(range(1, n + 1), 3):
        a, b, c = pts[i], pts[j], pts[l]
        p = space.d(a, b) + space.d(b, c) + space.d(c, a)
        if p > bound:
            bad.append(((i, j, l), p))
    return Lemma1Result(not bad, bound, tuple(bad))


@dataclass(frozen=True)
class Lemma2Result:
    applicable: bool
    holds: bool
    witnesses: tuple[tuple[int, int, int], ...]

    @property
    def status(self) -> str:
        if not self.applicable:
            return "not-applicable"
        return "holds" if self.holds else "fails"


def check_lemma2(space: FiniteMetricSpace, smap: SelfMap, x0: int, n: int) -> Lemma2Result:
    """Some maximising index triple of ``p(O(x0, n))`` contains index 0.

    Not applicable when the first ``n + 1`` iterates hold fewer than three
    distinct points.
    """
    op = orbit_perimeter(space, smap, x0, n)
    if len(set(iterates(smap, x0, n))) < 3:
        return Lemma2Result(False, False, op.witnesses)
    return Lemma2Result(True, any(0 in w for w in op.witnesses), op.witnesses)


def _settled_horizon(space: FiniteMetricSpace, smap: SelfMap, x0: int) -> tuple[OrbitTrace, int]:
    tr = orbit(space, smap, x0)
    if tr.stabilized_at is not None:
        return tr, max(tr.stabilized_at + 2, 2)
    if tr.cycle is not None:
        return tr, max(sum(tr.cycle) + 2, 2)
    raise MaxStepsExceeded(f"orbit of {x0} did not settle")


@dataclass(frozen=True)
class Lemma3Result:
    p_inf: Fraction
    bound: Fraction
    holds: bool


def orbit_diameter_sup(space: FiniteMetricSpace, smap: SelfMap, x0: int) -> Fraction:
    """``p(O(x0, inf))``, exact on a finite space: every orbit point occurs before the horizon."""
    _, horizon = _settled_horizon(space, smap, x0)
    return orbit_perimeter(space, smap, x0, horizon).value


def check_lemma3(space: FiniteMetricSpace, smap: SelfMap, x0: int, k: Fraction) -> Lemma3Result:
    k = Fraction(k)
    if not 0 <= k < 1:
        raise ValueError("k must lie in [0, 1)")
    p_inf = orbit_diameter_sup(space, smap, x0)
    bound = 2 / (1 - k) * space.d(x0, smap(x0))
    return Lemma3Result(p_inf, bound, p_inf <= bound)


@dataclass(frozen=True)
class FixedPointResult:
    limit: int
    steps: int
    unique_claim_applicable: bool
    trace: OrbitTrace


def iterate(space: FiniteMetricSpace, smap: SelfMap, x0: int, max_steps: int | None = None) -> FixedPointResult:
    """Run the Picard iteration to its fixed point.

    A nontrivial cycle raises :class:`CycleDetected`; under a weak
    contraction without 2-cycles it cannot happen, so it is never swallowed.
    """
    tr = orbit(space, smap, x0, max_steps)
    if tr.cycle is not None:
        raise CycleDetected(*tr.cycle)
    if tr.stabilized_at is None:
        raise MaxStepsExceeded(f"no fixed point reached from {x0} within {len(tr.points) - 1} steps")
    s = tr.stabilized_at
    limit = tr.points[s]
    # uniqueness is only claimed when the limit is never hit, impossible on a finite orbit
    applicable = limit not in tr.points[: s + 1]
    return FixedPointResult(limit, s, applicable, tr)


def fixed_points(space: FiniteMetricSpace, smap: SelfMap) -> list[int]:
    smap.check_space(space)
    return smap.fixed_points()


@dataclass(frozen=True)
class CauchyRow:
    n: int
    step: Fraction
    envelope: Fraction
    within: bool


@dataclass(frozen=True)
class CauchyProfile:
    M: Fraction
    k: Fraction
    rows: tuple[CauchyRow, ...]
    sum_bound_violations: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return all(r.within for r in self.rows) and not self.sum_bound_violations


def cauchy_profile(space: FiniteMetricSpace, smap: SelfMap, x0: int, k: Fraction) -> CauchyProfile:
    """Compare ``d(x_n, x_{n+1})`` with ``k**n * M`` until the orbit settles.

    ``M`` is ``p(O(x0, inf))``. Also checks ``d(x_n, x_{n+p}) <=
    k**n * M * (1 + k + ... + k**(p-1))`` for every pair inside the window.
    """
    k = Fraction(k)
    tr, _ = _settled_horizon(space, smap, x0)
    M = orbit_diameter_sup(space, smap, x0)
    last = max(len(tr.points) - 2, 1)
    xs = iterates(smap, x0, last + 1)
    rows = []
    for n in range(1, last + 1):
        step = space.d(xs[n], xs[n + 1])
        env = k**n * M
        rows.append(CauchyRow(n, step, env, step <= env))
    bad = []
    for n in range(1, last + 1):
        geom = Fraction(0)
        for p in range(1, last + 2 - n):
            geom += k ** (p - 1)
            if space.d(xs[n], xs[n + p]) > k**n * M * geom:
                bad.append((n, p))
    return CauchyProfile(M, k, tuple(rows), tuple(bad))


def render_profile(profile: CauchyProfile, approx: bool = False) -> list[str]:
    out = ["n d envelope ok"]
    for r in profile.rows:
        out.append(f"{r.n} {render_rational(r.step, approx)} {render_rational(r.envelope, approx)} "
                   f"{'true' if r.within else 'false'}")
    return out


@dataclass(frozen=True)
class ContinuityVerdict:
    consistent: bool
    witness: object = None
    gap: Fraction | None = None

    @property
    def label(self) -> str:
        return "continuous-consistent" if self.consistent else "discontinuity"


def continuity_probe(map_rule: Callable, metric_rule: Callable, x_star, approach: Sequence,
                     tol: Fraction = DEFAULT_TOL) -> ContinuityVerdict:
    """Finite consistency check for continuity of ``map_rule`` at ``x_star``.

    Looks at every approach point from the first one inside the ``tol``-ball
    on. Passing proves nothing; failing returns the point with the largest
    image gap (earliest on ties).
    """
    tol = Fraction(tol)
    first = next((j for j, x in enumerate(approach) if metric_rule(x, x_star) <= tol), None)
    if first is None:
        raise ValueError("approach sequence never enters the tolerance ball")
    t_star = map_rule(x_star)
    worst, worst_gap = None, None
    for x in approach[first:]:
        gap = metric_rule(map_rule(x), t_star)
        if gap > tol and (worst_gap is None or gap > worst_gap):
            worst, worst_gap = x, gap
    if worst_gap is None:
        return ContinuityVerdict(True)
    return ContinuityVerdict(False, worst, worst_gap)
