"""A fixed-point-free weak contraction on an incomplete space.

The space is a finite represented piece of ``Q ∩ [0, 2]``; the Cauchy
sequence with no rational limit is the decimal truncations of sqrt(2). Every
point is sent into the tail of that sequence, far enough out that all images
sit much closer together than the point sits to the sequence. Distances to
tail elements that are not represented are bounded by the truncation error.

The last few sequence points never find a partner index inside ``depth``;
they stay in the space as *frontier* points (used for distances and as
images) but are left out of the map's domain.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Iterable, Sequence

from .contraction_analysis import sup_ratios
from .metric_core import FiniteMetricSpace


class DepthExhausted(RuntimeError):
    """An assignment needs a sequence index beyond the represented depth."""


def sqrt2_truncation(n: int) -> Fraction:
    """``floor(sqrt(2) * 10**n) / 10**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    scale = 10**n
    return Fraction(isqrt(2 * scale * scale), scale)


def dist_lower_bound_to_sqrt2(x: Fraction) -> Fraction:
    """Certified lower bound ``|x**2 - 2| / (x + 3/2)`` on ``|x - sqrt(2)|`` for ``x`` in [0, 2]."""
    x = Fraction(x)
    if not 0 <= x <= 2:
        raise ValueError(f"{x} is outside [0, 2]")
    gap = abs(x * x - 2)
    if gap == 0:
        raise ValueError("x**2 == 2 has no rational solution")
    return gap / (x + Fraction(3, 2))


def sqrt2_sequence(depth: int) -> list[Fraction]:
    """Distinct truncations ``x_1, x_2, ...`` up to ``depth`` digits, in order."""
    out: list[Fraction] = []
    for n in range(1, depth + 1):
        t = sqrt2_truncation(n)
        if not out or t != out[-1]:
            out.append(t)
    return out


@dataclass(frozen=True)
class Assignment:
    """One certified choice: ``lhs < rhs`` with ``lhs = 2 * 10**-index``.

    ``kind`` is ``"N_x"`` for points off the sequence (``rhs = k/2 * delta``)
    and ``"n'"`` for sequence points (``rhs = k/2 * |x - x_index|``).
    """

    point: Fraction
    kind: str
    index: int
    lhs: Fraction
    rhs: Fraction
    delta: Fraction


@dataclass(frozen=True)
class EscapeInstance:
    k: Fraction
    depth: int
    A: tuple[Fraction, ...]
    extras: tuple[Fraction, ...]
    space: FiniteMetricSpace
    image: tuple[int | None, ...]
    assignment_log: tuple[Assignment, ...]

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.image) if t is not None)

    @property
    def frontier(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.image) if t is None)

    def position(self, i: int) -> int | None:
        """1-based position along the sequence, or None for points off it."""
        return i + 1 if i < len(self.A) else None

    def fixed_points(self) -> list[int]:
        return [i for i in self.domain if self.image[i] == i]

    def value(self, i: int) -> Fraction:
        return self.A[i] if i < len(self.A) else self.extras[i - len(self.A)]


def random_extras(count: int, seed: int, exclude: Iterable[Fraction] = (), denom_bound: int = 1000) -> list[Fraction]:
    """``count`` distinct seeded rationals in [0, 2] avoiding ``exclude``."""
    rng = random.Random(seed)
    taken = set(exclude)
    out: list[Fraction] = []
    while len(out) < count:
        q = rng.randint(1, denom_bound)
        x = Fraction(rng.randint(0, 2 * q), q)
        if x not in taken:
            taken.add(x)
            out.append(x)
    return out


def build_escape_map(k: Fraction, depth: int, extras: Sequence[Fraction],
                     seed: int | None = None, n_random: int = 0) -> EscapeInstance:
    """Build the escape map over the truncations plus ``extras``.

    With ``n_random > 0``, that many seeded random rationals are appended to
    ``extras``.
    """
    k = Fraction(k)
    if not 0 < k < 1:
        raise ValueError("k must lie in (0, 1)")
    if depth < 5:
        raise ValueError("depth must be >= 5")
    A = sqrt2_sequence(depth)
    in_A = set(A)
    xs: list[Fraction] = []
    for x in map(Fraction, extras):
        if not 0 <= x <= 2:
            raise ValueError(f"extra point {x} is outside [0, 2]")
        if x in in_A:
            raise ValueError(f"extra point {x} lies on the sequence")
        if x not in xs:
            xs.append(x)
    if n_random:
        xs += random_extras(n_random, 0 if seed is None else seed, exclude=in_A | set(xs))

    half_k = k / 2
    L = len(A)
    log: list[Assignment] = []
    image: list[int | None] = [None] * (L + len(xs))

    for p in range(1, L + 1):
        xp = A[p - 1]
        for q in range(p + 1, L + 1):
            lhs = Fraction(2, 10**q)
            rhs = half_k * (A[q - 1] - xp)
            if lhs < rhs:
                image[p - 1] = q - 1
                log.append(Assignment(xp, "n'", q, lhs, rhs, A[q - 1] - xp))
                break

    tail_err = Fraction(1, 10**depth)
    for j, x in enumerate(xs):
        lb = dist_lower_bound_to_sqrt2(x)
        if tail_err > lb / 2:
            raise DepthExhausted(f"depth {depth} too small to separate {x} from unrepresented sequence points")
        delta = min(min(abs(x - a) for a in A), lb / 2)
        for N in range(1, L + 1):
            lhs = Fraction(2, 10**N)
            rhs = half_k * delta
            if lhs < rhs:
                image[L + j] = N - 1
                log.append(Assignment(x, "N_x", N, lhs, rhs, delta))
                break
        else:
            raise DepthExhausted(f"no N_x <= {L} for point {x}; raise depth")

    space = FiniteMetricSpace.from_values(A + xs)
    return EscapeInstance(k, depth, tuple(A), tuple(xs), space, tuple(image), tuple(log))


@dataclass(frozen=True)
class EscapeVerification:
    period2_violations: tuple[int, ...]
    contraction_violations: tuple[tuple[int, int, int], ...]
    fixed_points: tuple[int, ...]
    non_increasing: tuple[int, ...]
    max_weak_ratio: Fraction
    max_weak_witness: tuple[int, int, int]
    triples_checked: int

    @property
    def ok(self) -> bool:
        return not (self.period2_violations or self.contraction_violations
                    or self.fixed_points or self.non_increasing)


def verify_escape_conditions(inst: EscapeInstance, workers: int = 1) -> EscapeVerification:
    """Brute-force check of both conditions over every domain point and triple."""
    dom = inst.domain
    image = inst.image
    p2 = tuple(x for x in dom if image[x] != x and image[image[x]] == x)
    fixed = tuple(inst.fixed_points())
    # every image is a sequence point strictly further along than any sequence preimage
    non_inc = tuple(x for x in dom
                    if image[x] >= len(inst.A)
                    or (inst.position(x) is not None and inst.position(image[x]) <= inst.position(x)))

    sup = sup_ratios(inst.space, image, dom, workers=workers)
    bad: list[tuple[int, int, int]] = []
    if sup.weak_sup > inst.k:
        D, _ = inst.space.int_dist
        for a, b, c in combinations(dom, 3):
            ta, tb, tc = image[a], image[b], image[c]
            img = D[ta][tb] + D[tb][tc] + D[tc][ta]
            m = max(D[u][v] + D[v][w] + D[w][u]
                    for u, v, w in combinations(sorted({a, b, c, ta, tb, tc}), 3))
            if img > inst.k * m:
                bad.append((a, b, c))
    n = len(dom)
    return EscapeVerification(p2, tuple(bad), fixed, non_inc, sup.weak_sup, sup.weak_witness,
                              n * (n - 1) * (n - 2) // 6)


def render_certificate(inst: EscapeInstance) -> list[str]:
    """``point N_x lhs rhs`` lines, one per assignment."""
    return [f"{a.point} {a.index} {a.lhs} {a.rhs}" for a in inst.assignment_log]
