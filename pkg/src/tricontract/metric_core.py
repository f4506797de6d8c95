"""Exact finite metric spaces, self-maps, axiom validation and random instances.

Every distance is a :class:`fractions.Fraction`; nothing in here touches
floating point.
"""
from __future__ import annotations

import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Iterable, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")

AXIOMS = ("zero-diagonal", "positivity", "symmetry", "triangle")


class MetricError(ValueError):
    """Malformed metric space or map."""


class TooFewPoints(MetricError):
    """The space has fewer than three points."""


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or a bare integer. Decimals and exponents are rejected."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def render_rational(r: Fraction, approx: bool = False) -> str:
    if approx:
        return f"{float(r):.6g}~"
    return str(Fraction(r))


@dataclass(frozen=True)
class PointId:
    index: int
    label: str


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labelled points with an exact distance matrix.

    Construction only checks shape, label uniqueness and ``n >= 3``; the metric
    axioms are checked by :func:`validate_metric`.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        dist = tuple(tuple(Fraction(v) for v in row) for row in self.dist)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        n = len(labels)
        if n < 3:
            raise TooFewPoints(f"a metric space needs at least 3 points, got {n}")
        if len(set(labels)) != n:
            raise MetricError("point labels must be unique")
        for lab in labels:
            if not lab or any(ch.isspace() for ch in lab):
                raise MetricError(f"bad label {lab!r}")
        if len(dist) != n or any(len(row) != n for row in dist):
            raise MetricError(f"distance matrix must be {n}x{n}")

    @classmethod
    def from_values(cls, values: Iterable[Fraction], labels: Sequence[str] | None = None):
        """Subset of the rationals with the metric ``|x - y|``."""
        vals = [Fraction(v) for v in values]
        if labels is None:
            labels = [str(v) for v in vals]
        return cls(tuple(labels), tuple(tuple(abs(a - b) for b in vals) for a in vals))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def points(self) -> list[PointId]:
        return [PointId(i, lab) for i, lab in enumerate(self.labels)]

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    @cached_property
    def int_dist(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        """Distances scaled to integers by the common denominator."""
        den = lcm(*(v.denominator for row in self.dist for v in row))
        return tuple(tuple(v.numerator * (den // v.denominator) for v in row)
                     for row in self.dist), den

    def scaled(self, factor: Fraction) -> FiniteMetricSpace:
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return FiniteMetricSpace(self.labels, tuple(tuple(v * factor for v in row) for row in self.dist))

    def permuted(self, perm: Sequence[int]) -> FiniteMetricSpace:
        """Relabel so that old point ``i`` becomes new point ``perm[i]``."""
        inv = _inverse(perm)
        return FiniteMetricSpace(
            tuple(self.labels[inv[a]] for a in range(self.n)),
            tuple(tuple(self.dist[inv[a]][inv[b]] for b in range(self.n)) for a in range(self.n)),
        )


@dataclass(frozen=True)
class SelfMap:
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(i) for i in self.image))
        n = len(self.image)
        for i in self.image:
            if not 0 <= i < n:
                raise MetricError(f"image index {i} out of range for {n} points")

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)

    def check_space(self, space: FiniteMetricSpace) -> None:
        if len(self.image) != space.n:
            raise MetricError(f"map has {len(self.image)} entries, space has {space.n} points")

    def fixed_points(self) -> list[int]:
        return [i for i, t in enumerate(self.image) if t == i]

    def conjugated(self, perm: Sequence[int]) -> SelfMap:
        """The map ``perm . T . perm^-1`` matching :meth:`FiniteMetricSpace.permuted`."""
        inv = _inverse(perm)
        return SelfMap(tuple(perm[self.image[inv[a]]] for a in range(len(self.image))))

    @classmethod
    def identity(cls, n: int) -> SelfMap:
        return cls(tuple(range(n)))


def _inverse(perm: Sequence[int]) -> list[int]:
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("not a permutation")
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def _scan_rows(dist, rows: range) -> dict[str, Violation]:
    # rows are scanned in increasing order, so the first hit per axiom is lexicographically first
    n = len(dist)
    found: dict[str, Violation] = {}
    zero = Fraction(0)
    for i in rows:
        di = dist[i]
        if "zero-diagonal" not in found and di[i] != 0:
            found["zero-diagonal"] = Violation("zero-diagonal", (i, i), di[i], zero)
        for j in range(n):
            if i == j:
                continue
            if "positivity" not in found and di[j] <= 0:
                found["positivity"] = Violation("positivity", (i, j), di[j], zero)
            if "symmetry" not in found and di[j] != dist[j][i]:
                found["symmetry"] = Violation("symmetry", (i, j), di[j], dist[j][i])
        if "triangle" not in found:
            for k in range(n):
                dik = di[k]
                dk = dist[k]
                for j in range(n):
                    if di[j] > dik + dk[j]:
                        found["triangle"] = Violation("triangle", (i, k, j), di[j], dik + dk[j])
                        break
                if "triangle" in found:
                    break
    return found


def validate_metric(space: FiniteMetricSpace, workers: int = 1) -> ValidationReport:
    """Exhaustively check the metric axioms.

    Triangle witnesses are ``(i, k, j)`` with ``lhs = d(i, j)`` and
    ``rhs = d(i, k) + d(k, j)``. For each axiom only the lexicographically
    first violation is reported, independent of ``workers``.
    """
    n = len(space.dist)
    if n < 3:
        raise TooFewPoints(f"a metric space needs at least 3 points, got {n}")
    chunks = _split(n, workers)
    if len(chunks) == 1:
        parts = [_scan_rows(space.dist, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda r: _scan_rows(space.dist, r), chunks))
    merged: dict[str, Violation] = {}
    for part in parts:
        for axiom, v in part.items():
            if axiom not in merged or v.witness < merged[axiom].witness:
                merged[axiom] = v
    return ValidationReport(tuple(merged[a] for a in AXIOMS if a in merged))


def _split(n: int, workers: int) -> list[range]:
    workers = max(1, min(workers, n))
    step = -(-n // workers)
    return [range(lo, min(lo + step, n)) for lo in range(0, n, step)]


@lru_cache(maxsize=64)
def _rationals_in_1_2(denom_bound: int) -> tuple[Fraction, ...]:
    vals = {Fraction(p, q) for q in range(1, denom_bound + 1) for p in range(q, 2 * q + 1)}
    return tuple(sorted(vals))


def random_space(n: int, denom_bound: int, seed: int) -> FiniteMetricSpace:
    """Random metric on ``n`` points with every off-diagonal distance in [1, 2].

    Any symmetric matrix with entries in [1, 2] satisfies the triangle
    inequality, so no repair step is needed.
    """
    if n < 3:
        raise TooFewPoints(f"a metric space needs at least 3 points, got {n}")
    if denom_bound < 1:
        raise ValueError("denom_bound must be >= 1")
    rng = random.Random(seed)
    pool = _rationals_in_1_2(denom_bound)
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dist[i][j] = dist[j][i] = rng.choice(pool)
    return FiniteMetricSpace(tuple(f"p{i}" for i in range(n)), tuple(map(tuple, dist)))


def random_map(space: FiniteMetricSpace, seed: int) -> SelfMap:
    rng = random.Random(seed)
    return SelfMap(tuple(rng.randrange(space.n) for _ in range(space.n)))
