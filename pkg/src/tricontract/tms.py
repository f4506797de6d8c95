"""Reader and writer for the ``tms 1`` text format.

::

    tms 1
    # comment
    points a b c
    metric
    0 1 1
    1 0 1
    1 1 0
    map
    a -> b
    b -> b
    c -> a

Rationals are written ``p/q`` or as bare integers. The ``map`` section is
optional; when present it must cover every point unless the caller allows a
partial map, in which case unmapped points get ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .metric_core import FiniteMetricSpace, MetricError, SelfMap, parse_rational


class TMSParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass
class TMSDocument:
    space: FiniteMetricSpace
    image: list[int | None] | None

    @property
    def self_map(self) -> SelfMap | None:
        if self.image is None or any(i is None for i in self.image):
            return None
        return SelfMap(tuple(self.image))


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        yield no, s


def parse_tms(text: str, allow_partial: bool = False) -> TMSDocument:
    it = iter(_lines(text))
    last = 0

    def take(what: str):
        nonlocal last
        try:
            no, s = next(it)
        except StopIteration:
            raise TMSParseError(last + 1, f"unexpected end of input, expected {what}") from None
        last = no
        return no, s

    no, s = take("header")
    if s.split() != ["tms", "1"]:
        raise TMSParseError(no, f"expected header 'tms 1', got {s!r}")

    no, s = take("points")
    toks = s.split()
    if not toks or toks[0] != "points":
        raise TMSParseError(no, "expected 'points <label> ...'")
    labels = toks[1:]
    if len(labels) < 3:
        raise TMSParseError(no, f"need at least 3 points, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise TMSParseError(no, "duplicate point label")
    n = len(labels)

    no, s = take("metric")
    if s != "metric":
        raise TMSParseError(no, "expected 'metric'")
    rows: list[tuple[Fraction, ...]] = []
    for _ in range(n):
        no, s = take("metric row")
        cells = s.split()
        if len(cells) != n:
            raise TMSParseError(no, f"metric row has {len(cells)} entries, expected {n}")
        try:
            rows.append(tuple(parse_rational(c) for c in cells))
        except ValueError as exc:
            raise TMSParseError(no, str(exc)) from None

    image: list[int | None] | None = None
    try:
        no, s = next(it)
    except StopIteration:
        s = None
    if s is not None:
        last = no
        if s != "map":
            raise TMSParseError(no, f"expected 'map' or end of input, got {s!r}")
        index = {lab: i for i, lab in enumerate(labels)}
        image = [None] * n
        for no, s in it:
            last = no
            src, sep, dst = s.partition("->")
            src, dst = src.strip(), dst.strip()
            if not sep or not src or not dst:
                raise TMSParseError(no, f"expected '<label> -> <label>', got {s!r}")
            for lab in (src, dst):
                if lab not in index:
                    raise TMSParseError(no, f"unknown point {lab!r}")
            if image[index[src]] is not None:
                raise TMSParseError(no, f"point {src!r} mapped twice")
            image[index[src]] = index[dst]
        missing = [labels[i] for i, t in enumerate(image) if t is None]
        if missing and not allow_partial:
            raise TMSParseError(last, f"map does not cover {', '.join(missing)}")

    try:
        space = FiniteMetricSpace(tuple(labels), tuple(rows))
    except MetricError as exc:
        raise TMSParseError(last, str(exc)) from None
    return TMSDocument(space, image)


def render_tms(space: FiniteMetricSpace, image: Sequence[int | None] | SelfMap | None = None,
               comments: Sequence[str] = ()) -> str:
    if isinstance(image, SelfMap):
        image = image.image
    out = ["tms 1"]
    out += [f"# {c}" for c in comments]
    out.append("points " + " ".join(space.labels))
    out.append("metric")
    for row in space.dist:
        out.append(" ".join(str(v) for v in row))
    if image is not None:
        out.append("map")
        for i, t in enumerate(image):
            if t is not None:
                out.append(f"{space.labels[i]} -> {space.labels[t]}")
    return "\n".join(out) + "\n"
