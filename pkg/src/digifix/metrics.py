"""Distances on digital images: l_p, the harmonic metric on {0, 1, 2, ...}, and explicit tables.

A :class:`Metric` reports each distance as an :class:`ExactScalar`.  Internally a
distance is a *radicand* (rational) together with the metric's root index, so
l_1, l_inf, harmonic and table distances are plain rationals (index 1) and l_p
distances are ``(sum |dx|^p) ** (1/p)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Sequence

from .image import DigitalImage, InvalidInput, Point, SelfMap
from .report import Check, VerdictReport
from .scalar import ExactScalar, ONE, sum_le


@dataclass(frozen=True)
class Metric:
    """Which distance to use.

    ``kind`` is ``"lp"`` (with ``p`` a positive int, or None for l_inf),
    ``"harmonic"`` or ``"table"``.  Table metrics carry the points they index.
    """

    kind: str
    p: int | None = None
    entries: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False)
    table_points: tuple[Point, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.kind == "lp":
            if self.p is not None and (not isinstance(self.p, int) or self.p < 1):
                raise InvalidInput(f"l_p exponent must be a positive integer or inf, got {self.p!r}")
        elif self.kind == "table":
            n = len(self.entries)
            if n == 0 or any(len(row) != n for row in self.entries) or len(self.table_points) != n:
                raise InvalidInput("table metric must be a square matrix matching its points")
            rows = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
            for i in range(n):
                if rows[i][i] != 0:
                    raise InvalidInput(f"table metric has non-zero diagonal entry at {i}")
                for j in range(n):
                    if rows[i][j] < 0:
                        raise InvalidInput("table metric has a negative entry")
                    if rows[i][j] != rows[j][i]:
                        raise InvalidInput(f"asymmetric table: entry ({i},{j}) != ({j},{i})")
            object.__setattr__(self, "entries", rows)
            object.__setattr__(self, "table_points", tuple(tuple(p) for p in self.table_points))
        elif self.kind != "harmonic":
            raise InvalidInput(f"unknown metric kind {self.kind!r}")

    @classmethod
    def lp(cls, p: int | None) -> "Metric":
        return cls("lp", p)

    @classmethod
    def harmonic(cls) -> "Metric":
        return cls("harmonic")

    @classmethod
    def table(cls, points: Sequence[Sequence[int]], entries) -> "Metric":
        """Table metric; ``entries[i][j]`` is the distance between ``points[i]`` and ``points[j]``."""
        pts = [tuple(p) for p in points]
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        rows = tuple(tuple(Fraction(entries[i][j]) for j in order) for i in order)
        return cls("table", None, rows, tuple(pts[i] for i in order))

    @property
    def root_index(self) -> int:
        if self.kind == "lp" and self.p is not None:
            return self.p
        return 1

    @property
    def is_exact_family(self) -> bool:
        """l_1, l_2, l_inf, harmonic and tables: the paths decided without any rounding."""
        return self.kind != "lp" or self.p in (None, 1, 2)

    def name(self) -> str:
        if self.kind == "lp":
            return "linf" if self.p is None else f"l{self.p}"
        return self.kind

    def check_points(self, points: Sequence[Point]) -> None:
        if self.kind == "harmonic":
            for p in points:
                if len(p) != 1:
                    raise InvalidInput("harmonic metric requires dimension 1")
                if p[0] < 0:
                    raise InvalidInput("harmonic metric requires non-negative coordinates")
        elif self.kind == "table":
            known = set(self.table_points)
            for p in points:
                if tuple(p) not in known:
                    raise InvalidInput(f"table metric has no entry for point {tuple(p)}")

    def radicand(self, x: Sequence[int], y: Sequence[int]) -> Fraction | int:
        if self.kind == "lp":
            if len(x) != len(y):
                raise InvalidInput("dimension mismatch")
            if self.p is None:
                return max(abs(a - b) for a, b in zip(x, y))
            p = self.p
            return sum(abs(a - b) ** p for a, b in zip(x, y))
        if self.kind == "harmonic":
            self.check_points((tuple(x), tuple(y)))
            a, b = x[0], y[0]
            if a == b:
                return 0
            if b == 0:
                return Fraction(1, a)
            if a == 0:
                return Fraction(1, b)
            return abs(Fraction(1, a) - Fraction(1, b))
        pos = self._table_position
        try:
            return self.entries[pos[tuple(x)]][pos[tuple(y)]]
        except KeyError:
            raise InvalidInput("point not covered by table metric") from None

    @cached_property
    def _table_position(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.table_points)}


def distance(m: Metric, x: Sequence[int], y: Sequence[int]) -> ExactScalar:
    return ExactScalar(Fraction(m.radicand(x, y)), m.root_index)


@dataclass(frozen=True)
class DistanceTable:
    """All pairwise radicands of one metric on one image, indexed by point index."""

    metric: Metric
    rad: tuple[tuple[Fraction | int, ...], ...]

    @property
    def root_index(self) -> int:
        return self.metric.root_index

    def __call__(self, i: int, j: int) -> ExactScalar:
        return ExactScalar(Fraction(self.rad[i][j]), self.metric.root_index)


@lru_cache(maxsize=4096)
def distance_table(img: DigitalImage, m: Metric) -> DistanceTable:
    m.check_points(img.points)
    pts = img.points
    n = len(pts)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            r = m.radicand(pts[i], pts[j])
            rows[i][j] = rows[j][i] = r
    return DistanceTable(m, tuple(tuple(r) for r in rows))


def verify_metric_axioms(img: DigitalImage, m: Metric) -> VerdictReport:
    """Check identity, positivity, symmetry and the triangle inequality on every triple."""
    pts = img.points
    n = len(pts)
    k = m.root_index
    d = [[ExactScalar(Fraction(m.radicand(pts[i], pts[j])), k) for j in range(n)] for i in range(n)]

    def first(pred):
        for i in range(n):
            for j in range(n):
                if pred(i, j):
                    return (pts[i], pts[j])
        return None

    zero = first(lambda i, j: i == j and bool(d[i][j]))
    positive = first(lambda i, j: i != j and not d[i][j])
    symmetric = first(lambda i, j: d[i][j] != d[j][i])
    triangle, exact = _triangle_violation(d, pts)
    checks = [
        Check("d(x,x) = 0", zero is None, zero),
        Check("d(x,y) > 0 for x != y", positive is None, positive),
        Check("d(x,y) = d(y,x)", symmetric is None, symmetric),
        Check("triangle inequality", triangle is None, triangle),
    ]
    bad = next((c for c in checks if not c.holds), None)
    report = VerdictReport(
        "metric-axioms",
        hypotheses=[],
        conclusion=Check(f"{m.name()} is a metric on the image", bad is None,
                         None if bad is None else {"axiom": bad.label, "points": bad.witness}),
        evidence=checks,
    )
    if not exact:
        report.flags.add("approximate comparison")
    return report


def _triangle_violation(d, pts):
    """First (x, y, z) with d(x,z) > d(x,y) + d(y,z); also whether every test was exact."""
    n = len(pts)
    if all(row[j].is_rational for row in d for j in range(n)):
        # common denominator turns every comparison into integer arithmetic
        den = 1
        for row in d:
            for v in row:
                den = den * v.radicand.denominator // gcd(den, v.radicand.denominator)
        a = [[int(v.radicand * den) for v in row] for row in d]
        for x in range(n):
            ax = a[x]
            for y in range(n):
                axy = ax[y]
                ay = a[y]
                for z in range(n):
                    if ax[z] > axy + ay[z]:
                        return (pts[x], pts[y], pts[z]), True
        return None, True
    exact = True
    for x in range(n):
        for y in range(n):
            for z in range(n):
                ok, ex = sum_le(d[x][z], (d[x][y], d[y][z]))
                exact &= ex
                if not ok:
                    return (pts[x], pts[y], pts[z]), exact
    return None, exact


def min_positive_distance(img: DigitalImage, m: Metric) -> ExactScalar:
    """Smallest distance between distinct points (the uniform-discreteness constant)."""
    if len(img) < 2:
        raise InvalidInput("need at least two points")
    table = distance_table(img, m)
    n = len(img)
    best = min(Fraction(table.rad[i][j]) for i in range(n) for j in range(i + 1, n))
    return ExactScalar(best, m.root_index)


def shrinkage_bound(u: int, m: Metric) -> ExactScalar:
    """``1 / u ** (1/p)``; for l_inf the p -> inf convention gives 1."""
    if m.kind != "lp":
        raise InvalidInput("shrinkage bound is defined for l_p metrics only")
    if m.p is None:
        return ONE
    return ExactScalar(Fraction(1, u), m.p)


def truncated_limit_trace(m: Metric, f: SelfMap, anchor: Sequence[int]) -> list[ExactScalar]:
    """``d(anchor, f(n))`` for ``n = 1..N`` where ``f`` acts on the points ``{0..N}``."""
    if m.kind != "harmonic":
        raise InvalidInput("limit traces are defined for the harmonic metric only")
    img = f.image
    if img.dimension != 1 or img.points != tuple((i,) for i in range(len(img))):
        raise InvalidInput("limit traces need a map on {0..N}")
    if len(img) < 3:
        raise InvalidInput("need N >= 2")
    anchor = tuple(anchor)
    return [distance(m, anchor, f.point(n)) for n in range(1, len(img))]
