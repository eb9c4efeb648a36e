"""Digital images in Z^n with c_u adjacency, and self-maps on them."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Point = tuple[int, ...]

MAX_DIMENSION = 8


class InvalidInput(ValueError):
    """Raised for malformed images, maps, metrics or instance files."""


def cu_adjacent(x: Sequence[int], y: Sequence[int], u: int) -> bool:
    """True iff x != y, at most ``u`` coordinates differ, each by exactly 1."""
    if len(x) != len(y):
        raise InvalidInput(f"dimension mismatch: {len(x)} vs {len(y)}")
    if not 1 <= u <= len(x):
        raise InvalidInput(f"u out of range: {u} not in [1, {len(x)}]")
    differing = 0
    for a, b in zip(x, y):
        if a != b:
            if abs(a - b) != 1:
                return False
            differing += 1
    return 0 < differing <= u


@dataclass(frozen=True)
class DigitalImage:
    """A finite set of distinct lattice points with a c_u adjacency.

    Points are stored in lexicographic order; every index-valued result in the
    package refers to this canonical order.
    """

    points: tuple[Point, ...]
    u: int

    def __post_init__(self) -> None:
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        if not pts:
            raise InvalidInput("image has no points")
        n = len(pts[0])
        if n < 1 or n > MAX_DIMENSION:
            raise InvalidInput(f"dimension {n} not in [1, {MAX_DIMENSION}]")
        if any(len(p) != n for p in pts):
            raise InvalidInput("points have mixed dimensions")
        if len(set(pts)) != len(pts):
            raise InvalidInput("duplicate points")
        if not 1 <= self.u <= n:
            raise InvalidInput(f"u out of range: {self.u} not in [1, {n}]")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], u: int = 1) -> "DigitalImage":
        return cls(tuple(tuple(p) for p in points), u)

    @classmethod
    def interval(cls, lo: int, hi: int) -> "DigitalImage":
        """The integers ``lo..hi`` as a c_1 image in Z."""
        return cls(tuple((i,) for i in range(lo, hi + 1)), 1)

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point: Sequence[int]) -> int:
        try:
            return self._position[tuple(point)]
        except KeyError:
            raise InvalidInput(f"{tuple(point)} is not a point of the image") from None

    @cached_property
    def _position(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix (read-only)."""
        n = len(self.points)
        arr = np.array(self.points, dtype=np.int64)
        diff = np.abs(arr[:, None, :] - arr[None, :, :])
        ok = (diff <= 1).all(axis=2)
        count = (diff == 1).sum(axis=2)
        adj = ok & (count >= 1) & (count <= self.u)
        adj.setflags(write=False)
        assert adj.shape == (n, n)
        return adj

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(np.flatnonzero(row).tolist()) for row in self.adjacency)

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.neighbor_sets[i]

    def adjacent_or_equal(self, i: int, j: int) -> bool:
        return i == j or j in self.neighbor_sets[i]

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, nb in enumerate(self.neighbor_sets) for j in sorted(nb) if i < j)


def neighbors(img: DigitalImage, i: int) -> list[int]:
    if not 0 <= i < len(img):
        raise InvalidInput(f"index {i} out of range for image of size {len(img)}")
    return sorted(img.neighbor_sets[i])


def is_connected_subset(img: DigitalImage, subset: Iterable[int]) -> bool:
    """Breadth-first connectivity of the induced subgraph on ``subset``."""
    members = set(subset)
    if not members:
        raise InvalidInput("connectedness of the empty set is undefined")
    start = min(members)
    seen = {start}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in img.neighbor_sets[i]:
            if j in members and j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == len(members)


def is_connected(img: DigitalImage) -> bool:
    return is_connected_subset(img, range(len(img)))


@dataclass(frozen=True)
class SelfMap:
    """A total function on an image's points, stored as an index table."""

    image: DigitalImage
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        table = tuple(int(v) for v in self.table)
        n = len(self.image)
        if len(table) != n:
            raise InvalidInput(f"map table has length {len(table)}, image has {n} points")
        for v in table:
            if not 0 <= v < n:
                raise InvalidInput(f"map index {v} out of range")
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls, img: DigitalImage) -> "SelfMap":
        return cls(img, tuple(range(len(img))))

    @classmethod
    def constant(cls, img: DigitalImage, c: int) -> "SelfMap":
        return cls(img, (c,) * len(img))

    @classmethod
    def from_function(cls, img: DigitalImage, fn) -> "SelfMap":
        """Build from a function on coordinates (points in, points out)."""
        return cls(img, tuple(img.index(fn(p)) for p in img.points))

    def __call__(self, i: int) -> int:
        return self.table[i]

    def __len__(self) -> int:
        return len(self.table)

    @cached_property
    def range(self) -> frozenset[int]:
        return frozenset(self.table)

    @property
    def is_constant(self) -> bool:
        return len(self.range) == 1

    @property
    def is_onto(self) -> bool:
        return len(self.range) == len(self.table)

    def power(self, k: int) -> "SelfMap":
        if k < 0:
            raise InvalidInput("negative map power")
        out = SelfMap.identity(self.image)
        for _ in range(k):
            out = compose(out, self)
        return out

    def point(self, i: int) -> Point:
        return self.image.points[self.table[i]]


def _same_image(f: SelfMap, g: SelfMap) -> None:
    if f.image != g.image:
        raise InvalidInput("maps are defined on different images")


def compose(f: SelfMap, g: SelfMap) -> SelfMap:
    """The map x -> g(f(x))."""
    _same_image(f, g)
    gt = g.table
    return SelfMap(f.image, tuple(gt[v] for v in f.table))


def discontinuities(img: DigitalImage, f: SelfMap) -> list[tuple[int, int]]:
    """Every adjacent pair (i, j), i < j, whose images are neither equal nor adjacent."""
    t = f.table
    nb = img.neighbor_sets
    return [(i, j) for i, j in img.edges if t[i] != t[j] and t[j] not in nb[t[i]]]


def discontinuity(img: DigitalImage, f: SelfMap) -> tuple[int, int] | None:
    """First adjacent pair (i, j), i < j, whose images are neither equal nor adjacent."""
    t = f.table
    nb = img.neighbor_sets
    for i, j in img.edges:
        a, b = t[i], t[j]
        if a != b and b not in nb[a]:
            return (i, j)
    return None


def is_continuous(img: DigitalImage, f: SelfMap) -> bool:
    if f.image != img:
        raise InvalidInput("map is not defined on this image")
    return discontinuity(img, f) is None


def fixed_points(f: SelfMap) -> list[int]:
    return [i for i, v in enumerate(f.table) if v == i]
