"""JSON instance files and report serialization.

Instance format::

    {
      "dimension": 5,
      "points": [[0,0,0,0,0], [2,0,0,0,0], [1,1,1,1,1]],
      "adjacency": {"type": "c_u", "u": 5},
      "metric": {"type": "lp", "p": 1},          # or "inf"; {"type": "harmonic"};
                                                 # {"type": "table", "entries": [["0/1", "1/2"], ...]}
      "maps": {"T": [0, 0, 1], "identity": [0, 1, 2]}
    }

Map tables and table-metric rows index the ``points`` list as written.  After
parsing, points are held in lexicographic order and serialization always
writes that canonical order, so ``parse(serialize(parse(x))) == parse(x)``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .image import DigitalImage, InvalidInput, SelfMap
from .metrics import Metric
from .scalar import ExactScalar


class InstanceError(InvalidInput):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.field = where


@dataclass(frozen=True)
class Instance:
    image: DigitalImage
    metric: Metric
    maps: dict[str, SelfMap] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.image.dimension

    def map(self, name: str) -> SelfMap:
        try:
            return self.maps[name]
        except KeyError:
            raise InstanceError("maps", f"no map named {name!r} (have {sorted(self.maps)})") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.image, self.metric, self.maps) == (other.image, other.metric, other.maps)

    def __hash__(self) -> int:
        return hash((self.image, self.metric, tuple(sorted((k, v.table) for k, v in self.maps.items()))))


def format_rational(value) -> str:
    """Rationals as ``"num/den"``; never a float."""
    if isinstance(value, ExactScalar):
        if value.index != 1:
            return str(value)
        value = value.radicand
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text, where: str = "value") -> Fraction:
    if isinstance(text, bool) or isinstance(text, float):
        raise InstanceError(where, f"rationals must be integers or 'num/den' strings, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InstanceError(where, f"not a rational: {text!r}") from None


def _metric_from_json(spec: Mapping[str, Any], points) -> Metric:
    if not isinstance(spec, Mapping) or "type" not in spec:
        raise InstanceError("metric", "expected an object with a 'type' field")
    kind = spec["type"]
    if kind == "lp":
        p = spec.get("p", 1)
        if p in ("inf", "infinity", "∞"):
            return Metric.lp(None)
        if isinstance(p, bool) or not isinstance(p, int) or p < 1:
            raise InstanceError("metric.p", f"expected a positive integer or 'inf', got {p!r}")
        return Metric.lp(p)
    if kind == "harmonic":
        return Metric.harmonic()
    if kind == "table":
        entries = spec.get("entries")
        n = len(points)
        if not isinstance(entries, list) or len(entries) != n or any(
                not isinstance(row, list) or len(row) != n for row in entries):
            raise InstanceError("metric.entries", f"expected a {n}x{n} matrix")
        rows = [[parse_rational(v, f"metric.entries[{i}][{j}]") for j, v in enumerate(row)]
                for i, row in enumerate(entries)]
        try:
            return Metric.table(points, rows)
        except InvalidInput as exc:
            raise InstanceError("metric.entries", str(exc)) from None
    raise InstanceError("metric.type", f"unknown metric type {kind!r}")


def instance_from_dict(data: Mapping[str, Any]) -> Instance:
    if not isinstance(data, Mapping):
        raise InstanceError("instance", "expected a JSON object")
    pts = data.get("points")
    if not isinstance(pts, list) or not pts:
        raise InstanceError("points", "expected a non-empty list of integer vectors")
    points = []
    for i, p in enumerate(pts):
        if not isinstance(p, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in p):
            raise InstanceError(f"points[{i}]", f"expected a list of integers, got {p!r}")
        points.append(tuple(p))
    dim = data.get("dimension", len(points[0]))
    if not isinstance(dim, int) or dim < 1:
        raise InstanceError("dimension", f"expected a positive integer, got {dim!r}")
    for i, p in enumerate(points):
        if len(p) != dim:
            raise InstanceError(f"points[{i}]", f"has {len(p)} coordinates, dimension is {dim}")
    if len(set(points)) != len(points):
        dup = next(p for p in points if points.count(p) > 1)
        raise InstanceError("points", f"duplicate point {list(dup)}")
    adj = data.get("adjacency", {"type": "c_u", "u": 1})
    if not isinstance(adj, Mapping) or adj.get("type") != "c_u":
        raise InstanceError("adjacency", "only {'type': 'c_u', 'u': ...} is supported")
    u = adj.get("u")
    if not isinstance(u, int) or isinstance(u, bool) or not 1 <= u <= dim:
        raise InstanceError("adjacency.u", f"u out of range: {u!r} not in [1, {dim}]")
    try:
        image = DigitalImage(tuple(points), u)
    except InvalidInput as exc:
        raise InstanceError("points", str(exc)) from None
    metric = _metric_from_json(data.get("metric", {"type": "lp", "p": 1}), points)
    try:
        metric.check_points(image.points)
    except InvalidInput as exc:
        raise InstanceError("metric", str(exc)) from None
    new_index = {i: image.index(p) for i, p in enumerate(points)}
    maps = {}
    raw_maps = data.get("maps", {})
    if not isinstance(raw_maps, Mapping):
        raise InstanceError("maps", "expected an object of named index arrays")
    for name, table in raw_maps.items():
        where = f"maps.{name}"
        if not isinstance(table, list) or len(table) != len(points):
            raise InstanceError(where, f"expected {len(points)} indices")
        canon = [0] * len(points)
        for i, v in enumerate(table):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < len(points):
                raise InstanceError(f"{where}[{i}]", f"map index out of range: {v!r}")
            canon[new_index[i]] = new_index[v]
        maps[name] = SelfMap(image, tuple(canon))
    return Instance(image, metric, maps)


def parse_instance(raw: bytes | str | Mapping) -> Instance:
    """Parse UTF-8 JSON text (or an already decoded object) into a validated instance."""
    if isinstance(raw, Mapping):
        return instance_from_dict(raw)
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError("instance", f"not UTF-8: {exc}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InstanceError("instance", f"invalid JSON: {exc}") from None
    return instance_from_dict(data)


def metric_to_dict(m: Metric) -> dict[str, Any]:
    if m.kind == "lp":
        return {"type": "lp", "p": "inf" if m.p is None else m.p}
    if m.kind == "harmonic":
        return {"type": "harmonic"}
    return {"type": "table", "entries": [[format_rational(v) for v in row] for row in m.entries]}


def serialize_instance(inst: Instance) -> dict[str, Any]:
    img = inst.image
    metric = metric_to_dict(inst.metric)
    if inst.metric.kind == "table":
        m = inst.metric
        pos = {p: i for i, p in enumerate(m.table_points)}
        metric["entries"] = [[format_rational(m.entries[pos[a]][pos[b]]) for b in img.points] for a in img.points]
    return {
        "dimension": img.dimension,
        "points": [list(p) for p in img.points],
        "adjacency": {"type": "c_u", "u": img.u},
        "metric": metric,
        "maps": {name: list(f.table) for name, f in sorted(inst.maps.items())},
    }


def canonical_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(canonical_json(serialize_instance(inst)).encode("utf-8")).hexdigest()


def jsonable(obj: Any) -> Any:
    """Convert witnesses and scalars into plain JSON values (rationals as 'num/den')."""
    if isinstance(obj, (ExactScalar, Fraction)):
        return format_rational(obj)
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(v) for v in obj), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return repr(obj)
    return str(obj)
