"""Self-map enumeration, instance sweeps and the assertion auditor.

An audit walks a :class:`SweepSpace` of instances (image, metric, maps) and
evaluates one registered predicate on each.  When the whole space fits in the
budget the walk is exhaustive, in the fixed order

    dimension -> subset size -> lexicographic subset of the box -> u -> metric -> maps (lexicographic),

otherwise ``budget`` instances are drawn from a counter-based generator keyed by
``(seed, index)``.  Either way the result depends only on the space, the
predicate and the seed, never on the number of worker processes.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Any, Callable, Iterator

import numpy as np

from . import engine
from .image import DigitalImage, InvalidInput, SelfMap, discontinuity, is_continuous
from .instance import Instance, jsonable, parse_instance, serialize_instance
from .metrics import Metric, shrinkage_bound
from .properties import (
    ContractionSpec,
    MapPair,
    commuting_witness,
    contraction_check,
    contraction_ratio,
    compatibility_witness,
    compatible_type_witness,
    iterate_powers,
    satisfies_CLRT,
    satisfies_EA,
    weak_compatibility_witness,
)

MAP_CAP = 6
PAIR_CAP = 4
KEEP_COUNTEREXAMPLES = 20

COUNTEREXAMPLE = "counterexample"
CONFIRMED = "confirmed-exhaustive"
EXHAUSTED = "exhausted-budget"


# --- enumeration ----------------------------------------------------------------------------


def _cap(img: DigitalImage, cap: int) -> None:
    if len(img) > cap:
        raise InvalidInput(f"image has {len(img)} points; enumeration is capped at {cap}")


def enumerate_self_maps(img: DigitalImage, cap: int = MAP_CAP) -> Iterator[SelfMap]:
    """All |X|^|X| self-maps in lexicographic table order."""
    _cap(img, cap)
    n = len(img)
    for table in product(range(n), repeat=n):
        yield SelfMap(img, table)


def enumerate_onto_self_maps(img: DigitalImage, cap: int = MAP_CAP) -> Iterator[SelfMap]:
    _cap(img, cap)
    for perm in permutations(range(len(img))):
        yield SelfMap(img, perm)


def enumerate_continuous_self_maps(img: DigitalImage, cap: int = MAP_CAP) -> Iterator[SelfMap]:
    """Continuous self-maps by depth-first assignment in point order.

    A partial assignment is abandoned as soon as two assigned adjacent points
    have images that are neither equal nor adjacent.
    """
    _cap(img, cap)
    n = len(img)
    nb = img.neighbor_sets
    earlier = [sorted(j for j in nb[i] if j < i) for i in range(n)]
    table = [0] * n

    def extend(i: int) -> Iterator[SelfMap]:
        if i == n:
            yield SelfMap(img, tuple(table))
            return
        for v in range(n):
            close = nb[v]
            if all(table[j] == v or table[j] in close for j in earlier[i]):
                table[i] = v
                yield from extend(i + 1)

    yield from extend(0)


@lru_cache(maxsize=512)
def _tables(img: DigitalImage, kind: str) -> tuple[tuple[int, ...], ...]:
    if kind == "all":
        return tuple(f.table for f in enumerate_self_maps(img))
    if kind == "onto":
        return tuple(f.table for f in enumerate_onto_self_maps(img))
    if kind == "continuous":
        return tuple(f.table for f in enumerate_continuous_self_maps(img))
    if kind == "continuous-onto":
        return tuple(t for t in _tables(img, "continuous") if len(set(t)) == len(t))
    raise InvalidInput(f"unknown map kind {kind!r}")


# --- generators: which maps an instance carries --------------------------------------------

# generator name -> ((map name, map kind), ...); instances range over the product in this order
GENERATORS: dict[str, tuple[tuple[str, str], ...]] = {
    "pairs": (("S", "all"), ("T", "all")),
    "maps": (("T", "all"),),
    "onto": (("T", "onto"),),
    "continuous-T-pairs": (("S", "all"), ("T", "continuous")),
    "continuous-onto": (("S", "continuous-onto"),),
}


def _count(img: DigitalImage, generator: str) -> int:
    n = len(img)
    total = 1
    for _, kind in GENERATORS[generator]:
        if kind == "all":
            total *= n**n
        elif kind == "onto":
            total *= _factorial(n)
        else:
            total *= len(_tables(img, kind))
    return total


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _iter_maps(img: DigitalImage, generator: str) -> Iterator[dict[str, SelfMap]]:
    spec = GENERATORS[generator]
    if len(spec) > 1:
        _cap(img, PAIR_CAP)
    pools = [[SelfMap(img, t) for t in _tables(img, kind)] for _, kind in spec]
    names = [name for name, _ in spec]
    for combo in product(*pools):
        yield dict(zip(names, combo))


# --- sweep space ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpace:
    """Instances to sweep: every subset of the box ``{0..side-1}^dim`` with the given sizes."""

    dims: tuple[int, ...] = (2,)
    sides: tuple[int, ...] = (3,)
    sizes: tuple[int, int] = (1, 3)
    us: tuple[int, ...] = (1,)
    metrics: tuple[Metric, ...] = (Metric.lp(1),)
    seed: int = 0
    budget: int = 10**7

    def __post_init__(self) -> None:
        if not self.dims or not self.us or not self.metrics:
            raise InvalidInput("sweep ranges must be non-empty")
        if len(self.sides) == 1 and len(self.dims) > 1:
            object.__setattr__(self, "sides", tuple(self.sides) * len(self.dims))
        if len(self.sides) != len(self.dims):
            raise InvalidInput("need one box side per dimension")
        lo, hi = self.sizes
        if lo < 1 or hi < lo:
            raise InvalidInput(f"bad size range {self.sizes}")
        if self.budget <= 0:
            raise InvalidInput("budget must be positive")
        if any(s < 1 for s in self.sides) or any(d < 1 for d in self.dims):
            raise InvalidInput("dimensions and box sides must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if not any(self._us_for(d) and self._metrics_for(d) for d in self.dims):
            raise InvalidInput("no dimension admits any of the given u values and metrics")

    def _us_for(self, dim: int) -> list[int]:
        return [u for u in self.us if 1 <= u <= dim]

    def _metrics_for(self, dim: int) -> list[Metric]:
        return [m for m in self.metrics if m.kind == "lp" or (m.kind == "harmonic" and dim == 1)]

    def units(self) -> list[tuple[DigitalImage, Metric]]:
        """(image, metric) pairs in sweep order."""
        return list(_units(self))

    def _build_units(self) -> tuple[tuple[DigitalImage, Metric], ...]:
        out = []
        for dim, side in zip(self.dims, self.sides):
            box = list(product(range(side), repeat=dim))
            us, metrics = self._us_for(dim), self._metrics_for(dim)
            for size in range(self.sizes[0], min(self.sizes[1], len(box)) + 1):
                for subset in combinations(box, size):
                    for u in us:
                        img = DigitalImage(subset, u)
                        for m in metrics:
                            out.append((img, m))
        return tuple(out)


@lru_cache(maxsize=64)
def _units(space: SweepSpace) -> tuple[tuple[DigitalImage, Metric], ...]:
    return space._build_units()


def random_instance(space: SweepSpace, seed: int | None = None, index: int = 0,
                    generator: str = "pairs") -> dict[str, Any]:
    """A reproducible random instance, serialized; identical for identical (space, seed, index)."""
    seed = space.seed if seed is None else seed
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    choices = [(d, s) for d, s in zip(space.dims, space.sides) if space._us_for(d) and space._metrics_for(d)]
    dim, side = choices[int(rng.integers(len(choices)))]
    volume = side**dim
    hi = min(space.sizes[1], volume)
    lo = min(space.sizes[0], hi)
    size = int(rng.integers(lo, hi + 1))
    cells = sorted(rng.choice(volume, size=size, replace=False).tolist())
    points = [tuple((c // side**k) % side for k in reversed(range(dim))) for c in cells]
    us = space._us_for(dim)
    metrics = space._metrics_for(dim)
    u = us[int(rng.integers(len(us)))]
    metric = metrics[int(rng.integers(len(metrics)))]
    img = DigitalImage(tuple(points), u)
    n = len(img)
    maps = {}
    for name, kind in GENERATORS[generator]:
        if kind == "all":
            table = tuple(int(v) for v in rng.integers(n, size=n))
        elif kind == "onto":
            table = tuple(int(v) for v in rng.permutation(n))
        else:
            pool = _tables(img, kind)
            if not pool:
                raise InvalidInput(f"image admits no {kind} map")
            table = pool[int(rng.integers(len(pool)))]
        maps[name] = SelfMap(img, table)
    return serialize_instance(Instance(img, metric, maps))


# --- predicates -----------------------------------------------------------------------------


@dataclass
class Outcome:
    applicable: bool
    violated: bool
    witness: Any = None


@dataclass(frozen=True)
class Predicate:
    id: str
    generator: str
    evaluate: Callable[[Instance, dict], Outcome]
    unproven: bool = False
    defaults: dict = field(default_factory=dict)
    summary: str = ""


def _pair(inst: Instance) -> MapPair:
    return MapPair(inst.maps["S"], inst.maps["T"], inst.metric)


def _many_equivalences(inst: Instance, params: dict) -> Outcome:
    pair = _pair(inst)
    S, T = pair.S, pair.T
    verdicts = {
        "compatible": compatibility_witness(pair) is None,
        "weakly compatible": weak_compatibility_witness(S, T) is None,
    }
    for v in "ABCP":
        verdicts[f"type {v}"] = compatible_type_witness(pair, v)[0] is None
    agree = len(set(verdicts.values())) == 1
    return Outcome(True, not agree, None if agree else verdicts)


def _commuting_compatible(inst: Instance, params: dict) -> Outcome:
    pair = _pair(inst)
    commuting = commuting_witness(pair.S, pair.T) is None
    if not commuting:
        return Outcome(False, False)
    w = compatibility_witness(pair)
    return Outcome(True, w is not None, None if w is None else inst.image.points[w])


def _ea_clrt(inst: Instance, params: dict) -> Outcome:
    S, T = inst.maps["S"], inst.maps["T"]
    ea, clrt = satisfies_EA(S, T), satisfies_CLRT(S, T)
    return Outcome(True, ea != clrt, None if ea == clrt else {"EA": ea, "CLRT": clrt})


def _shrinkage(inst: Instance, params: dict) -> Outcome:
    img, m = inst.image, inst.metric
    bound = shrinkage_bound(img.u, m)
    alpha = bound * Fraction(params.get("alpha_factor", Fraction(99, 100)))
    report = engine.verify_shrinkage(img, m, inst.maps["T"], inst.maps["S"], alpha)
    return Outcome(report.applicable, report.violated,
                   None if not report.violated else report.conclusion.witness)


def _expansive_onto(inst: Instance, params: dict) -> Outcome:
    img = inst.image
    if len(img) < 2:
        return Outcome(False, False, "degenerate singleton")
    T = inst.maps["T"]
    k = Fraction(params.get("k", Fraction(3, 2)))
    res = contraction_check(MapPair(T, SelfMap.identity(img), inst.metric), ContractionSpec("expansive", k))
    return Outcome(True, res.holds, [img.points[i] for i in T.table] if res.holds else None)


def _constant_commuter(inst: Instance, params: dict) -> Outcome:
    T = inst.maps["T"]
    report = engine.theorem_verdict("constant-commuter", MapPair(T, T, inst.metric))
    return Outcome(True, report.violated, report.conclusion.witness if report.violated else None)


def _theorem_predicate(theorem_id: str) -> Callable[[Instance, dict], Outcome]:
    def evaluate(inst: Instance, params: dict) -> Outcome:
        report = engine.theorem_verdict(theorem_id, _pair(inst), params.get("alpha"), params.get("k"))
        witness = None
        if report.violated:
            failed = [c for c in [report.conclusion, *report.evidence] if not c.holds]
            witness = {c.label: c.witness for c in failed}
        return Outcome(report.applicable, report.violated, witness)

    return evaluate


def _mu_max_contraction(inst: Instance, params: dict) -> Outcome:
    """Compatible S, T with S(X) in T(X) and the five-term max contraction for some mu in (0, mu_max)."""
    pair = _pair(inst)
    S, T = pair.S, pair.T
    mu_max = Fraction(params.get("mu_max", Fraction(1, 2)))
    if compatibility_witness(pair) is not None or not S.range <= T.range:
        return Outcome(False, False)
    ratio, unbounded = contraction_ratio(pair, "max5")
    if unbounded or (ratio is not None and ratio >= mu_max):
        return Outcome(False, False)
    cfp = engine.common_fixed_points(S, T)
    ok = len(cfp) == 1
    return Outcome(True, not ok, None if ok else {"common fixed points": [inst.image.points[i] for i in cfp],
                                                  "tight mu": ratio})


def _expansive_iterate(inst: Instance, params: dict) -> Outcome:
    """Continuous onto S with d(S^n x, S^n y) >= K d(x, y) for some n, K > 1."""
    img = inst.image
    S = inst.maps["S"]
    K = Fraction(params.get("k", Fraction(3, 2)))
    if not S.is_onto or not is_continuous(img, S):
        return Outcome(False, False)
    ident = SelfMap.identity(img)
    hit = None
    for n, power in iterate_powers(S):
        if contraction_check(MapPair(power, ident, inst.metric), ContractionSpec("expansive", K)).holds:
            hit = n
            break
    if hit is None:
        return Outcome(False, False)
    fps = [i for i, v in enumerate(S.table) if v == i]
    return Outcome(True, len(fps) != 1, None if len(fps) == 1 else {
        "n": hit, "fixed points": [img.points[i] for i in fps]})


def _commuting_reverse_continuous(inst: Instance, params: dict) -> Outcome:
    """Commuting S, T with T(X) in S(X), S digitally continuous, d(Tx,Ty) <= alpha d(Sx,Sy), alpha < 1."""
    pair = _pair(inst)
    S, T = pair.S, pair.T
    if commuting_witness(S, T) is not None or not T.range <= S.range or discontinuity(inst.image, S) is not None:
        return Outcome(False, False)
    ratio, unbounded = contraction_ratio(MapPair(T, S, inst.metric), "linear")
    if unbounded or (ratio is not None and ratio >= 1):
        return Outcome(False, False)
    cfp = engine.common_fixed_points(S, T)
    return Outcome(True, not cfp, None if cfp else "no common fixed point")


PREDICATES: dict[str, Predicate] = {}


def _register(p: Predicate) -> None:
    PREDICATES[p.id] = p


_register(Predicate("many-equivalences", "pairs", _many_equivalences,
                    summary="compatible, weakly compatible and types A, B, C, P agree"))
_register(Predicate("commuting-implies-compatible", "pairs", _commuting_compatible,
                    summary="commuting pairs are compatible"))
_register(Predicate("ea-iff-clrt", "pairs", _ea_clrt, summary="CLRT <=> E.A. on finite images"))
_register(Predicate("shrinkage", "continuous-T-pairs", _shrinkage,
                    defaults={"alpha_factor": Fraction(99, 100)},
                    summary="contraction below 1/u^(1/p) against continuous T forces S constant"))
_register(Predicate("expansive-onto", "onto", _expansive_onto, defaults={"k": Fraction(3, 2)},
                    summary="no onto self-map is expansive"))
_register(Predicate("constant-commuter", "maps", _constant_commuter,
                    summary="T has a fixed point iff a constant map commutes with T"))
for _tid in engine.THEOREMS:
    _register(Predicate(f"theorem:{_tid}", "pairs", _theorem_predicate(_tid),
                        summary=f"hypotheses of {_tid} imply its conclusion"))
_register(Predicate("mu-max-contraction", "pairs", _mu_max_contraction, unproven=True,
                    defaults={"mu_max": Fraction(1, 2)},
                    summary="unproven: compatible + S(X) in T(X) + five-term max contraction => unique common fixed point"))
_register(Predicate("expansive-iterate", "continuous-onto", _expansive_iterate, unproven=True,
                    defaults={"k": Fraction(3, 2)},
                    summary="unproven: continuous onto S with an expansive iterate has a unique fixed point"))
_register(Predicate("commuting-reverse-contraction-continuous", "pairs", _commuting_reverse_continuous,
                    unproven=True,
                    summary="unproven: commuting, T(X) in S(X), continuous S, reverse contraction => common fixed point"))

# Names under which the audited statements are commonly cited.
PREDICATE_ALIASES: dict[str, tuple[str, dict]] = {
    "manyEquivs": ("many-equivalences", {}),
    "commuteImpliesCompatible": ("commuting-implies-compatible", {}),
    "EA-iff-CLRT": ("ea-iff-clrt", {}),
    "commuteThm": ("constant-commuter", {}),
    "JRassert1(0,1/2)": ("mu-max-contraction", {"mu_max": Fraction(1, 2)}),
    "JRassert1(0,1)": ("mu-max-contraction", {"mu_max": Fraction(1)}),
    "JRwrong3.1.6": ("expansive-iterate", {}),
    "EgeEtal3.2": ("commuting-reverse-contraction-continuous", {}),
}


def resolve_predicate(predicate_id: str) -> tuple[Predicate, dict]:
    if predicate_id in PREDICATE_ALIASES:
        name, params = PREDICATE_ALIASES[predicate_id]
        return PREDICATES[name], dict(params)
    if predicate_id.startswith("theorem:"):
        tid = engine.resolve_theorem(predicate_id.split(":", 1)[1])
        return PREDICATES[f"theorem:{tid}"], {}
    if predicate_id in PREDICATES:
        return PREDICATES[predicate_id], {}
    raise InvalidInput(f"unknown predicate {predicate_id!r}")


# --- audit ----------------------------------------------------------------------------------


@dataclass
class AuditFinding:
    predicate_id: str
    verdict: str
    instance: dict | None
    witness: Any
    params: dict = field(default_factory=dict)
    exhaustive: bool = False
    checked: int = 0
    applicable: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    unproven: bool = False

    def to_json(self) -> dict:
        return jsonable({
            "predicate": self.predicate_id,
            "verdict": self.verdict,
            "scope": "exhaustive at this size" if self.exhaustive else "seeded random sample",
            "unproven_assertion": self.unproven,
            "params": self.params,
            "instances_checked": self.checked,
            "hypotheses_satisfied": self.applicable,
            "first_counterexample": self.instance,
            "witness": self.witness,
            "counterexamples": self.counterexamples,
        })


def _evaluate(pred: Predicate, inst: Instance, params: dict) -> Outcome:
    return pred.evaluate(inst, params)


def _run_units(args) -> list[tuple[tuple[int, int], int, int, list]]:
    """Worker: exhaustive evaluation of the given unit indices."""
    pred_id, params, space, unit_ids = args
    pred = PREDICATES[pred_id]
    units = _units(space)
    out = []
    for u in unit_ids:
        img, metric = units[u]
        checked = applicable = 0
        found = []
        for j, maps in enumerate(_iter_maps(img, pred.generator)):
            inst = Instance(img, metric, maps)
            res = _evaluate(pred, inst, params)
            checked += 1
            applicable += res.applicable
            if res.violated and len(found) < KEEP_COUNTEREXAMPLES:
                found.append(((u, j), serialize_instance(inst), jsonable(res.witness)))
        out.append(((u, 0), checked, applicable, found))
    return out


def _run_random(args) -> list[tuple[tuple[int, int], int, int, list]]:
    """Worker: seeded random evaluation of the given sample indices."""
    pred_id, params, space, indices = args
    pred = PREDICATES[pred_id]
    checked = applicable = 0
    found = []
    for i in indices:
        data = random_instance(space, space.seed, i, pred.generator)
        res = _evaluate(pred, parse_instance(data), params)
        checked += 1
        applicable += res.applicable
        if res.violated and len(found) < KEEP_COUNTEREXAMPLES:
            found.append(((i, 0), data, jsonable(res.witness)))
    return [((indices[0] if indices else 0, 0), checked, applicable, found)]


def _chunks(items: list[int], workers: int) -> list[list[int]]:
    size = max(1, -(-len(items) // max(1, workers * 4)))
    return [items[i:i + size] for i in range(0, len(items), size)]


def audit(predicate_id: str, space: SweepSpace, params: dict | None = None, workers: int = 1) -> AuditFinding:
    """Search the space for a counterexample to the predicate.

    Returns the first counterexample in sweep order, or ``confirmed-exhaustive``
    when the whole space was checked, or ``exhausted-budget`` after ``budget``
    random instances.
    """
    pred, alias_params = resolve_predicate(predicate_id)
    merged = {**pred.defaults, **alias_params, **(params or {})}
    units = space.units()
    total = sum(_count(img, pred.generator) for img, _ in units) if units else 0
    exhaustive = 0 < total <= space.budget
    if exhaustive:
        for img, _ in units:
            if len(GENERATORS[pred.generator]) > 1:
                _cap(img, PAIR_CAP)
            else:
                _cap(img, MAP_CAP)
        jobs = [(pred.id, merged, space, chunk) for chunk in _chunks(list(range(len(units))), workers)]
        runner = _run_units
    else:
        jobs = [(pred.id, merged, space, chunk) for chunk in _chunks(list(range(space.budget)), workers)]
        runner = _run_random
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for batch in pool.map(runner, jobs) for r in batch]
    else:
        results = [r for job in jobs for r in runner(job)]
    checked = sum(r[1] for r in results)
    applicable = sum(r[2] for r in results)
    found = sorted((f for r in results for f in r[3]), key=lambda f: f[0])[:KEEP_COUNTEREXAMPLES]
    examples = [{"order": list(key), "instance": inst, "witness": w} for key, inst, w in found]
    if examples:
        verdict, first, witness = COUNTEREXAMPLE, examples[0]["instance"], examples[0]["witness"]
    else:
        verdict, first, witness = (CONFIRMED if exhaustive else EXHAUSTED), None, None
    return AuditFinding(pred.id, verdict, first, witness, merged, exhaustive, checked, applicable,
                        examples, pred.unproven)


def replay(finding: AuditFinding) -> bool:
    """Re-check every recorded counterexample from its serialized instance; True iff all reproduce."""
    pred = PREDICATES[finding.predicate_id]
    for ex in finding.counterexamples:
        res = _evaluate(pred, parse_instance(ex["instance"]), finding.params)
        if not res.violated or jsonable(res.witness) != ex["witness"]:
            return False
    return True
