"""Pairwise map properties: commuting, (weak) compatibility and its variants, E.A., CLRT,
and contraction / expansive inequalities.

Compatibility and its variants quantify over sequences with
``lim S(x_n) = lim T(x_n) = t``.  On a finite image every positive distance is
bounded below, so such sequences are eventually constant in value and their
tails lie in the coincidence fibre ``{x : S(x) = T(x) = t}``.  Each limit term
then equals its value at any fibre point, and the checkers below evaluate the
defining (in)equalities literally at every coincidence point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .image import DigitalImage, InvalidInput, SelfMap, compose
from .metrics import DistanceTable, Metric, distance_table
from .report import Check
from .scalar import ExactScalar, ONE, sum_le

FINITE_REDUCTION = "finite reduction applied"
APPROXIMATE = "approximate comparison"


@dataclass(frozen=True)
class MapPair:
    S: SelfMap
    T: SelfMap
    metric: Metric = field(default_factory=lambda: Metric.lp(1))

    def __post_init__(self) -> None:
        if self.S.image != self.T.image:
            raise InvalidInput("S and T are defined on different images")

    @property
    def image(self) -> DigitalImage:
        return self.S.image

    @cached_property
    def distances(self) -> DistanceTable:
        return distance_table(self.S.image, self.metric)


@dataclass(frozen=True)
class CoincidenceSet:
    points: tuple[int, ...]
    values: tuple[int, ...]

    def __bool__(self) -> bool:
        return bool(self.points)


def _check_same(S: SelfMap, T: SelfMap) -> None:
    if S.image != T.image:
        raise InvalidInput("S and T are defined on different images")


def coincidence(S: SelfMap, T: SelfMap) -> CoincidenceSet:
    _check_same(S, T)
    pts = tuple(i for i, (a, b) in enumerate(zip(S.table, T.table)) if a == b)
    return CoincidenceSet(pts, tuple(sorted({S.table[i] for i in pts})))


def commuting_witness(S: SelfMap, T: SelfMap) -> int | None:
    """First x with S(T(x)) != T(S(x))."""
    _check_same(S, T)
    s, t = S.table, T.table
    for x in range(len(s)):
        if s[t[x]] != t[s[x]]:
            return x
    return None


def is_commuting(S: SelfMap, T: SelfMap) -> bool:
    return commuting_witness(S, T) is None


def weak_compatibility_witness(S: SelfMap, T: SelfMap) -> int | None:
    """First coincidence point x at which S and T fail to commute."""
    _check_same(S, T)
    s, t = S.table, T.table
    for x in range(len(s)):
        if s[x] == t[x] and s[t[x]] != t[s[x]]:
            return x
    return None


def is_weakly_compatible(S: SelfMap, T: SelfMap) -> bool:
    return weak_compatibility_witness(S, T) is None


def _fibre_terms(pair: MapPair, x: int):
    """Limit values of S(T(x_n)), T(T(x_n)), T(S(x_n)), S(S(x_n)) and t for a sequence in x's fibre."""
    s, t = pair.S.table, pair.T.table
    return s[t[x]], t[t[x]], t[s[x]], s[s[x]], s[x]


def compatibility_witness(pair: MapPair) -> int | None:
    """Coincidence point x along whose constant tail d(S(T(x_n)), T(S(x_n))) does not tend to 0."""
    d = pair.distances
    for x in coincidence(pair.S, pair.T).points:
        st, _, ts, _, _ = _fibre_terms(pair, x)
        if d.rad[st][ts] != 0:
            return x
    return None


def is_compatible(pair: MapPair) -> bool:
    return compatibility_witness(pair) is None


def _type_a(pair, x, d) -> tuple[bool, bool]:
    st, tt, ts, ss, _ = _fibre_terms(pair, x)
    return d.rad[st][tt] == 0 and d.rad[ts][ss] == 0, True


def _type_p(pair, x, d) -> tuple[bool, bool]:
    _, tt, _, ss, _ = _fibre_terms(pair, x)
    return d.rad[ss][tt] == 0, True


def _type_b(pair, x, d) -> tuple[bool, bool]:
    st, tt, ts, ss, t = _fibre_terms(pair, x)
    S, T = pair.S.table, pair.T.table
    half = Fraction(1, 2)
    ok1, ex1 = sum_le(d(st, tt), (d(st, S[t]), d(S[t], ss)), half)
    ok2, ex2 = sum_le(d(ts, ss), (d(ts, T[t]), d(T[t], tt)), half)
    return ok1 and ok2, ex1 and ex2


def _type_c(pair, x, d) -> tuple[bool, bool]:
    st, tt, ts, ss, t = _fibre_terms(pair, x)
    S, T = pair.S.table, pair.T.table
    half = Fraction(1, 2)
    ok1, ex1 = sum_le(d(st, tt), (d(st, S[t]), d(S[t], ss), d(S[t], tt)), half)
    ok2, ex2 = sum_le(d(ts, ss), (d(ts, T[t]), d(T[t], tt), d(T[t], ss)), half)
    return ok1 and ok2, ex1 and ex2


_VARIANTS = {"A": _type_a, "B": _type_b, "C": _type_c, "P": _type_p}


def compatible_type_witness(pair: MapPair, variant: str) -> tuple[int | None, bool]:
    """First coincidence point violating the variant's condition, and whether all tests were exact."""
    try:
        test = _VARIANTS[variant]
    except KeyError:
        raise InvalidInput(f"unknown compatibility variant {variant!r}") from None
    d = pair.distances
    exact = True
    for x in coincidence(pair.S, pair.T).points:
        ok, ex = test(pair, x, d)
        exact &= ex
        if not ok:
            return x, exact
    return None, exact


def is_compatible_type(pair: MapPair, variant: str) -> bool:
    return compatible_type_witness(pair, variant)[0] is None


def satisfies_EA(S: SelfMap, T: SelfMap) -> bool:
    """Some sequence has a common limit of S and T: a coincidence point exists."""
    return bool(coincidence(S, T))


def clrt_witness(S: SelfMap, T: SelfMap) -> tuple[int, int] | None:
    """A coincidence point x and a point y with S(x) = T(x) = T(y)."""
    _check_same(S, T)
    preimage = {}
    for y, v in enumerate(T.table):
        preimage.setdefault(v, y)
    for x in coincidence(S, T).points:
        y = preimage.get(S.table[x])
        if y is not None:
            return x, y
    return None


def satisfies_CLRT(S: SelfMap, T: SelfMap) -> bool:
    return clrt_witness(S, T) is not None


# --- contraction and expansive inequalities -------------------------------------------------

FORMS = ("linear", "max5", "iterate", "expansive")


@dataclass(frozen=True)
class ContractionSpec:
    """One inequality form with its coefficient.

    ``linear``:    d(Sx, Sy) <= c d(Bx, By)
    ``max5``:      d(Sx, Sy) <= c max{d(Bx,By), d(Bx,Sx), d(Bx,Sy), d(By,Sx), d(By,Sy)}
    ``iterate``:   d(S^k x, S^k y) <= c d(Bx, By)
    ``expansive``: d(Sx, Sy) >= c d(Bx, By)

    ``B`` is ``baseline`` when given, else the pair's T.
    """

    form: str
    coeff: Fraction | ExactScalar
    baseline: SelfMap | None = None
    k: int = 1

    def __post_init__(self) -> None:
        if self.form not in FORMS:
            raise InvalidInput(f"unknown contraction form {self.form!r}")
        if self.form == "iterate" and self.k < 1:
            raise InvalidInput("iterate form needs k >= 1")
        if not isinstance(self.coeff, ExactScalar):
            object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff <= 0:
            raise InvalidInput("coefficient must be positive")

    def valid_as_hypothesis(self) -> bool:
        if self.form == "expansive":
            return self.coeff > 1
        return self.coeff < 1


@dataclass(frozen=True)
class ContractionResult:
    holds: bool
    tight_ratio: ExactScalar | None
    witness: tuple[int, int] | None
    # some pair has a vanishing right side but a non-zero left side
    unbounded: bool = False


def _sides(pair: MapPair, form: str, baseline: SelfMap | None, k: int):
    """Yield (i, j, left radicand, right radicand) for every unordered pair i < j."""
    d = pair.distances.rad
    B = (baseline if baseline is not None else pair.T).table
    if baseline is not None and baseline.image != pair.image:
        raise InvalidInput("baseline map is defined on a different image")
    S = (pair.S.power(k) if form == "iterate" else pair.S).table
    n = len(S)
    for i in range(n):
        for j in range(i + 1, n):
            left = d[S[i]][S[j]]
            if form == "max5":
                bi, bj, si, sj = B[i], B[j], S[i], S[j]
                right = max(d[bi][bj], d[bi][si], d[bi][sj], d[bj][si], d[bj][sj])
            else:
                right = d[B[i]][B[j]]
            yield i, j, left, right


def contraction_ratio(pair: MapPair, form: str, baseline: SelfMap | None = None, k: int = 1):
    """Tight ratio of left to right side over pairs with non-zero right side.

    Returns ``(ratio, unbounded)``; the ratio is the maximum for contraction
    forms and the minimum for ``expansive``, None when no pair has a non-zero
    right side.
    """
    expansive = form == "expansive"
    best: Fraction | None = None
    unbounded = False
    for _, _, left, right in _sides(pair, form, baseline, k):
        if right == 0:
            if left != 0:
                unbounded = True
            continue
        r = Fraction(left) / Fraction(right)
        if best is None or (r < best if expansive else r > best):
            best = r
    ratio = None if best is None else ExactScalar(best, pair.metric.root_index)
    return ratio, unbounded


def contraction_check(pair: MapPair, spec: ContractionSpec) -> ContractionResult:
    """Evaluate the inequality over all point pairs; exact for every l_p, harmonic and table metric."""
    p = pair.metric.root_index
    coeff = spec.coeff
    expansive = spec.form == "expansive"
    if isinstance(coeff, ExactScalar):
        def ok(left, right):
            lhs, rhs = ExactScalar(Fraction(left), p), coeff * ExactScalar(Fraction(right), p)
            return lhs >= rhs if expansive else lhs <= rhs
    else:
        cp = coeff**p  # compare radicands: left <= c^p * right

        def ok(left, right):
            return left >= cp * right if expansive else left <= cp * right
    witness = None
    for i, j, left, right in _sides(pair, spec.form, spec.baseline, spec.k):
        if not ok(left, right):
            witness = (i, j)
            break
    ratio, unbounded = contraction_ratio(pair, spec.form, spec.baseline, spec.k)
    return ContractionResult(witness is None, ratio, witness, unbounded)


def exists_contraction_coefficient(pair: MapPair, form: str, bound: ExactScalar | Fraction = ONE,
                                   baseline: SelfMap | None = None, k: int = 1) -> tuple[bool, ExactScalar | None]:
    """Whether the inequality holds for some coefficient in ``(0, bound)``; returns the tight ratio too."""
    ratio, unbounded = contraction_ratio(pair, form, baseline, k)
    if unbounded:
        return False, ratio
    return (ratio is None or ratio < bound), ratio


def iterate_powers(S: SelfMap) -> list[tuple[int, SelfMap]]:
    """``(k, S^k)`` for k = 1, 2, ... up to the first repeated power: every distinct iterate."""
    seen = set()
    out = []
    power, k = S, 1
    while power.table not in seen:
        seen.add(power.table)
        out.append((k, power))
        power, k = compose(power, S), k + 1
    return out


# --- bundled property checks ----------------------------------------------------------------

PROPERTY_NAMES = ("commute", "weak", "compat", "A", "B", "C", "P", "EA", "CLRT")


def check_properties(pair: MapPair, names: Iterable[str] = PROPERTY_NAMES) -> tuple[list[Check], set[str]]:
    """Evaluate named properties; returns checks (witnesses as point indices) and report flags."""
    S, T = pair.S, pair.T
    checks: list[Check] = []
    flags: set[str] = set()
    for name in names:
        if name == "commute":
            w = commuting_witness(S, T)
            checks.append(Check("commute", w is None, w, "first x with S(T(x)) != T(S(x))"))
        elif name == "weak":
            w = weak_compatibility_witness(S, T)
            checks.append(Check("weak", w is None, w, "coincidence point where S, T do not commute"))
        elif name == "compat":
            flags.add(FINITE_REDUCTION)
            w = compatibility_witness(pair)
            checks.append(Check("compat", w is None, w, "coincidence point x with S(T(x)) != T(S(x))"))
        elif name in _VARIANTS:
            flags.add(FINITE_REDUCTION)
            w, exact = compatible_type_witness(pair, name)
            if not exact:
                flags.add(APPROXIMATE)
            checks.append(Check(name, w is None, w, f"coincidence point violating type {name}"))
        elif name == "EA":
            flags.add(FINITE_REDUCTION)
            c = coincidence(S, T)
            checks.append(Check("EA", bool(c), c.points[0] if c else None, "coincidence point"))
        elif name == "CLRT":
            flags.add(FINITE_REDUCTION)
            w = clrt_witness(S, T)
            checks.append(Check("CLRT", w is not None, w, "(x, y) with S(x) = T(x) = T(y)"))
        else:
            raise InvalidInput(f"unknown property {name!r}")
    return checks, flags
