"""Fixed points, Jungck iteration, and theorem verdicts on finite digital metric spaces.

Every verdict checks its hypotheses with the checkers of :mod:`digifix.properties`
and then evaluates the conclusion independently (fixed points are enumerated,
never inferred), so an applicable verdict with a false conclusion is a genuine
contradiction of the theorem on that instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable

from .image import DigitalImage, InvalidInput, SelfMap, fixed_points, is_connected, is_continuous
from .metrics import Metric, min_positive_distance, shrinkage_bound
from .properties import (
    FINITE_REDUCTION,
    ContractionSpec,
    MapPair,
    coincidence,
    commuting_witness,
    compatibility_witness,
    contraction_check,
    contraction_ratio,
    iterate_powers,
    satisfies_CLRT,
    satisfies_EA,
    weak_compatibility_witness,
)
from .report import Check, VerdictReport
from .scalar import ExactScalar, ONE, ZERO

MAX_ONTO_SIZE = 8


def common_fixed_points(S: SelfMap, T: SelfMap) -> list[int]:
    if S.image != T.image:
        raise InvalidInput("S and T are defined on different images")
    return [i for i, (a, b) in enumerate(zip(S.table, T.table)) if a == i == b]


# --- Jungck iteration -----------------------------------------------------------------------


@dataclass
class IterationTrace:
    steps: list[int]
    values: list[int]
    stabilized_at: int | None

    @property
    def stabilized_value(self) -> int | None:
        return None if self.stabilized_at is None else self.values[self.stabilized_at]


class PreconditionError(InvalidInput):
    pass


def jungck_iteration(pair: MapPair, x0: int, cap: int = 1000) -> IterationTrace:
    """Iterate ``T(x_{n+1}) = S(x_n)`` from ``x0``, taking the smallest-index preimage.

    Stops once ``T(x_{n+1}) = T(x_n)`` (recorded as ``stabilized_at = n``) or after
    ``cap`` steps.
    """
    S, T = pair.S.table, pair.T.table
    if not 0 <= x0 < len(S):
        raise InvalidInput(f"start index {x0} out of range")
    preimage: dict[int, int] = {}
    for y, v in enumerate(T):
        preimage.setdefault(v, y)
    for v in sorted(set(S)):
        if v not in preimage:
            raise PreconditionError(
                f"S(X) is not contained in T(X): value {pair.image.points[v]} has no T-preimage")
    steps, values = [x0], [T[x0]]
    for n in range(cap):
        nxt = preimage[S[steps[-1]]]
        steps.append(nxt)
        values.append(T[nxt])
        if values[-1] == values[-2]:
            return IterationTrace(steps, values, n)
    return IterationTrace(steps, values, None)


def decay_step_bound(alpha: ExactScalar, first_gap: ExactScalar, delta: ExactScalar) -> int:
    """Smallest n with ``alpha**n * first_gap < delta``.

    With consecutive gaps shrinking geometrically and no positive distance below
    ``delta``, the iteration has stabilized by this step.
    """
    if not first_gap:
        return 0
    if alpha >= 1:
        raise InvalidInput("decay bound needs alpha < 1")
    n, value = 0, first_gap
    while value >= delta:
        n += 1
        value = alpha**n * first_gap
    return n


# --- helpers for verdicts -------------------------------------------------------------------


def _pt(pair_or_img, i):
    img = pair_or_img.image if isinstance(pair_or_img, MapPair) else pair_or_img
    return img.points[i]


def _contains(inner: SelfMap, outer: SelfMap, label: str) -> Check:
    missing = sorted(inner.range - outer.range)
    return Check(label, not missing, inner.image.points[missing[0]] if missing else None)


def _coefficient_check(pair: MapPair, form: str, alpha, bound: ExactScalar, label: str,
                       baseline: SelfMap | None = None, k: int = 1) -> tuple[Check, ExactScalar | None]:
    """The inequality holds for ``alpha`` (when given, with ``0 < alpha < bound``) or for some coefficient in ``(0, bound)``.

    Returns the check and the coefficient to use downstream (alpha, or the tight ratio).
    """
    if alpha is not None:
        alpha = alpha if isinstance(alpha, ExactScalar) else ExactScalar(Fraction(alpha))
        if not (ZERO < alpha < bound):
            return Check(label, False, {"alpha": str(alpha), "required": f"(0, {bound})"}), alpha
        res = contraction_check(pair, ContractionSpec(form, alpha, baseline, k))
        w = None if res.holds else [_pt(pair, res.witness[0]), _pt(pair, res.witness[1])]
        return Check(label, res.holds, w, f"alpha = {alpha}"), alpha
    ratio, unbounded = contraction_ratio(pair, form, baseline, k)
    if unbounded:
        return Check(label, False, "right side vanishes with non-zero left side"), None
    holds = ratio is None or ratio < bound
    return Check(label, holds, None if holds else str(ratio), f"tight ratio {ratio}"), ratio


def _iterate_check(pair: MapPair, alpha, k: int | None, label: str,
                   swap: bool = False) -> tuple[Check, int | None]:
    """``d(S^k x, S^k y) <= alpha d(T x, T y)`` for the given k or some k >= 1.

    With ``swap`` the roles are exchanged: T is iterated and S is the baseline.
    """
    base = pair.S if swap else pair.T
    mover = pair.T if swap else pair.S
    candidates = [(k, mover.power(k))] if k is not None else iterate_powers(mover)
    last = None
    for kk, power in candidates:
        sub = MapPair(power, base, pair.metric)
        check, _ = _coefficient_check(sub, "linear", alpha, ONE, label)
        last = check
        if check.holds:
            return Check(label, True, None, f"k = {kk}; {check.detail}"), kk
    return Check(label, False, last.witness if last else None,
                 "no iterate satisfies the inequality" if k is None else f"k = {k}"), None


def _unique_cfp(S: SelfMap, T: SelfMap, label="S and T have a unique common fixed point") -> Check:
    cfp = common_fixed_points(S, T)
    return Check(label, len(cfp) == 1, [S.image.points[i] for i in cfp])


def _some_cfp(S: SelfMap, T: SelfMap) -> Check:
    cfp = common_fixed_points(S, T)
    return Check("S and T have a common fixed point", len(cfp) >= 1, [S.image.points[i] for i in cfp])


def _finite_check(img: DigitalImage) -> Check:
    return Check("X is finite (hence uniformly discrete)", True, len(img))


def _jungck_evidence(pair: MapPair, alpha: ExactScalar | None) -> Check:
    """From every start the iteration stabilizes within the decay bound at the common fixed point."""
    img = pair.image
    cfp = common_fixed_points(pair.S, pair.T)
    alpha = ZERO if alpha is None else alpha
    delta = min_positive_distance(img, pair.metric) if len(img) > 1 else ONE
    d = pair.distances
    for x0 in range(len(img)):
        trace = jungck_iteration(pair, x0, cap=1)
        gap = d(trace.values[1], trace.values[0])
        bound = decay_step_bound(alpha, gap, delta)
        trace = jungck_iteration(pair, x0, cap=bound + 1)
        ok = (trace.stabilized_at is not None and trace.stabilized_at <= bound
              and cfp == [trace.stabilized_value])
        if not ok:
            return Check("Jungck iteration stabilizes within the decay bound at the common fixed point",
                         False, {"start": img.points[x0], "steps": [img.points[i] for i in trace.steps],
                                 "bound": bound})
    return Check("Jungck iteration stabilizes within the decay bound at the common fixed point", True)


# --- theorems -------------------------------------------------------------------------------


def _compatible_cfp(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = compatibility_witness(pair)
    contr, coeff = _coefficient_check(pair, "linear", alpha, ONE, "d(Sx,Sy) <= alpha d(Tx,Ty), alpha in (0,1)")
    hyps = [
        Check("S and T are compatible", w is None, None if w is None else _pt(pair, w)),
        _finite_check(pair.image),
        _contains(S, T, "S(X) subset of T(X)"),
        contr,
    ]
    report = VerdictReport("compatible-common-fixed-point", hyps, _unique_cfp(S, T), flags={FINITE_REDUCTION})
    if report.applicable:
        report.evidence.append(_jungck_evidence(pair, coeff))
    return report


def _weak_compatible_cfp(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = weak_compatibility_witness(S, T)
    contr, coeff = _coefficient_check(pair, "linear", alpha, ONE, "d(Sx,Sy) <= alpha d(Tx,Ty), alpha in (0,1)")
    hyps = [
        Check("S and T are weakly compatible", w is None, None if w is None else _pt(pair, w)),
        _finite_check(pair.image),
        _contains(S, T, "S(X) subset of T(X)"),
        contr,
    ]
    report = VerdictReport("weak-compatible-common-fixed-point", hyps, _unique_cfp(S, T), flags={FINITE_REDUCTION})
    if report.applicable:
        report.evidence.append(_jungck_evidence(pair, coeff))
    return report


def _coincidence_substitution(pair, alpha=None, k=None) -> VerdictReport:
    """Reduced form: every coincidence value t has S(t) = T(t) and S(T(t)) = T(S(t)), and every
    t with S(t) = T(t) has S(T(t)) = T(S(t))."""
    S, T = pair.S.table, pair.T.table
    w = compatibility_witness(pair)
    bad = None
    for t in coincidence(pair.S, pair.T).values:
        if S[t] != T[t] or S[T[t]] != T[S[t]]:
            bad = t
            break
    if bad is None:
        for t in range(len(S)):
            if S[t] == T[t] and S[T[t]] != T[S[t]]:
                bad = t
                break
    report = VerdictReport(
        "coincidence-substitution",
        [Check("S and T are compatible", w is None, None if w is None else _pt(pair, w)),
         _finite_check(pair.image)],
        Check("limits of T(S(x_n)) equal S(t) = T(t), and S(T(t)) = T(S(t))", bad is None,
              None if bad is None else _pt(pair, bad)),
        flags={FINITE_REDUCTION},
    )
    return report


def _coincidence_equalities(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S.table, pair.T.table
    w = compatibility_witness(pair)
    bad = None
    evidence = []
    for t in range(len(S)):
        if S[t] == T[t]:
            vals = {"S(T(t))": S[T[t]], "T(S(t))": T[S[t]], "S(S(t))": S[S[t]], "T(T(t))": T[T[t]]}
            same = len(set(vals.values())) == 1
            if not same and bad is None:
                bad = t
                evidence.append(Check(
                    f"values at coincidence point {pair.image.points[t]}", False,
                    {key: pair.image.points[v] for key, v in vals.items()}))
    report = VerdictReport(
        "compatible-coincidence-equalities",
        [Check("S and T are compatible", w is None, None if w is None else _pt(pair, w))],
        Check("S(T(t)) = T(S(t)) = S(S(t)) = T(T(t)) whenever S(t) = T(t)", bad is None,
              None if bad is None else _pt(pair, bad)),
        notes=[f"{e.label}: {e.witness}" for e in evidence],
        flags={FINITE_REDUCTION},
    )
    return report


def _constant_commuter(pair, alpha=None, k=None) -> VerdictReport:
    T = pair.T
    img = pair.image
    has_fp = bool(fixed_points(T))
    commuters = [c for c in range(len(img)) if commuting_witness(SelfMap.constant(img, c), T) is None]
    conclusion = Check("T has a fixed point iff some constant map commutes with T",
                       has_fp == bool(commuters),
                       {"fixed points of T": [img.points[i] for i in fixed_points(T)],
                        "commuting constants": [img.points[c] for c in commuters]})
    report = VerdictReport("constant-commuter", [], conclusion)
    if pair.S.is_constant and commuting_witness(pair.S, T) is None:
        c = pair.S.table[0]
        report.evidence.append(Check("value of the commuting constant S is a fixed point of T", T.table[c] == c,
                                     img.points[c]))
    return report


def _commuting_contraction_fp(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = commuting_witness(S, T)
    contr, _ = _coefficient_check(pair, "linear", alpha, ONE, "d(Sx,Sy) <= alpha d(Tx,Ty), alpha in (0,1)")
    hyps = [
        _finite_check(pair.image),
        Check("S commutes with T", w is None, None if w is None else _pt(pair, w)),
        _contains(S, T, "S(X) subset of T(X)"),
        contr,
    ]
    fps = fixed_points(T)
    return VerdictReport("commuting-contraction-fixed-point", hyps,
                         Check("T has a fixed point", bool(fps), [_pt(pair, i) for i in fps]))


def _fixed_point_commuting_contraction(pair, alpha=None, k=None) -> VerdictReport:
    T = pair.T
    fps = fixed_points(T)
    hyps = [Check("T has a fixed point", bool(fps), [_pt(pair, i) for i in fps])]
    if fps:
        S = SelfMap.constant(pair.image, fps[0])
        witness_pair = MapPair(S, T, pair.metric)
        inner = _commuting_contraction_fp(witness_pair, alpha)
        ok = all(h.holds for h in inner.hypotheses)
        conclusion = Check("some S commutes with T, S(X) subset of T(X), and satisfies the contraction",
                           ok, {"S constant at": _pt(pair, fps[0])})
    else:
        conclusion = Check("some S commutes with T, S(X) subset of T(X), and satisfies the contraction",
                           False, None)
    return VerdictReport("fixed-point-commuting-contraction", hyps, conclusion)


def _commuting_iterate_contraction(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = commuting_witness(S, T)
    contr, _ = _iterate_check(pair, alpha, k, "d(S^k x, S^k y) <= alpha d(Tx,Ty), alpha in (0,1), some k")
    hyps = [
        _finite_check(pair.image),
        Check("S commutes with T", w is None, None if w is None else _pt(pair, w)),
        _contains(S, T, "S(X) subset of T(X)"),
        contr,
    ]
    return VerdictReport("commuting-iterate-contraction", hyps, _some_cfp(S, T))


def _iterate_contraction_fp(pair, alpha=None, k=None) -> VerdictReport:
    S = pair.S
    img = pair.image
    ident = SelfMap.identity(img)
    sub = MapPair(S, ident, pair.metric)
    contr, _ = _iterate_check(sub, alpha, k, "d(S^n x, S^n y) <= K d(x,y), K in (0,1), some n")
    hyps = [Check("S is digitally continuous", is_continuous(img, S)), contr]
    fps = fixed_points(S)
    return VerdictReport("iterate-contraction-unique-fixed-point", hyps,
                         Check("S has a unique fixed point", len(fps) == 1, [img.points[i] for i in fps]))


def _constant_shrinkage_cfp(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    img, m = pair.image, pair.metric
    is_lp = m.kind == "lp"
    w = commuting_witness(S, T)
    hyps = [
        Check("d is an l_p metric", is_lp, m.name()),
        Check("X is c_u-connected", is_connected(img)),
        Check("T is digitally continuous", is_continuous(img, T)),
        Check("S commutes with T", w is None, None if w is None else _pt(pair, w)),
        _contains(S, T, "S(X) subset of T(X)"),
    ]
    if is_lp:
        bound = shrinkage_bound(img.u, m)
        contr, _ = _coefficient_check(pair, "linear", alpha, bound, f"d(Sx,Sy) <= alpha d(Tx,Ty), alpha in (0,{bound})")
        hyps.append(contr)
    cfp = common_fixed_points(S, T)
    conclusion = Check("S is constant and S, T have a unique common fixed point",
                       S.is_constant and len(cfp) == 1, [img.points[i] for i in cfp])
    return VerdictReport("constant-shrinkage-common-fixed-point", hyps, conclusion)


def _commuting_reverse_contraction(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = commuting_witness(S, T)
    swapped = MapPair(T, S, pair.metric)
    contr, _ = _coefficient_check(swapped, "linear", alpha, ONE, "d(Tx,Ty) <= alpha d(Sx,Sy), alpha in (0,1)")
    hyps = [
        _finite_check(pair.image),
        Check("S and T commute", w is None, None if w is None else _pt(pair, w)),
        _contains(T, S, "T(X) subset of S(X)"),
        contr,
    ]
    return VerdictReport("commuting-reverse-contraction", hyps, _some_cfp(S, T))


def _commuting_reverse_iterate(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = commuting_witness(S, T)
    contr, _ = _iterate_check(pair, alpha, k, "d(T^k x, T^k y) <= alpha d(Sx,Sy), alpha in (0,1), some k",
                              swap=True)
    hyps = [
        _finite_check(pair.image),
        Check("S and T commute", w is None, None if w is None else _pt(pair, w)),
        _contains(T, S, "T(X) subset of S(X)"),
        contr,
    ]
    return VerdictReport("commuting-reverse-iterate-contraction", hyps, _unique_cfp(S, T))


_LIMITATION = ("limited: with T digitally continuous, an l_p metric and coefficient below 1/u^(1/p), "
               "S is forced to be constant")


def _weak_compatible_ea(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = weak_compatibility_witness(S, T)
    contr, _ = _coefficient_check(pair, "linear", alpha, ONE, "d(Sx,Sy) <= mu d(Tx,Ty), mu in (0,1)")
    hyps = [
        Check("S and T are weakly compatible", w is None, None if w is None else _pt(pair, w)),
        contr,
        Check("S and T satisfy property E.A.", satisfies_EA(S, T)),
        Check("T(X) is closed (every subset of a finite space is)", True),
    ]
    return VerdictReport("weak-compatible-ea-fixed-point", hyps, _unique_cfp(S, T),
                         notes=[_LIMITATION], flags={FINITE_REDUCTION})


def _weak_compatible_clrt(pair, alpha=None, k=None) -> VerdictReport:
    S, T = pair.S, pair.T
    w = weak_compatibility_witness(S, T)
    contr, _ = _coefficient_check(pair, "linear", alpha, ONE, "d(Sx,Sy) <= mu d(Tx,Ty), mu in (0,1)")
    hyps = [
        Check("S and T are weakly compatible", w is None, None if w is None else _pt(pair, w)),
        contr,
        Check("S and T satisfy property CLRT", satisfies_CLRT(S, T)),
    ]
    return VerdictReport("weak-compatible-clrt-fixed-point", hyps, _unique_cfp(S, T),
                         notes=[_LIMITATION], flags={FINITE_REDUCTION})


def _shrinkage(pair, alpha=None, k=None) -> VerdictReport:
    return verify_shrinkage(pair.image, pair.metric, pair.T, pair.S, alpha)


THEOREMS: dict[str, Callable[..., VerdictReport]] = {
    "compatible-common-fixed-point": _compatible_cfp,
    "weak-compatible-common-fixed-point": _weak_compatible_cfp,
    "coincidence-substitution": _coincidence_substitution,
    "compatible-coincidence-equalities": _coincidence_equalities,
    "constant-commuter": _constant_commuter,
    "commuting-contraction-fixed-point": _commuting_contraction_fp,
    "fixed-point-commuting-contraction": _fixed_point_commuting_contraction,
    "commuting-iterate-contraction": _commuting_iterate_contraction,
    "iterate-contraction-unique-fixed-point": _iterate_contraction_fp,
    "constant-shrinkage-common-fixed-point": _constant_shrinkage_cfp,
    "commuting-reverse-contraction": _commuting_reverse_contraction,
    "commuting-reverse-iterate-contraction": _commuting_reverse_iterate,
    "weak-compatible-ea-fixed-point": _weak_compatible_ea,
    "weak-compatible-clrt-fixed-point": _weak_compatible_clrt,
    "shrinkage": _shrinkage,
}

# Names under which the same results are commonly cited.
THEOREM_ALIASES = {
    "correctedRJRcompatibleThm": "compatible-common-fixed-point",
    "correctedRJRweakCompatibleThm": "weak-compatible-common-fixed-point",
    "substLemma": "coincidence-substitution",
    "correctedEgeEtal4.10": "compatible-coincidence-equalities",
    "commuteThm": "constant-commuter",
    "modifiedRJ3.1.4": "commuting-contraction-fixed-point",
    "modifiedRJ3.1.4-converse": "fixed-point-commuting-contraction",
    "commuteCor1": "commuting-iterate-contraction",
    "commuteCor2": "iterate-contraction-unique-fixed-point",
    "commuteConstant": "constant-shrinkage-common-fixed-point",
    "correctedEgeEtal3.2": "commuting-reverse-contraction",
    "correctedEgeEtal3.3": "commuting-reverse-iterate-contraction",
    "JRassert3": "weak-compatible-ea-fixed-point",
    "JR3.4.2": "weak-compatible-clrt-fixed-point",
}


def resolve_theorem(theorem_id: str) -> str:
    name = THEOREM_ALIASES.get(theorem_id, theorem_id)
    if name not in THEOREMS:
        raise InvalidInput(f"unknown theorem {theorem_id!r}")
    return name


def theorem_verdict(theorem_id: str, pair: MapPair, alpha=None, k: int | None = None) -> VerdictReport:
    """Evaluate a registered theorem on one pair.

    ``alpha`` fixes the contraction coefficient; when omitted the hypothesis is
    existential and is decided from the exact tight ratio.  ``k`` likewise fixes
    the iterate exponent for the iterate forms.
    """
    return THEOREMS[resolve_theorem(theorem_id)](pair, alpha=alpha, k=k)


# --- shrinkage and expansive maps -----------------------------------------------------------


def verify_shrinkage(img: DigitalImage, metric: Metric, T: SelfMap, S: SelfMap, alpha=None) -> VerdictReport:
    """A contraction against a continuous T on a connected image, below ``1/u^(1/p)``, forces S constant."""
    if S.image != img or T.image != img:
        raise InvalidInput("maps are not defined on this image")
    is_lp = metric.kind == "lp"
    hyps = [
        Check("d is an l_p metric", is_lp, metric.name()),
        Check("X is c_u-connected", is_connected(img)),
        Check("T is digitally continuous", is_continuous(img, T)),
    ]
    notes = []
    if is_lp:
        bound = shrinkage_bound(img.u, metric)
        if metric.p is None:
            notes.append("l_inf uses the convention 1/u^(1/inf) = 1")
        pair = MapPair(S, T, metric)
        if alpha is not None:
            a = alpha if isinstance(alpha, ExactScalar) else ExactScalar(Fraction(alpha))
            hyps.append(Check(f"0 < alpha < 1/u^(1/p) = {bound}", ZERO < a < bound, str(a)))
            res = contraction_check(pair, ContractionSpec("linear", a))
            hyps.append(Check("d(Sx,Sy) <= alpha d(Tx,Ty)", res.holds,
                              None if res.holds else [img.points[i] for i in res.witness],
                              f"tight ratio {res.tight_ratio}"))
        else:
            check, _ = _coefficient_check(pair, "linear", None, bound,
                                          f"d(Sx,Sy) <= alpha d(Tx,Ty) for some alpha in (0,{bound})")
            hyps.append(check)
    conclusion = Check("S is constant", S.is_constant, [img.points[i] for i in sorted(S.range)])
    return VerdictReport("shrinkage", hyps, conclusion, notes=notes)


def no_onto_expansive(img: DigitalImage, metric: Metric, k) -> VerdictReport:
    """Enumerate every onto self-map and confirm none has ``d(Tx,Ty) >= k d(x,y)``."""
    if len(img) > MAX_ONTO_SIZE:
        raise InvalidInput(f"onto enumeration capped at {MAX_ONTO_SIZE} points")
    k = Fraction(k)
    hyps = [
        Check("k > 1", k > 1, str(k)),
        Check("|X| >= 2 (a singleton is degenerate: the identity is vacuously expansive)", len(img) >= 2, len(img)),
    ]
    ident = SelfMap.identity(img)
    found = None
    for perm in permutations(range(len(img))):
        T = SelfMap(img, perm)
        res = contraction_check(MapPair(T, ident, metric), ContractionSpec("expansive", k))
        if res.holds:
            found = T
            break
    conclusion = Check("no onto self-map is expansive", found is None,
                       None if found is None else [img.points[i] for i in found.table])
    report = VerdictReport("expansive-onto", hyps, conclusion)
    if len(img) < 2:
        report.notes.append("degenerate: singleton image")
    return report
