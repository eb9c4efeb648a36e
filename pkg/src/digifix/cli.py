"""Command-line interface.

    digifix verify-metric FILE
    digifix check-pair FILE [--properties commute,weak,compat,A,B,C,P,EA,CLRT]
    digifix fixed-points FILE [--map NAME ...]
    digifix theorem NAME FILE [--alpha NUM/DEN] [--k INT]
    digifix audit PREDICATE --max-size N --dims D --u U --metric M [--seed S] [--budget B]
    digifix repro {nonstd-metric,less-not-cocontinuous,ege-4.10-counterexample,ege-4.11-counterexample}

Every command prints a human-readable report and, with ``--json PATH``, writes
the same records as JSON.  Exit status: 0 when every check holds, 1 when the
report contains a violation or counterexample, 2 on invalid input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import engine, search
from .image import DigitalImage, InvalidInput, SelfMap, discontinuities, fixed_points, is_continuous
from .instance import Instance, canonical_json, instance_digest, jsonable, parse_instance, parse_rational
from .metrics import Metric, distance, truncated_limit_trace, verify_metric_axioms
from .properties import PROPERTY_NAMES, MapPair, check_properties, contraction_ratio
from .report import VerdictReport

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2

EXAMPLES = ("nonstd-metric", "less-not-cocontinuous", "ege-4.10-counterexample", "ege-4.11-counterexample")


class Report:
    """Ordered verdict records plus flags; a record with ``violation`` set forces exit status 1."""

    def __init__(self, command: Sequence[str], instance: Instance | None = None):
        self.command = list(command)
        self.digest = instance_digest(instance) if instance is not None else None
        self.records: list[dict[str, Any]] = []
        self.flags: set[str] = set()
        self.notes: list[str] = []
        self.extra: dict[str, Any] = {}

    def add(self, label: str, holds: bool, witness: Any = None, detail: str = "",
            violation: bool | None = None, role: str = "check") -> None:
        self.records.append({
            "label": label,
            "role": role,
            "holds": bool(holds),
            "violation": (not holds) if violation is None else bool(violation),
            "witness": jsonable(witness),
            "detail": detail,
        })

    def add_verdict(self, report: VerdictReport) -> None:
        for h in report.hypotheses:
            self.add(h.label, h.holds, h.witness, h.detail, violation=False, role="hypothesis")
        self.add(report.conclusion.label, report.conclusion.holds, report.conclusion.witness,
                 report.conclusion.detail, violation=report.applicable and not report.conclusion.holds,
                 role="conclusion")
        for e in report.evidence:
            self.add(e.label, e.holds, e.witness, e.detail, violation=report.applicable and not e.holds,
                     role="evidence")
        self.notes.extend(report.notes)
        self.flags |= report.flags
        self.extra["theorem"] = report.theorem_id
        self.extra["applicable"] = report.applicable

    @property
    def violations(self) -> int:
        return sum(r["violation"] for r in self.records)

    def to_json(self, elapsed: float | None = None) -> dict:
        out = {
            "command": self.command,
            "instance_digest": self.digest,
            "records": self.records,
            "flags": sorted(self.flags),
            "notes": self.notes,
            "violations": self.violations,
            **jsonable(self.extra),
        }
        if elapsed is not None:
            out["timing_seconds"] = round(elapsed, 6)
        return out

    def text(self) -> str:
        lines = []
        for r in self.records:
            mark = "FAIL" if r["violation"] else ("ok" if r["holds"] else "no")
            line = f"[{mark:>4}] {r['role']}: {r['label']}"
            if r["witness"] is not None:
                line += f"  witness={json.dumps(r['witness'])}"
            if r["detail"]:
                line += f"  ({r['detail']})"
            lines.append(line)
        lines.extend(f"note: {n}" for n in self.notes)
        if self.flags:
            lines.append("flags: " + ", ".join(sorted(self.flags)))
        lines.append(f"violations: {self.violations}")
        return "\n".join(lines)


def _points(img: DigitalImage, witness):
    """Index witnesses (an int or a tuple of ints) as coordinates."""
    if witness is None:
        return None
    if isinstance(witness, int):
        return img.points[witness]
    return [img.points[i] for i in witness]


def load_instance(path: str) -> Instance:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(raw)


def load_fixture(name: str) -> Instance:
    return parse_instance(resources.files("digifix").joinpath("fixtures", name).read_bytes())


def _pair(inst: Instance) -> MapPair:
    return MapPair(inst.map("S"), inst.map("T"), inst.metric)


# --- commands -------------------------------------------------------------------------------


def cmd_verify_metric(args, argv) -> Report:
    inst = load_instance(args.file)
    report = Report(argv, inst)
    verdict = verify_metric_axioms(inst.image, inst.metric)
    for c in verdict.evidence:
        report.add(c.label, c.holds, c.witness)
    report.flags |= verdict.flags
    return report


def cmd_check_pair(args, argv) -> Report:
    inst = load_instance(args.file)
    names = [n.strip() for n in args.properties.split(",") if n.strip()]
    report = Report(argv, inst)
    checks, flags = check_properties(_pair(inst), names)
    for c in checks:
        report.add(c.label, c.holds, _points(inst.image, c.witness), c.detail)
    report.flags |= flags
    return report


def cmd_fixed_points(args, argv) -> Report:
    inst = load_instance(args.file)
    img = inst.image
    report = Report(argv, inst)
    names = args.map or sorted(inst.maps)
    for name in names:
        fps = fixed_points(inst.map(name))
        report.add(f"{name} has a fixed point", bool(fps), [img.points[i] for i in fps])
    if not args.map and "S" in inst.maps and "T" in inst.maps:
        cfp = engine.common_fixed_points(inst.maps["S"], inst.maps["T"])
        report.add("S and T have a common fixed point", bool(cfp), [img.points[i] for i in cfp])
    return report


def cmd_theorem(args, argv) -> Report:
    inst = load_instance(args.file)
    alpha = None if args.alpha is None else parse_rational(args.alpha, "--alpha")
    if args.k is not None and args.k < 1:
        raise InvalidInput("--k must be a positive integer")
    report = Report(argv, inst)
    report.add_verdict(engine.theorem_verdict(args.name, _pair(inst), alpha, args.k))
    return report


def _int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise InvalidInput(f"{flag}: expected comma-separated integers, got {text!r}") from None
    if not values:
        raise InvalidInput(f"{flag}: empty list")
    return values


def parse_metric(text: str) -> Metric:
    t = text.strip().lower()
    if t in ("linf", "l_inf", "inf"):
        return Metric.lp(None)
    if t == "harmonic":
        return Metric.harmonic()
    if t.startswith("l") and t[1:].lstrip("_").isdigit():
        return Metric.lp(int(t[1:].lstrip("_")))
    raise InvalidInput(f"--metric: unknown metric {text!r} (use l1, l2, ..., linf, harmonic)")


def _default_side(dim: int) -> int:
    return {1: 5, 2: 3}.get(dim, 2)


def cmd_audit(args, argv) -> Report:
    dims = _int_list(args.dims, "--dims")
    sides = _int_list(args.box, "--box") if args.box else tuple(_default_side(d) for d in dims)
    space = search.SweepSpace(
        dims=dims,
        sides=sides,
        sizes=(args.min_size, args.max_size),
        us=_int_list(args.u, "--u"),
        metrics=tuple(parse_metric(m) for m in args.metric.split(",")),
        seed=args.seed,
        budget=args.budget,
    )
    params = {}
    for key, value in (("k", args.k), ("mu_max", args.mu_max), ("alpha", args.alpha),
                       ("alpha_factor", args.alpha_factor)):
        if value is not None:
            params[key] = parse_rational(value, f"--{key.replace('_', '-')}")
    if args.workers < 1:
        raise InvalidInput("--workers must be positive")
    finding = search.audit(args.predicate, space, params, workers=args.workers)
    report = Report(argv)
    found = finding.verdict == search.COUNTEREXAMPLE
    report.add(f"audit {finding.predicate_id}: {finding.verdict}", not found, finding.witness,
               f"{finding.checked} instances, {finding.applicable} satisfy the hypotheses, "
               + ("exhaustive at this size" if finding.exhaustive else "seeded random sample"),
               role="audit")
    if finding.unproven:
        report.notes.append("unproven assertion: the finding is reported without an expected outcome")
    report.extra["finding"] = finding.to_json()
    return report


# --- reproductions of the worked examples ---------------------------------------------------


def _interval_instance(lo: int, hi: int, metric: Metric, **tables) -> Instance:
    img = DigitalImage.interval(lo, hi)
    return Instance(img, metric, {name: SelfMap(img, tuple(t)) for name, t in tables.items()})


def repro_nonstd_metric(n: int = 10, argv: Sequence[str] = ()) -> Report:
    """Harmonic metric on {0..n}: axioms hold, d(k,0) = 1/k -> 0, yet d(f(k), f(0)) = 1 - 1/(k+1) -> 1."""
    if n < 3:
        raise InvalidInput("truncation bound must be at least 3")
    m = Metric.harmonic()
    inst = _interval_instance(0, n, m, f=[min(i + 1, n) for i in range(n + 1)])
    img, f = inst.image, inst.maps["f"]
    report = Report(argv, inst)
    axioms = verify_metric_axioms(img, m)
    report.add(f"harmonic distance is a metric on {{0..{n}}}", axioms.conclusion.holds, axioms.conclusion.witness)
    to_zero = truncated_limit_trace(m, SelfMap.identity(img), (0,))
    ok = all(d == Fraction(1, k) for k, d in enumerate(to_zero, 1))
    report.add("d(k, 0) = 1/k, decreasing to 0", ok, [str(d) for d in to_zero])
    gaps = [distance(m, f.point(k), f.point(0)) for k in range(1, n)]
    ok = all(d == 1 - Fraction(1, k + 1) for k, d in enumerate(gaps, 1))
    report.add("d(f(k), f(0)) = 1 - 1/(k+1), increasing to 1", ok, [str(d) for d in gaps],
               "f(k) = k+1, capped at the truncation bound")
    steps = all(abs(f.point(k)[0] - f.point(k + 1)[0]) == 1 for k in range(n - 1))
    report.add(f"f is c_1-continuous on {{0..{n - 1}}} (consecutive images are adjacent)", steps)
    report.add(f"f is c_1-continuous as a self-map of {{0..{n}}}", is_continuous(img, f))
    images = truncated_limit_trace(m, f, (0,))[: n - 1]
    report.add("d(0, f(k)) tends to 0 while f(0) = 1, so the limit is not f(0)", False,
               {"d(0, f(k))": [str(d) for d in images], "f(0)": f.point(0)},
               "convergence in this metric does not pass through the continuous map f", violation=True,
               role="counterexample")
    return report


def repro_less_not_cocontinuous(argv: Sequence[str] = ()) -> Report:
    inst = load_fixture("less_not_cocontinuous.json")
    img, m = inst.image, inst.metric
    T, ident = inst.map("T"), inst.map("identity")
    p2, p3 = (2, 0, 0, 0, 0), (1, 1, 1, 1, 1)
    report = Report(argv, inst)
    ratio, unbounded = contraction_ratio(MapPair(T, ident, m), "linear")
    report.add("tight ratio of d(Tx,Ty) / d(x,y)", not unbounded, str(ratio), "smallest coefficient against the identity baseline")
    report.add("the identity is c_5-continuous", is_continuous(img, ident))
    bad = [[img.points[i], img.points[j]] for i, j in discontinuities(img, T)]
    report.add("T is c_5-continuous", not bad, bad, "pairs of adjacent points with non-adjacent images")
    report.add("(p2, p3) witnesses the discontinuity", [p2, p3] in bad or [p3, p2] in bad, [p2, p3],
               f"T(p2) = {T.point(img.index(p2))}, T(p3) = {T.point(img.index(p3))}")
    verdict = engine.verify_shrinkage(img, m, ident, T, ratio)
    for h in verdict.hypotheses:
        report.add(h.label, h.holds, h.witness, h.detail, violation=False, role="hypothesis")
    report.add(verdict.conclusion.label, verdict.conclusion.holds, verdict.conclusion.witness,
               "not forced: the coefficient is not below the bound", violation=False, role="conclusion")
    return report


def repro_ege_4_10(n: int = 10, argv: Sequence[str] = ()) -> Report:
    """S(x) = 2, T(x) = x+1 on {1..n}: a coincidence at 1 where S and T do not commute."""
    if n < 3:
        raise InvalidInput("truncation bound must be at least 3")
    inst = _interval_instance(1, n, Metric.lp(1), S=[1] * n, T=[min(i + 1, n - 1) for i in range(n)])
    img = inst.image
    S, T = inst.maps["S"], inst.maps["T"]
    pair = MapPair(S, T, inst.metric)
    report = Report(argv, inst)
    report.add("S is c_1-continuous", is_continuous(img, S))
    report.add("T is c_1-continuous", is_continuous(img, T), detail="T(x) = x+1, capped at the truncation bound")
    x = img.index((1,))
    report.add("S(1) = T(1)", S(x) == T(x), img.points[S(x)])
    s, t = S.table, T.table
    values = {"S(T(1))": img.points[s[t[x]]], "T(S(1))": img.points[t[s[x]]],
              "S(S(1))": img.points[s[s[x]]], "T(T(1))": img.points[t[t[x]]]}
    report.add("S(T(1)) = T(S(1)) = S(S(1)) = T(T(1))", len(set(values.values())) == 1, values,
               "equalities claimed for continuous maps without compatibility", role="counterexample")
    checks, flags = check_properties(pair, ("weak", "compat"))
    for c in checks:
        label = {"weak": "S and T are weakly compatible", "compat": "S and T are compatible"}[c.label]
        report.add(label, c.holds, _points(img, c.witness), c.detail)
    report.flags |= flags
    return report


def repro_ege_4_11(n: int = 10, argv: Sequence[str] = ()) -> Report:
    """S = 0, T(x) = x+1 on {0..n} with the harmonic metric; x_k = k."""
    if n < 3:
        raise InvalidInput("truncation bound must be at least 3")
    m = Metric.harmonic()
    inst = _interval_instance(0, n, m, S=[0] * (n + 1), T=[min(i + 1, n) for i in range(n + 1)])
    img = inst.image
    S, T = inst.maps["S"], inst.maps["T"]
    zero = (0,)
    report = Report(argv, inst)
    report.add("S and T are c_1-continuous", is_continuous(img, S) and is_continuous(img, T))
    t_trace = truncated_limit_trace(m, T, zero)[: n - 1]
    s_trace = truncated_limit_trace(m, S, zero)[: n - 1]
    report.add("d(T(x_k), 0) = 1/(k+1), tending to 0", all(d == Fraction(1, k + 1) for k, d in enumerate(t_trace, 1)),
               [str(d) for d in t_trace])
    report.add("d(S(x_k), 0) = 0", all(not d for d in s_trace), [str(d) for d in s_trace])
    s, t = S.table, T.table
    o = img.index(zero)
    ts = [distance(m, img.points[t[s[k]]], img.points[s[o]]) for k in range(1, n)]
    report.add("(i) T(S(x_k)) tends to S(0)", all(not d for d in ts),
               {"T(S(x_k))": img.points[t[s[1]]], "S(0)": img.points[s[o]]}, role="counterexample")
    st = [distance(m, img.points[s[t[k]]], img.points[t[o]]) for k in range(1, n)]
    report.add("(ii) S(T(x_k)) tends to T(0)", all(not d for d in st),
               {"S(T(x_k))": img.points[s[t[1]]], "T(0)": img.points[t[o]]}, role="counterexample")
    report.add("(iii) S(T(0)) = T(S(0)) and S(0) = T(0)", s[t[o]] == t[s[o]] and s[o] == t[o],
               {"S(T(0))": img.points[s[t[o]]], "T(S(0))": img.points[t[s[o]]],
                "S(0)": img.points[s[o]], "T(0)": img.points[t[o]]}, role="counterexample")
    report.notes.append(f"traces truncated at {n}; no statement is extrapolated beyond the truncation")
    return report


def cmd_repro(args, argv) -> Report:
    if args.example == "nonstd-metric":
        return repro_nonstd_metric(args.n, argv)
    if args.example == "less-not-cocontinuous":
        return repro_less_not_cocontinuous(argv)
    if args.example == "ege-4.10-counterexample":
        return repro_ege_4_10(args.n, argv)
    return repro_ege_4_11(args.n, argv)


# --- entry point ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the JSON report")

    parser = argparse.ArgumentParser(prog="digifix", description="Fixed-point verdicts on finite digital metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-metric", parents=[common], help="check the metric axioms on an instance")
    p.add_argument("file")
    p.set_defaults(run=cmd_verify_metric)

    p = sub.add_parser("check-pair", parents=[common], help="evaluate pair properties of maps S and T")
    p.add_argument("file")
    p.add_argument("--properties", default=",".join(PROPERTY_NAMES),
                   help="comma-separated subset of " + ",".join(PROPERTY_NAMES))
    p.set_defaults(run=cmd_check_pair)

    p = sub.add_parser("fixed-points", parents=[common], help="list fixed points of named maps")
    p.add_argument("file")
    p.add_argument("--map", action="append", metavar="NAME")
    p.set_defaults(run=cmd_fixed_points)

    p = sub.add_parser("theorem", parents=[common], help="evaluate a registered theorem on maps S and T")
    p.add_argument("name", help="theorem id or alias")
    p.add_argument("file")
    p.add_argument("--alpha", metavar="NUM/DEN")
    p.add_argument("--k", type=int)
    p.set_defaults(run=cmd_theorem)

    p = sub.add_parser("audit", parents=[common], help="search for counterexamples to a predicate")
    p.add_argument("predicate")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--min-size", type=int, default=1)
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.add_argument("--box", help="comma-separated box side per dimension (default 5 in Z, 3 in Z^2, else 2)")
    p.add_argument("--u", required=True, help="comma-separated adjacency parameters")
    p.add_argument("--metric", required=True, help="comma-separated: l1, l2, ..., linf, harmonic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**7, help="instance budget for exhaustive or sampled search")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--k", metavar="NUM/DEN")
    p.add_argument("--mu-max", metavar="NUM/DEN")
    p.add_argument("--alpha", metavar="NUM/DEN")
    p.add_argument("--alpha-factor", metavar="NUM/DEN")
    p.set_defaults(run=cmd_audit)

    p = sub.add_parser("repro", parents=[common], help="reproduce a worked example")
    p.add_argument("example", choices=EXAMPLES)
    p.add_argument("--n", type=int, default=10, help="truncation bound for the infinite examples")
    p.set_defaults(run=cmd_repro)
    return parser


# Flags that change where or how fast a report is produced, never its content.
_UNECHOED = ("--json", "--workers")


def _echo(argv: list[str]) -> list[str]:
    out, skip = [], False
    for arg in argv:
        if skip:
            skip = False
        elif arg in _UNECHOED:
            skip = True
        elif not arg.startswith(tuple(f + "=" for f in _UNECHOED)):
            out.append(arg)
    return out


def run_command(argv: Sequence[str]) -> tuple[int, Report | None]:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INVALID), None
    start = time.perf_counter()
    try:
        report = args.run(args, _echo(argv))
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    elapsed = time.perf_counter() - start
    print(report.text())
    if args.json:
        payload = report.to_json(elapsed if args.timing else None)
        text = json.dumps(json.loads(canonical_json(payload)), indent=2, sort_keys=True, ensure_ascii=False)
        try:
            Path(args.json).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.json}: {exc.strerror}", file=sys.stderr)
            return EXIT_INVALID, report
    return (EXIT_VIOLATION if report.violations else EXIT_OK), report


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
