import json
import subprocess
import sys

import pytest

from digifix.cli import EXIT_INVALID, EXIT_OK, EXIT_VIOLATION, main, run_command
from digifix.search import PREDICATES, Outcome, Predicate


def write(tmp_path, data, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def line(maps, n=4, metric=None):
    return {
        "points": [[i] for i in range(n + 1)],
        "adjacency": {"type": "c_u", "u": 1},
        "metric": metric or {"type": "lp", "p": 1},
        "maps": maps,
    }


def record(report, prefix):
    return next(r for r in report.records if r["label"].startswith(prefix))


def test_check_pair_identity_exits_zero(tmp_path, capsys):
    ident = list(range(5))
    code, report = run_command(["check-pair", write(tmp_path, line({"S": ident, "T": ident}))])
    assert code == EXIT_OK and report.violations == 0
    assert "violations: 0" in capsys.readouterr().out


def test_check_pair_failing_property_is_a_violation(tmp_path):
    path = write(tmp_path, line({"S": [2] * 5, "T": [1, 2, 3, 4, 4]}))
    code, report = run_command(["check-pair", path, "--properties", "weak,EA"])
    assert code == EXIT_VIOLATION
    weak = record(report, "weak")
    assert not weak["holds"] and weak["witness"] == [1]
    assert record(report, "EA")["holds"]


def test_invalid_input_exits_two(tmp_path, capsys):
    data = line({})
    data["adjacency"]["u"] = 2
    assert run_command(["verify-metric", write(tmp_path, data)]) == (EXIT_INVALID, None)
    assert "u out of range" in capsys.readouterr().err
    assert run_command(["verify-metric", str(tmp_path / "missing.json")])[0] == EXIT_INVALID
    assert run_command(["frobnicate"])[0] == EXIT_INVALID
    assert run_command(["theorem", "no-such-theorem", write(tmp_path, line({"S": [0] * 5, "T": [0] * 5}))])[0] \
        == EXIT_INVALID
    assert run_command(["audit", "many-equivalences", "--max-size", "2", "--dims", "1", "--u", "1",
                        "--metric", "cosine"])[0] == EXIT_INVALID


def test_verify_metric(tmp_path):
    code, report = run_command(["verify-metric", write(tmp_path, line({}, 20, {"type": "harmonic"}))])
    assert code == EXIT_OK and all(r["holds"] for r in report.records)
    bad = line({}, 2, {"type": "table", "entries": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})
    code, report = run_command(["verify-metric", write(tmp_path, bad)])
    assert code == EXIT_VIOLATION
    assert record(report, "triangle")["witness"]


def test_fixed_points(tmp_path):
    path = write(tmp_path, line({"S": [0, 1, 0, 0, 0], "T": [1, 1, 1, 4, 3]}))
    code, report = run_command(["fixed-points", path])
    assert code == EXIT_OK
    assert record(report, "S and T have a common")["witness"] == [[1]]
    code, report = run_command(["fixed-points", path, "--map", "T"])
    assert [r["witness"] for r in report.records] == [[[1]]]
    path = write(tmp_path, line({"S": [1, 0, 1, 1, 1], "T": [1, 1, 1, 4, 3]}), "b.json")
    assert run_command(["fixed-points", path])[0] == EXIT_VIOLATION


def test_theorem_alias_and_id(tmp_path):
    path = write(tmp_path, line({"S": [3] * 5, "T": list(range(5))}))
    by_id = run_command(["theorem", "compatible-common-fixed-point", path, "--alpha", "1/2"])
    by_alias = run_command(["theorem", "correctedRJRcompatibleThm", path, "--alpha", "1/2"])
    assert by_id[0] == by_alias[0] == EXIT_OK
    assert by_id[1].records == by_alias[1].records
    assert by_id[1].extra["applicable"]
    # failing hypotheses are not violations
    code, report = run_command(["theorem", "compatible-common-fixed-point", path, "--alpha", "3/2"])
    assert code == EXIT_OK and not report.extra["applicable"]


def test_json_report_is_byte_identical(tmp_path):
    path = write(tmp_path, line({"S": [2] * 5, "T": [1, 2, 3, 4, 4]}))
    a = tmp_path / "a.json"
    run_command(["check-pair", path, "--json", str(a)])
    first = a.read_bytes()
    run_command(["check-pair", path, "--json", str(a)])
    assert a.read_bytes() == first
    data = json.loads(a.read_text())
    assert "timing_seconds" not in data
    assert set(data) >= {"command", "instance_digest", "records", "flags", "notes", "violations"}
    run_command(["check-pair", path, "--json", str(a), "--timing"])
    assert "timing_seconds" in json.loads(a.read_text())


def test_audit_reports_finding(tmp_path):
    out = tmp_path / "audit.json"
    argv = ["audit", "manyEquivs", "--max-size", "2", "--dims", "1", "--u", "1", "--metric", "l1",
            "--json", str(out)]
    code, report = run_command(argv)
    assert code == EXIT_OK
    finding = json.loads(out.read_text())["finding"]
    assert finding["verdict"] == "confirmed-exhaustive" and finding["scope"] == "exhaustive at this size"
    assert "exhaustive at this size" in report.records[0]["detail"]
    code, report = run_command(["audit", "JRassert1(0,1)", "--max-size", "2", "--dims", "1", "--u", "1",
                                "--metric", "l1"])
    assert code in (EXIT_OK, EXIT_VIOLATION)
    assert any("unproven" in n for n in report.notes)


@pytest.fixture
def false_predicate():
    def evaluate(inst, params):
        T = inst.maps["T"]
        fixed = any(v == i for i, v in enumerate(T.table))
        return Outcome(True, not fixed, None if fixed else list(T.table))

    pred = Predicate("test:every-map-has-a-fixed-point", "maps", evaluate)
    PREDICATES[pred.id] = pred
    yield pred.id
    del PREDICATES[pred.id]


def test_audit_counterexample_exits_one(false_predicate):
    code, report = run_command(["audit", false_predicate, "--max-size", "2", "--dims", "1", "--u", "1",
                                "--metric", "l1"])
    assert code == EXIT_VIOLATION
    finding = report.extra["finding"]
    assert finding["verdict"] == "counterexample" and finding["witness"] == [1, 0]


def test_repro_nonstd_metric():
    code, report = run_command(["repro", "nonstd-metric"])
    assert code == EXIT_VIOLATION
    assert record(report, "harmonic distance is a metric")["holds"]
    assert record(report, "d(k, 0) = 1/k")["witness"][:3] == ["1", "1/2", "1/3"]
    assert record(report, "d(f(k), f(0))")["witness"][-1] == "9/10"
    assert [r["label"] for r in report.records if r["violation"]] == \
        ["d(0, f(k)) tends to 0 while f(0) = 1, so the limit is not f(0)"]


def test_repro_less_not_cocontinuous():
    code, report = run_command(["repro", "less-not-cocontinuous"])
    # the discontinuity of T is the reported violation
    assert code == EXIT_VIOLATION
    assert [r["label"] for r in report.records if r["violation"]] == ["T is c_5-continuous"]
    assert record(report, "tight ratio")["witness"] == "2/5"
    assert record(report, "(p2, p3)")["holds"]
    assert record(report, "(p2, p3)")["witness"] == [[2, 0, 0, 0, 0], [1, 1, 1, 1, 1]]
    assert not record(report, "T is c_5-continuous")["holds"]
    bound = record(report, "0 < alpha < 1/u^(1/p) = 1/5")
    assert not bound["holds"] and bound["role"] == "hypothesis"


def test_repro_ege_4_10():
    code, report = run_command(["repro", "ege-4.10-counterexample"])
    assert code == EXIT_VIOLATION
    eq = record(report, "S(T(1)) = T(S(1))")
    assert eq["witness"]["S(T(1))"] == [2] and eq["witness"]["T(S(1))"] == [3]
    weak = record(report, "S and T are weakly compatible")
    assert not weak["holds"] and weak["witness"] == [1]


def test_repro_ege_4_11():
    code, report = run_command(["repro", "ege-4.11-counterexample", "--n", "12"])
    assert code == EXIT_VIOLATION
    assert record(report, "d(T(x_k), 0)")["witness"][-1] == "1/12"
    assert not record(report, "(i) T(S(x_k)) tends to S(0)")["holds"]
    ii = record(report, "(ii)")
    assert not ii["holds"] and ii["witness"]["T(0)"] == [1]
    assert not record(report, "(iii)")["holds"]
    assert run_command(["repro", "ege-4.11-counterexample", "--n", "2"])[0] == EXIT_INVALID


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "repro" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "digifix", "repro", "less-not-cocontinuous"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_VIOLATION
    assert "2/5" in proc.stdout


def test_output_path_and_workers_are_not_echoed(tmp_path):
    argv = ["audit", "many-equivalences", "--max-size", "2", "--dims", "1", "--u", "1", "--metric", "l1"]
    run_command(argv + ["--json", str(tmp_path / "a.json"), "--workers", "1"])
    run_command(argv + [f"--json={tmp_path / 'b.json'}", "--workers=2"])
    a, b = (tmp_path / "a.json").read_bytes(), (tmp_path / "b.json").read_bytes()
    assert a == b
    assert json.loads(a)["command"] == argv
