import json
import subprocess
import sys

import pytest

from ncgx.errors import SchemaError
from ncgx.harness import build_fixture, bundled_names, emit, load_fixture, report_dict, run_suite
from ncgx.harness.cli import main
from ncgx.harness.fixtures import read_fixture_json
from ncgx.harness.suites import PLUMBING


def run(argv):
    from io import StringIO
    out = StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def test_bundled_fixtures():
    assert bundled_names() == ["even-tilde", "negative-firstorder", "noninvariant", "torus", "z2-basic"]


@pytest.mark.parametrize("name,code", [("even-tilde", 0), ("noninvariant", 0), ("negative-firstorder", 1)])
def test_exit_codes(name, code):
    assert run(["verify", name])[0] == code


def test_z2_basic_fails_only_first_order():
    rep = run_suite(load_fixture("z2-basic"))
    failed = sorted(c.id for c in rep.failures())
    assert failed == ["crossed order 1", "order 1", "reduced order 1"]
    na = [c for c in rep.checks if c.anchor == PLUMBING]
    assert na and all(c.report_only and c.passed for c in na)


def test_negative_firstorder_witness():
    code, text = run(["verify", "negative-firstorder", "--suite", "orders", "--format", "json"])
    d = json.loads(text)
    chk = next(c for c in d["checks"] if c["id"] == "order 1")
    assert code == 1 and not chk["passed"]
    assert chk["witness"] == {"a": -2, "b": -2, "residual": 4.0}


def test_json_is_deterministic_and_round_trips():
    a = run(["verify", "even-tilde", "--format", "json", "--seed", "3"])[1]
    b = run(["verify", "even-tilde", "--format", "json", "--seed", "3"])[1]
    assert a == b
    d = json.loads(a)
    assert d["schema"] == "ncgx.report/1" and d["seed"] == 3
    assert d["summary"]["failed"] == 0
    assert json.loads(json.dumps(d)) == d
    assert all(c["anchor"] for c in d["checks"])


def test_text_summary_line():
    code, text = run(["verify", "noninvariant", "--suite", "crossed"])
    assert code == 0
    assert text.strip().splitlines()[-1].endswith("report-only")


def test_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["verify", str(p)])[0] == 2
    assert run(["verify", "no-such-fixture"])[0] == 2


def test_schema_violation_exits_2(tmp_path):
    raw = read_fixture_json("z2-basic")
    raw["representation"] = "pi3"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    assert run(["verify", str(p)])[0] == 2


def test_schema_errors():
    raw = read_fixture_json("torus")
    with pytest.raises(SchemaError):
        build_fixture({**raw, "schema": "other/1"})
    bad = json.loads(json.dumps(raw))
    del bad["action"]["theta_over_2pi"]
    with pytest.raises(SchemaError):
        build_fixture(bad)
    bad = json.loads(json.dumps(raw))
    bad["orientation"]["chain"]["terms"][0]["labels"] = [9, 0, 1]
    with pytest.raises(SchemaError):
        build_fixture(bad).orientation_chain()


def test_ko_command():
    code, text = run(["ko", "even-tilde"])
    assert code == 0
    assert "predicted 7" in text


def test_orient_command():
    code, text = run(["orient", "torus"])
    d = json.loads(text)
    assert code == 0
    assert d["M"] == [0.0, -2.0]
    assert d["boundary_residual"] < 1e-12


def test_report_dict_counts():
    rep = run_suite(load_fixture("noninvariant"), "axioms")
    d = report_dict(rep)
    s = d["summary"]
    assert s["checks"] == s["passed"] + s["failed"] + s["report_only"]
    assert emit(rep, "json") == emit(rep, "json")


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "ncgx.harness.cli", "verify", "noninvariant", "--suite", "axioms"],
                       capture_output=True, text=True)
    assert r.returncode == 0
