from __future__ import annotations

import csv
import dataclasses
import json
import math

import numpy as np
import pytest

from wshift import weights
from wshift.cli import main
from wshift.report import Report
from wshift.weights import TailRadii

BERGMAN = {"kind": "unilateral", "tail": {"builtin": "bergman"}}
WILLIAMS = {"kind": "unilateral", "tail": {"builtin": "williams_gap"}}
ONE_TWO_THREE = {"kind": "unilateral", "prefix": [1, 2, 3], "tail": 3}
CONSTANT_TWO = {"kind": "unilateral", "tail": 2}
CONSTANT_ONE = {"kind": "unilateral", "tail": 1}
BILATERAL = {"kind": "bilateral", "tail_pos": 1, "tail_neg": 1}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def unit_builtin(name):
    return dataclasses.replace(
        weights.BUILTINS[name],
        log_weights=lambda lo, hi: np.zeros(max(hi - lo, 0)),
        weight=lambda t: 1.0,
        radii=TailRadii(1.0, 1.0, 1.0, 1.0),
        sup=1.0,
        inf=1.0,
    )


# --- analyze ----------------------------------------------------------------------


def test_analyze_bergman(capsys, write_spec):
    code, out, _ = run(capsys, "analyze", write_spec(BERGMAN))
    assert code == 0
    doc = json.loads(out)
    assert doc["picture"]["spectrum"] == {"type": "disc", "radius": 1.0, "edge": "included"}
    assert doc["bpe"]["Ba"] == {"type": "disc", "radius": 1.0, "edge": "excluded"}
    assert doc["classes"]["hyponormal"] and not doc["classes"]["normal"]
    # parse and re-serialize byte for byte
    assert Report.loads(out).dumps() == out


def test_analyze_is_deterministic_and_writes_files(capsys, write_spec, tmp_path):
    path = write_spec(BERGMAN)
    _, first, _ = run(capsys, "analyze", path)
    target, samples = tmp_path / "out.json", tmp_path / "edges.csv"
    code, out, _ = run(capsys, "analyze", path, "--out", target, "--boundary-samples", samples, "--samples", 8)
    assert code == 0 and out == ""
    assert target.read_text() == first
    assert not list(tmp_path.glob("*.tmp"))
    rows = list(csv.DictReader(samples.open()))
    assert list(rows[0]) == ["region", "circle_role", "radius", "theta", "re", "im"]
    for row in rows:
        z = complex(float(row["re"]), float(row["im"]))
        assert abs(abs(z) - float(row["radius"])) <= 1e-12
    assert {r["region"] for r in rows} >= {"spectrum", "Ba"}


def test_analyze_williams_annotation(capsys, write_spec):
    code, out, _ = run(capsys, "analyze", write_spec(WILLIAMS))
    assert code == 0
    doc = json.loads(out)
    assert any("negative answer to Williams' question" in a for a in doc["annotations"])
    assert doc["radii"]["r1"] == 0.0 and doc["radii"]["r2"] == 1.0
    assert doc["radii"]["r"] == pytest.approx(math.e)


@pytest.mark.parametrize("text", [
    "{not json",
    '{"kind": "unilateral"}',
    '{"kind": "sideways", "tail": 1}',
    '{"kind": "unilateral", "tail": -1}',
    '{"kind": "unilateral", "tail": {"expr": "n +"}}',
])
def test_malformed_specs_exit_2(capsys, write_spec, tmp_path, text):
    target = tmp_path / "never.json"
    code, out, err = run(capsys, "analyze", write_spec(text), "--out", target)
    assert code == 2
    assert out == "" and err.startswith("wshift: ")
    assert not target.exists()


def test_missing_file_exits_2(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", tmp_path / "absent.json")
    assert code == 2 and out == ""


# --- classify ---------------------------------------------------------------------


def test_classify_examples(capsys, write_spec):
    code, out, _ = run(capsys, "classify", write_spec(BERGMAN))
    assert code == 0
    assert json.loads(out)["classes"]["subnormal_certificate"]["verdict"] == "consistent_subnormal"

    code, out, _ = run(capsys, "classify", write_spec(ONE_TWO_THREE))
    assert code == 3
    cert = json.loads(out)["classes"]["subnormal_certificate"]
    assert cert["verdict"] == "not_subnormal"
    assert cert["witness"]["minor_order"] == 3

    code, out, _ = run(capsys, "classify", write_spec(CONSTANT_TWO))
    classes = json.loads(out)["classes"]
    assert code == 0 and classes["hyponormal"] and not classes["normal"]


def test_classify_bilateral(capsys, write_spec):
    code, out, _ = run(capsys, "classify", write_spec(BILATERAL), "--hankel-order", 3)
    classes = json.loads(out)["classes"]
    assert code == 0 and classes["normal"]
    assert classes["subnormal_certificate"]["necessary_only"]


# --- oracle -----------------------------------------------------------------------


def test_oracle_single_point(capsys, write_spec):
    code, out, _ = run(capsys, "oracle", write_spec(CONSTANT_ONE), "--lambda", "0.5,0")
    assert code == 0
    probe = json.loads(out)["probes"][0]
    assert 0.5 <= probe["sigma_min"] <= 0.867
    assert probe["verdict"] == "outside" and probe["agrees"]


def test_oracle_bilateral_grid(capsys, write_spec):
    code, out, _ = run(capsys, "oracle", write_spec(BILATERAL), "--grid", "8x16", "--dim", 300)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["probes"]) == 128
    assert doc["grid"]["agreement"] >= 0.95


def test_oracle_budget_and_arguments(capsys, write_spec):
    path = write_spec(CONSTANT_ONE)
    code, out, _ = run(capsys, "oracle", path, "--lambda", "0.5", "--dim", 10**9)
    assert code == 4 and out == ""
    assert run(capsys, "oracle", path)[0] == 2
    assert run(capsys, "oracle", path, "--lambda", "a,b")[0] == 2
    assert run(capsys, "oracle", path, "--grid", "0x4")[0] == 2


# --- counterexample and reference values ----------------------------------------------


def test_counterexample_passes(capsys):
    code, out, _ = run(capsys, "counterexample")
    assert code == 0
    checks = {c["quantity"]: c for c in json.loads(out)["checks"]}
    assert all(c["pass"] for c in checks.values())
    assert checks["r2_numeric"]["value"] == pytest.approx(1.0, abs=1e-9)


def test_counterexample_rejects_small_factorials(capsys):
    assert run(capsys, "counterexample", "--factorial-max", 2)[0] == 2


def test_tampered_counterexample_is_caught(capsys, monkeypatch):
    monkeypatch.setitem(weights.BUILTINS, "williams_gap", unit_builtin("williams_gap"))
    code, _, err = run(capsys, "counterexample")
    assert code == 6
    assert "r1" in err


def test_verify_paper(capsys):
    code, out, _ = run(capsys, "verify-paper")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3
    assert all(line.startswith("PASS") for line in lines)


def test_verify_paper_detects_corruption(capsys, monkeypatch):
    monkeypatch.setitem(weights.BUILTINS, "bergman", unit_builtin("bergman"))
    code, out, _ = run(capsys, "verify-paper")
    assert code == 1
    assert any(line.startswith("FAIL") and "bergman" in line for line in out.splitlines())


def test_theorem_index_command(capsys, tmp_path):
    code, out, _ = run(capsys, "theorem-index")
    assert code == 0 and out.startswith("# Operation index")
    target = tmp_path / "index.md"
    assert run(capsys, "theorem-index", "--out", target)[0] == 0
    assert target.read_text() == out
