import csv
import json
from importlib import resources

import pytest

from symtrace.cli import main

CORPUS = resources.files("symtrace").joinpath("corpus")


def c(name):
    return str(CORPUS.joinpath(f"{name}.json"))


def test_case(capsys):
    assert main(["case", c("nu_minus2")]) == 0
    assert capsys.readouterr().out.strip() == "case1"
    assert main(["case", c("shift_abs2"), c("shift_back")]) == 0
    assert capsys.readouterr().out.strip() == "case3'"


def test_res(capsys):
    assert main(["res", c("res_inv1")]) == 0
    assert capsys.readouterr().out.strip() == "res = 2.0"


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "terms": [ {"degree": } ] }')
    assert main(["fp", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_precondition_exit_code(capsys):
    # the finite part of a multiplier file works through its symbol; a non-trace-class
    # word has no operator trace
    assert main(["tr", c("abs1")]) == 3


def test_run_record_reproducible(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        assert main(["zeta", c("inv_cube"), "--P", c("P_k2p1"), "--laurent-order", "1",
                     "--out", str(path)]) == 0
        outs.append(json.loads(path.read_text()))
    a, b = outs
    assert a["outputs"] == b["outputs"]
    assert a["errors"] == b["errors"]
    assert a["inputs"]["A"]["sha256"] == b["inputs"]["A"]["sha256"]
    assert set(a) == {"command", "inputs", "config", "outputs", "errors", "version", "timestamp"}
    assert a["outputs"]["coefficients"]["0"][0] == pytest.approx(2.4041138063191885, abs=1e-9)


def test_heat_csv(tmp_path):
    out = tmp_path / "heat.csv"
    assert main(["heat", c("inv_cube"), "--P", c("P_k2p1"), "--tmin", "0.01", "--tmax", "1",
                 "--per-octave", "2", "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "re", "im", "tail_bound"]
    assert len(rows) > 10


def test_logdet_and_defect(capsys, tmp_path):
    assert main(["logdet", "--P", c("P_k2p1")]) == 0
    assert "log det = 6.27944693" in capsys.readouterr().out
    assert main(["defect", c("abs1"), "--P", c("P_k2p1"), "--Pprime", c("P_k2p2")]) == 0
    out = capsys.readouterr().out
    assert "residue formula = 1" in out


def test_suite_subset(tmp_path, capsys):
    path = tmp_path / "suite.json"
    assert main(["suite", "--criteria", "4", "--out", str(path)]) == 0
    assert "[PASS] criterion  4" in capsys.readouterr().out
    rec = json.loads(path.read_text())
    assert rec["outputs"]["passed"] == 1


def test_suite_failure_exit_code(capsys):
    # tolerances scaled to zero cannot be met by any floating-point computation
    assert main(["suite", "--criteria", "4", "--tol-scale", "0"]) == 5
