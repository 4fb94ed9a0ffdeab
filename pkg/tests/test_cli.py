import csv
import json
import math

import pytest

from linegeom import cli, network
from linegeom.lcr import GRID_COLUMNS


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_omega_aliases():
    assert cli.parse_omega("pi") == math.pi
    assert cli.parse_omega("2pi50") == 100 * math.pi
    assert cli.parse_omega("3.5") == 3.5


def test_analyze_line_lr(capsys):
    code, out, _ = run(capsys, "analyze-line", "--r", "0.08", "--l", "0.24", "--omega", "3.14159265")
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "lr"
    assert rec["det_g"] == pytest.approx(-207.78, abs=0.01)


def test_analyze_line_rlc(capsys):
    code, out, _ = run(capsys, "analyze-line", "--r", "0.08", "--l", "0.24", "--c", "0.025")
    assert code == 0
    rec = json.loads(out)
    assert rec["coordinate_order"] == ["L", "C", "r"]
    assert rec["surface_stable"] is False


def test_input_errors(capsys):
    assert run(capsys, "analyze-line", "--r", "0", "--l", "0")[0] == 1
    assert run(capsys, "analyze-line", "--r", "0.1", "--l", "0.1", "--c", "0")[0] == 1
    assert run(capsys, "analyze-line", "--r", "0.1")[0] == 1
    assert run(capsys, "analyze-line", "--r", "0.1", "--l", "0.1", "--bogus")[0] == 1
    assert run(capsys, "sweep", "--r", "0.1", "--l", "1:2", "--c", "0.1:1:3")[0] == 1
    assert run(capsys, "analyze-line", "--r", "0.1", "--l", "0.1", "--omega", "fast")[0] == 1
    assert run(capsys)[0] == 1


def test_numerical_failure(capsys):
    X = 0.1 * (math.sqrt(2) - 1)
    code, _, err = run(capsys, "analyze-line", "--r", "0.1", "--l", str(1 + X), "--c", "1",
                       "--omega", "1", "--strict")
    assert code == 2 and "numerical failure" in err


def test_sweep_file(tmp_path, capsys):
    path = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "sweep", "--r", "1e-6", "--l", "0.01:1:50", "--c", "0.01:1:50",
                     "--omega", "1", "--output", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 2500
    assert tuple(rows[0]) == GRID_COLUMNS


def test_analyze_network(tmp_path, capsys):
    path = tmp_path / "case.json"
    path.write_text(network.dump_network(network.sample_network()))
    code, out, _ = run(capsys, "analyze-network", str(path))
    assert code == 0
    rep = json.loads(out)
    assert len(rep["lines"]) == 7
    code, text, _ = run(capsys, "analyze-network", str(path), "--format", "text")
    assert code == 0 and "LR lines" in text
    code, out2, _ = run(capsys, "analyze-network", str(path))
    assert out2 == out


def test_analyze_network_bad_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"lines": [}')
    code, _, err = run(capsys, "analyze-network", str(path))
    assert code == 1 and "line 1" in err
    assert run(capsys, "analyze-network", str(tmp_path / "missing.json"))[0] == 1


def test_verify_table1(capsys):
    code, out, err = run(capsys, "verify-paper", "--which", "table1", "--omega", "pi")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith("T")]
    assert len(lines) == 7
    assert lines[0].endswith("erratum")
    assert sum(ln.endswith("pass") for ln in lines) == 5


def test_verify_json_is_strict(capsys):
    code, out, _ = run(capsys, "verify-paper", "--which", "limits", "--format", "json")
    assert code == 0
    rep = json.loads(out, parse_constant=lambda c: pytest.fail(f"non-finite token {c}"))
    assert rep["name"] == "limits"


def test_verify_flatness(capsys):
    code, out, _ = run(capsys, "verify-paper", "--which", "flatness")
    assert code == 0 and "pass" in out


def test_recommend(capsys):
    code, out, _ = run(capsys, "recommend-c", "--r", "1", "--l", "2", "--omega", "1")
    assert code == 0 and json.loads(out)["empty"] is False
