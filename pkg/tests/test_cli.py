"""Command-line interface: reports, exit codes, config files and stable output."""

import json
import subprocess
import sys

import pytest

from padic_stringy import cli
from padic_stringy.duality import SelfDualReport


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


@pytest.mark.parametrize("argv", [
    ["orbvol", "--d", "2", "--weights", "1,1", "--q", "5"],
    ["orbvol", "--group", "Z/2 x Z/2", "--chars", "1,0;0,1", "--q", "5"],
    ["stringy", "--d", "3", "--weights", "1,2", "--q", "7"],
    ["stringy", "--d", "2", "--weights", "1,1", "--q", "5", "--gerbe", "1:1"],
    ["weil", "--model", "circle x^2+y^2=1", "--q", "5"],
    ["weil", "--poly", "x*y - 1", "--vars", "x,y", "--q", "7", "--k", "2"],
    ["twist-count", "--d", "2", "--weights", "1,1", "--q", "5", "--m", "2"],
    ["twist-count", "--model", "free swap, trivial Frobenius"],
    ["euler", "--q", "5", "--curve", "0,0,0,0,1", "--n", "3"],
    ["selfdual", "--q", "7", "--curve", "0,0,0,1,0", "--n", "2"],
    ["mirror-sim", "--fibers", "20", "--seed", "1"],
    ["mirror-sim", "--q", "5", "--curve", "0,0,0,1,0", "--n", "2", "--base-size", "5"],
])
def test_commands_pass(capsys, argv):
    code, doc = _json(capsys, *argv)
    assert code == 0
    assert doc["passed"] is True
    assert doc["command"] == argv[0]
    assert doc["checks"] and all(c["pass"] for c in doc["checks"])
    assert all(c["paper_anchor"] for c in doc["checks"])
    assert "timing" not in doc
    assert doc["field_type"] == "equal-characteristic"


def test_stringy_values(capsys):
    _, doc = _json(capsys, "stringy", "--d", "2", "--weights", "1,1", "--q", "5")
    assert doc["outputs"]["count_at_q"] == [{"exponent": "0", "coefficient": "30"}]
    _, doc = _json(capsys, "stringy", "--d", "2", "--weights", "1,1", "--q", "5", "--gerbe", "1:1")
    assert doc["outputs"]["count_at_q"] == [{"exponent": "0", "coefficient": "25"}]


def test_output_is_byte_stable(capsys):
    argv = ["orbvol", "--d", "3", "--weights", "1,1", "--q", "7"]
    assert _run(capsys, *argv) == _run(capsys, *argv)


def test_timing_flag(capsys):
    _, doc = _json(capsys, "--timing", "selfdual", "--q", "5", "--curve", "0,0,0,1,0")
    assert "timing" in doc


def test_table_format(capsys):
    code, out = _run(capsys, "--format", "table", "orbvol", "--d", "2", "--weights", "1,1", "--q", "5")
    assert code == 0
    assert out.startswith("orbvol: PASS")
    assert "6/5" in out


def test_config_round_trip(capsys, tmp_path):
    code, doc = _json(capsys, "euler", "--q", "7", "--curve", "0,0,0,0,1", "--n", "2")
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc["inputs"]))
    code2, doc2 = _json(capsys, "--config", str(path))
    assert (code, doc) == (code2, doc2)


@pytest.mark.parametrize("config", [
    {"version": 1, "command": "orbvol", "parameters": {"d": 2, "weights": [1], "q": 5, "bogus": 1}},
    {"version": 2, "command": "orbvol", "parameters": {}},
    {"version": 1, "command": "nope"},
    {"version": 1, "command": "orbvol", "parameters": {}, "extra": True},
    [1, 2],
])
def test_bad_configs(capsys, tmp_path, config):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(config))
    code, doc = _json(capsys, "--config", str(path))
    assert code == 2
    assert "error" in doc


@pytest.mark.parametrize("argv", [
    ["orbvol", "--d", "3", "--weights", "1", "--q", "5"],  # no cube roots of unity in F_5
    ["orbvol", "--d", "2", "--weights", "1,1", "--q", "6"],
    ["selfdual", "--q", "5", "--curve", "0,0,0,0,0"],
    ["euler", "--q", "5", "--curve", "0,0,0,1,0", "--n", "5"],
    ["stringy", "--d", "2", "--weights", "1,x", "--q", "5"],
])
def test_bad_inputs_exit_2(capsys, argv):
    code, doc = _json(capsys, *argv)
    assert code == 2
    assert set(doc) == {"error"}


def test_failed_check_exits_1(capsys, monkeypatch):
    monkeypatch.setattr(cli, "check_selfdual", lambda E, n: SelfDualReport(2, 1))
    code, doc = _json(capsys, "selfdual", "--q", "5", "--curve", "0,0,0,1,0")
    assert code == 1
    assert doc["passed"] is False


def test_suite_filter(capsys):
    code, doc = _json(capsys, "suite", "--filter", "fiber-volume")
    assert code == 0
    assert [c["name"] for c in doc["checks"]] == ["fiber-volume"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "padic_stringy", "selfdual", "--q", "5", "--curve", "0,0,0,1,0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
