import json
import subprocess
import sys

import pytest

from monocorr import bounds, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_majority(capsys):
    code, out, _ = run(capsys, "analyze", "--spec", '{"kind":"majority","n":3}')
    assert code == 0
    rep = json.loads(out)
    assert rep["influences"] == [0.5, 0.5, 0.5]
    assert rep["level_weights"] == [0.25, 0.1875, 0.0, 0.0625]
    assert rep["monotone"] and rep["fully_symmetric"]


def test_analyze_csv(capsys):
    code, out, _ = run(capsys, "analyze", "--spec", '{"kind":"majority","n":3}', "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# schema:") and lines[1] == "key,value"
    assert "influences[2],0.5" in lines


def test_analyze_table(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"n": 2, "kind": "indicator01", "table": [0, 0, 0, 1]}))
    code, out, _ = run(capsys, "analyze", "--table", str(p))
    assert code == 0 and json.loads(out)["mu"] == 0.25


def test_bounds_json_and_csv(capsys):
    specs = ["--spec", '{"kind":"tribes","n":6,"r":2}', "--spec",
             '{"kind":"dual_of","of":{"kind":"tribes","n":6,"r":2}}']
    code, out, _ = run(capsys, "bounds", *specs)
    rep = json.loads(out)["report"]
    assert code == 0 and set(rep["rhs"]) == set(bounds.RHS_NAMES)
    code, out, _ = run(capsys, "bounds", *specs, "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == f"# schema: {bounds.CSV_SCHEMA}"
    assert lines[1].split(",") == bounds.CSV_COLUMNS


def test_bounds_infinite_ratio(capsys):
    d1, d2 = '{"kind":"dictator","n":3,"i":1}', '{"kind":"dictator","n":3,"i":2}'
    code, out, _ = run(capsys, "bounds", "--spec", d1, "--spec", d2)
    assert json.loads(out)["report"]["ratios"]["talagrand"] is None
    code, out, _ = run(capsys, "bounds", "--spec", d1, "--spec", d2, "--format", "csv")
    assert "inf" in out.splitlines()[2].split(",")


def test_pair_talagrand_ball(capsys):
    code, out, _ = run(capsys, "pair", "--name", "talagrand_ball", "--n", "20", "--a", "0.05")
    body = json.loads(out)
    assert code == 0
    rep = body["report"]
    assert abs(rep["cov"] - rep["mu_f"] ** 2) <= 1e-12
    assert all(c["passed"] for c in body["checks"])


@pytest.mark.parametrize("argv", [
    ["--name", "tribes_dual", "--n", "12", "--r", "3"],
    ["--name", "example31", "--n", "10", "--a", "0.25"],
    ["--name", "example32", "--n", "10", "--a", "0.25"],
    ["--name", "example54", "--n", "9", "--a", "0.2"],
    ["--name", "cormaj", "--n", "8"],
])
def test_pair_names(capsys, argv):
    code, out, _ = run(capsys, "pair", *argv)
    assert code == 0
    assert json.loads(out)["checks"]


def test_verify_exit_and_outputs(capsys, tmp_path):
    out_path = tmp_path / "v.jsonl"
    code, _, _ = run(capsys, "verify", "--seed", "7", "--n-max", "5", "--pairs", "5",
                     "--out", str(out_path))
    assert code == 0
    rows = [json.loads(line) for line in out_path.read_text().splitlines()]
    assert rows and all(r["passed"] for r in rows)
    summary = (tmp_path / "v.jsonl.summary.csv").read_text().splitlines()
    assert summary[1] == "check,total,passed,failed"


def test_scan_exit_one_with_witness(capsys):
    code, out, _ = run(capsys, "scan", "--name", "wrong2", "--budget", "20", "--n", "6")
    assert code == 1
    assert json.loads(out)["result"]["witness"]["specs"]


@pytest.mark.parametrize("argv", [
    ["bounds", "--spec", '{"kind":"tribes","n":30,"r":3}', "--spec", '{"kind":"majority","n":3}'],
    ["analyze", "--spec", "{bad json"],
    ["analyze", "--spec", '{"kind":"unknown","n":3}'],
    ["analyze", "--spec", '{"kind":"majority","n":4}'],
    ["analyze", "--table", "/nonexistent/file.json"],
    ["bounds", "--spec", '{"kind":"majority","n":3}'],
    ["pair", "--name", "example31", "--n", "5"],
    ["scan", "--name", "bogus"],
    ["verify", "--n-max", "22"],
])
def test_errors_exit_two_with_json(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in json.loads(err.strip().splitlines()[-1])


def test_usage_error_exit_two(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2


def test_allow_large_raises_cap(capsys):
    code, _, _ = run(capsys, "analyze", "--spec", '{"kind":"dictator","n":21,"i":1}')
    assert code == 2
    code, out, _ = run(capsys, "analyze", "--allow-large", "--spec",
                       '{"kind":"dictator","n":21,"i":1}')
    assert code == 0 and json.loads(out)["n"] == 21


def test_module_entry_is_byte_deterministic():
    argv = [sys.executable, "-m", "monocorr", "scan", "--name", "statement33",
            "--budget", "15", "--seed", "3", "--n", "6"]
    a = subprocess.run(argv, capture_output=True, check=False)
    b = subprocess.run(argv, capture_output=True, check=False)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
