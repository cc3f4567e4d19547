import csv
import json
import subprocess
import sys

import pytest

from backbend_perc.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def paths(tmp_path):
    (tmp_path / "oriented.txt").write_text("0 0 0\n1 1 1\n0 2 2\n1 3 3\n")
    (tmp_path / "dip.txt").write_text("0 0\n1 1\n2 0\n")
    (tmp_path / "bad.txt").write_text("0 0\n1 one\n")
    return tmp_path


def test_validate_path_exit_codes(capsys, paths):
    code, out, _ = run(capsys, "validate-path", "--beta", "const:0", "--dim", 3, "--path-file", paths / "oriented.txt")
    assert code == 0 and "valid" in out
    code, out, _ = run(capsys, "validate-path", "--beta", "const:0", "--dim", 2, "--path-file", paths / "dip.txt")
    assert code == 2 and "index 2" in out
    code, _, err = run(capsys, "validate-path", "--dim", 2, "--path-file", paths / "bad.txt")
    assert code == 1 and ":2:" in err


def test_validate_path_echoes_canonical_beta(capsys, paths):
    code, out, _ = run(capsys, "validate-path", "--beta", "prefix:0,1,2,3;const:0", "--dim", 3,
                       "--path-file", paths / "oriented.txt")
    assert "beta: prefix:0,1,2,3;const:0" in out


def test_usage_error_is_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["theta", "--beta", "nonsense", "--p", "0.5"])
    assert info.value.code == 1


@pytest.mark.parametrize("p,expected", [(0, 0.0), (1, 1.0)])
def test_theta_endpoints(capsys, p, expected):
    code, out, _ = run(capsys, "theta", "--dim", 2, "--p", p, "--trials", 20, "--seed", 1, "--reproducible")
    assert code == 0
    rec = json.loads(out)
    assert rec["result"]["estimate"] == expected
    assert rec["metadata"]["master_seed"] == 1


def test_theta_reproducible_across_threads(capsys):
    args = ["theta", "--dim", 3, "--radius", 10, "--p", 0.3, "--trials", 300, "--seed", 9, "--reproducible"]
    outs = {run(capsys, *args, "--threads", t)[1] for t in (1, 4, 1)}
    assert len(outs) == 1


def test_missing_seed_is_drawn_and_printed(capsys):
    code, out, err = run(capsys, "theta", "--dim", 2, "--p", 0.5, "--trials", 5)
    seed = int(err.split("seed:")[1].split()[0])
    assert json.loads(out)["metadata"]["master_seed"] == seed
    assert "timestamp" in json.loads(out)["metadata"]


def test_pc_synthetic(capsys):
    code, out, _ = run(capsys, "pc", "--synthetic-threshold", 0.4, "--tol", 0.001, "--reproducible")
    lo, hi = json.loads(out)["result"]["bracket"]
    assert code == 0 and lo <= 0.4 <= hi and hi - lo <= 0.001


def test_pc_window_ladder_reproducible(capsys):
    args = ["pc", "--dim", 2, "--window-ladder", "8,16", "--trials", 400, "--seed", 2, "--tol", 0.02,
            "--reproducible"]
    a = run(capsys, *args, "--threads", 1)[1]
    b = run(capsys, *args, "--threads", 4)[1]
    assert a == b
    assert len(json.loads(a)["result"]["per_window"]) == 2


def test_pc_non_bracketing(capsys):
    code, _, err = run(capsys, "pc", "--dim", 2, "--seed", 1, "--trials", 50, "--lo", 0.9, "--hi", 1.0)
    assert code == 1 and "does not bracket" in err


def test_oracle_exit_codes(capsys):
    base = ["oracle", "--dim", 2, "--window=-3..3x0..5", "--p", 0.6]
    assert run(capsys, *base, "--beta", "const:1", "--seed", 4)[0] == 0
    code, out, _ = run(capsys, *base, "--p", 0, "--seed", 4)
    assert code == 0 and "walk (1): 0,0" in out
    assert run(capsys, "oracle", "--dim", 2, "--window=-5..5x0..5", "--p", 0.5, "--seed", 1)[0] == 1
    codes = {run(capsys, *base, "--beta", "cyclic:0,5", "--seed", s)[0] for s in range(40)}
    assert codes == {0, 3}


def test_block_event_cli(capsys):
    code, out, _ = run(capsys, "block-event", "--dim", 2, "--r", 1, "--x", "0,0", "--z", "0,0", "--p", 0.2,
                       "--trials", 50, "--seed", 3, "--reproducible")
    assert code == 0 and json.loads(out)["result"]["estimate"] == 1.0
    code, out, _ = run(capsys, "block-event", "--dim", 2, "--r", 1, "--x", "0,0", "--z", "0,4", "--p", 0,
                       "--trials", 50, "--seed", 3, "--reproducible")
    assert json.loads(out)["result"]["estimate"] == 0.0


def test_sweep_minimal_curve(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "curve", "p_grid": [0, 1]}))
    out_csv = tmp_path / "c.csv"
    code, out, _ = run(capsys, "sweep", "--config", cfg, "--csv", out_csv, "--seed", 1, "--reproducible")
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert [float(r["estimate"]) for r in rows] == [0.0, 1.0]
    assert json.loads(out)["plan"]["mode"] == "curve"


def test_sweep_ladder_and_pair(capsys, tmp_path):
    cfg = tmp_path / "l.json"
    cfg.write_text(json.dumps({"mode": "ladder", "dim": 3, "beta": "const:1", "l": [1, 2, 4],
                               "radius": 12, "trials": 300, "seed": 5}))
    code, out, _ = run(capsys, "sweep", "--config", cfg, "--reproducible")
    assert code == 0 and len(json.loads(out)["result"]["rows"]) == 3
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({"mode": "pair", "dim": 3, "beta_a": "const:0",
                               "beta_b": "prefix:0,1,2,3;const:0", "p_grid": [0.25, 0.3],
                               "radius": 8, "trials": 50, "seed": 5}))
    code, out, _ = run(capsys, "sweep", "--config", cfg, "--reproducible")
    res = json.loads(out)["result"]
    assert code == 0 and all(r["contained"] == r["trials"] for r in res)


@pytest.mark.parametrize("config,pointer", [
    ({"mode": "curve", "p_grid": [0, 2]}, "/p_grid/1"),
    ({"mode": "curve"}, "/p_grid"),
    ({"mode": "bogus", "p_grid": [0]}, "/mode"),
    ({"mode": "curve", "p_grid": [0], "colour": 1}, "/colour"),
    ({"mode": "curve", "p_grid": [0], "beta": "const:x"}, "/beta"),
])
def test_sweep_schema_errors(capsys, tmp_path, config, pointer):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(config))
    code, _, err = run(capsys, "sweep", "--config", cfg, "--seed", 1)
    assert code == 1
    assert f"at {pointer}:" in err


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "backbend_perc.cli", "pc", "--synthetic-threshold", "0.4",
                          "--reproducible"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["kind"] == "pc"
