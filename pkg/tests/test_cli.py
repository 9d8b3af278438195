import json
import subprocess
import sys

import pytest

from girthplanar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_build_emit_and_verify(tmp_path, capsys):
    m, h, t = tmp_path / "map.json", tmp_path / "host.json", tmp_path / "trace.jsonl"
    code, out = run(capsys, "build", "--family", "bipartite", "--g", "4", "--n", "64", "--p", "1",
                    "--seed", "3", "--emit", str(m), "--emit-host", str(h), "--trace", str(t))
    assert code == 0 and json.loads(out)["edges"] == 124
    assert t.read_text().count("\n") >= 3
    code, out = run(capsys, "verify", "--map", str(m), "--host", str(h), "--g", "4")
    assert code == 0 and json.loads(out)["passed"]
    code, out = run(capsys, "verify", "--map", str(m), "--host", str(h), "--g", "6")
    assert code == 1 and not json.loads(out)["passed"]


def test_verify_rejects_edge_outside_host(tmp_path, capsys):
    m, h = tmp_path / "map.json", tmp_path / "host.json"
    m.write_text(json.dumps({"n": 4, "rotations": [[1, 3], [2, 0], [3, 1], [0, 2]]}))
    h.write_text(json.dumps({"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]}))
    code, _ = run(capsys, "verify", "--map", str(m), "--host", str(h), "--g", "4")
    assert code == 1
    h.write_text(json.dumps({"n": 4, "edges": [[0, 1], [0, 3], [1, 2], [2, 3]]}))
    code, _ = run(capsys, "verify", "--map", str(m), "--host", str(h), "--g", "4")
    assert code == 0


def test_build_failure_exit_code(capsys):
    code, out = run(capsys, "build", "--family", "even", "--g", "6", "--n", "62", "--p", "0")
    assert code == 1 and json.loads(out)["failure"][0] == "cycle"


def test_oracle(capsys):
    code, out = run(capsys, "oracle", "--n", "4", "--g", "4", "--p", "0.5", "--trials", "20000")
    res = json.loads(out)
    assert code == 0 and res["exact"] == 0.15625
    assert abs(res["empirical"] - 0.15625) < 0.02


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "bipartite", "g": 4, "n_list": [64],
                               "p_grid": [0.0, 1.0], "trials": 3}))
    out_csv, out_json = tmp_path / "r.csv", tmp_path / "r.json"
    code, _ = run(capsys, "sweep", "--config", str(cfg), "--out", str(out_csv), "--json",
                  str(out_json), "--quiet")
    assert code == 0
    assert out_csv.read_text().splitlines()[0] == \
        "family,g,n,p,trials,successes,wilson_lo,wilson_hi,mean_ms"
    assert len(json.loads(out_json.read_text())["points"]) == 2


def test_sweep_config_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "even", "g": 6, "n_list": [61], "trials": 3}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "61" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "girthplanar", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0
    for cmd in ("build", "sweep", "verify", "oracle"):
        assert cmd in res.stdout


def test_bad_family_rejected():
    with pytest.raises(SystemExit):
        main(["build", "--family", "cubic", "--g", "3", "--n", "5", "--p", "1"])
