import json
import subprocess
import sys

import pytest

from infocascade.cli import main

RUN = ["run", "--p", "0.8", "--k", "1", "--mode", "det", "--v", "1", "--agents", "100", "--seed", "42"]


def test_run_twice_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(RUN + ["--out", str(a)]) == 0
    assert main(RUN + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "#schema=1" and len(lines) == 102


def test_run_stdout(capsys):
    assert main(RUN[:-2] + ["--agents", "5"] + ["--seed", "1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 7


@pytest.mark.parametrize(
    "argv",
    [["run", "--bogus"], [], ["run", "--p", "0.8"], RUN[:6] + ["--mode", "fast"] + RUN[8:], ["run", "--p", "0.3", "--k", "1", "--mode", "det", "--v", "1"]],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_io_error(tmp_path, capsys):
    assert main(RUN + ["--out", str(tmp_path / "nope" / "x.csv")]) == 3
    assert "nope" in capsys.readouterr().err


def test_sweep_outputs(tmp_path):
    cfg = {"p_values": [0.6, 0.8], "k_values": [1], "modes": ["det", "rand"], "v_values": [0, 1], "n_agents": 20, "runs": 3, "master_seed": 1, "window": 10}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(path), "--out-dir", str(tmp_path / "o1"), "--workers", "1"]) == 0
    assert main(["sweep", "--config", str(path), "--out-dir", str(tmp_path / "o2"), "--workers", "2"]) == 0
    files = sorted(p.name for p in (tmp_path / "o1").iterdir())
    assert len(files) == 8 * 2 + 1
    for name in files:
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()


def test_sweep_bad_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"p_values": [0.2], "k_values": [1], "modes": ["det"], "v_values": [1]}))
    assert main(["sweep", "--config", str(path), "--out-dir", str(tmp_path)]) == 2
    assert main(["sweep", "--config", str(tmp_path / "missing.json"), "--out-dir", str(tmp_path)]) == 3


def test_baseline(tmp_path):
    out, svg = tmp_path / "fig1.csv", tmp_path / "fig1.svg"
    assert main(["baseline", "--p-list", "0.5,0.9,1.0", "--runs", "500", "--agents", "50", "--seed", "0", "--out", str(out), "--svg", str(svg)]) == 0
    lines = out.read_text().splitlines()
    assert lines[:2] == ["#schema=1", "p,p_correct,p_incorrect,p_none,runs"]
    assert lines[-1].startswith("1.0,1.0,0.0,0.0,")
    assert svg.read_text().startswith("<svg") or "<svg" in svg.read_text()


def test_baseline_bad_list(tmp_path):
    assert main(["baseline", "--p-list", "0.5,x", "--out", str(tmp_path / "f.csv")]) == 2


@pytest.mark.slow
def test_validate(tmp_path):
    report = tmp_path / "report.txt"
    assert main(["validate", "--report", str(report), "--agreement-trials", "50"]) == 0
    text = report.read_text()
    assert "RESULT: PASS" in text and "agreement" in text


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "infocascade.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "validate" in out.stdout
