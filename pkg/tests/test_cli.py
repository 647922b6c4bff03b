import json
import math
import subprocess
import sys

import pytest

from entrans import cli, theory

CFG = """system = "rmt"
realizations = 2
seed = 5
output = "{out}"
[dimensions]
n_a = 3
n_b = 4
[coupling]
sqrt_lambda = [0.0, 0.2]
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "sweep.toml"
    p.write_text(CFG.format(out=(tmp_path / "out").as_posix()))
    return p


def test_sweep_and_overrides(config, tmp_path):
    assert cli.main(["sweep", "--config", str(config)]) == cli.EXIT_OK
    side = json.loads((tmp_path / "out" / "sweep.json").read_text())
    assert side["metadata"]["seed"] == 5 and side["metadata"]["realizations"] == 2
    other = tmp_path / "other"
    assert cli.main(["sweep", "--config", str(config), "--seed", "9", "--workers", "2", "--out", str(other)]) == 0
    meta = json.loads((other / "sweep.json").read_text())["metadata"]
    assert meta["seed"] == 9 and meta["workers"] == 2
    assert (other / "sweep.csv").read_text() != (tmp_path / "out" / "sweep.csv").read_text()


def test_hist(config, tmp_path):
    out = tmp_path / "h"
    assert cli.main(["hist", "--config", str(config), "--out", str(out)]) == 0
    assert not (out / "sweep.csv").exists()
    assert (out / "hist_p001_u2.csv").exists() and (out / "hist_p000_mp.csv").exists()


def test_predict_idempotent(config, tmp_path):
    out = tmp_path / "pred.csv"
    assert cli.main(["predict", "--config", str(config), "--out", str(out)]) == 0
    first = out.read_bytes()
    assert cli.main(["predict", "--config", str(config), "--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('system = "rmt"\n[dimensions]\nn_a = 3\nn_b = 4\n[coupling]\nepsilon = []\n')
    assert cli.main(["sweep", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert cli.main(["sweep", "--config", str(tmp_path / "none.toml")]) == cli.EXIT_CONFIG
    assert cli.main(["lambda", "--system", "rmt", "--b", "0.1"]) == cli.EXIT_CONFIG
    assert cli.main(["lambda", "--system", "kicked_rotor", "--n", "50", "--sqrt-lambda", "10"]) == cli.EXIT_CONFIG


def test_failure_budget(config, monkeypatch):
    from entrans import harness

    def boom(*args, **kw):
        raise ArithmeticError("overflow")

    monkeypatch.setattr(harness, "compute_spectra", boom)
    assert cli.main(["sweep", "--config", str(config)]) == cli.EXIT_NUMERICAL


def test_lambda_output(capsys):
    assert cli.main(["lambda", "--system", "rmt", "--n-a", "32", "--n-b", "32", "--epsilon", "0.01"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.split())
    assert float(out["lambda"]) == theory.lambda_rmt(32, 32, 0.01)
    assert cli.main(["lambda", "--system", "kicked_rotor", "--n", "50", "--sqrt-lambda", "0.3"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.split())
    assert math.sqrt(float(out["lambda"])) == pytest.approx(0.3, rel=1e-8)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "entrans", "lambda", "--system", "kicked_rotor", "--n", "10", "--b", "0.2"], capture_output=True, text=True)
    assert r.returncode == 0 and "lambda=" in r.stdout
    r = subprocess.run([sys.executable, "-m", "entrans", "sweep"], capture_output=True, text=True)
    assert r.returncode == cli.EXIT_CONFIG
    assert cli.main(["--help"]) == cli.EXIT_OK
