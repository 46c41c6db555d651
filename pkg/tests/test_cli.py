import json
import subprocess
import sys

import pytest

from nsac.cli import main
from nsac.errors import NumericalError


def test_profiles(tmp_path):
    assert main(["profiles", "--out", str(tmp_path)]) == 0
    info = json.loads((tmp_path / "profiles.json").read_text())
    assert info["sigma"] == pytest.approx(2 / 3, rel=1e-8)
    assert (tmp_path / "profiles.csv").exists()


def test_spectral(tmp_path):
    assert main(["spectral", "--out", str(tmp_path), "--eps", "0.1,0.05"]) == 0
    assert len((tmp_path / "spectral.csv").read_text().splitlines()) == 3


def test_sharp_from_config(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[sharp]\nshape = "circles"\nradii = [0.3, 0.4]\nt_end = 0.01\nn = 128\n')
    assert main(["sharp", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "oracle.csv").exists()


def test_simulate_and_asymptotics(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("t_end = 0.002\nsamples = 1\nlx = 4.0\n")
    assert main(["simulate", "--config", str(cfg), "--eps", "0.08", "--out", str(tmp_path / "s")]) == 0
    assert (tmp_path / "s" / "eps_0p08.nsac").exists()
    assert main(["asymptotics", "--eps", "0.08", "--order", "0", "--out", str(tmp_path / "a")]) == 0
    assert json.loads((tmp_path / "a" / "asymptotics.json").read_text())["order"] == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["simulate", "--eps", "0.02", "--grid", "16"],
    ["profiles", "--eps", "-1"],
    ["sharp", "--order", "5"],
])
def test_validation_exit_code(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] != "bogus" else argv) == 2


def test_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("colour = 'red'\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    cfg.write_text("x = = 1")
    assert main(["profiles", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    import nsac.cli as cli

    def boom(args, cfg):
        raise NumericalError("blew up")

    monkeypatch.setitem(cli.HANDLERS, "profiles", boom)
    assert main(["profiles", "--out", str(tmp_path)]) == 3


def test_console_script_module(tmp_path):
    r = subprocess.run([sys.executable, "-m", "nsac.cli", "profiles", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "sigma" in r.stdout


def test_shared_config_across_subcommands(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('scenario = "StationaryCircle"\nlx = 4.0\nt_end = 0.002\nsamples = 1\n'
                   '[sharp]\nshape = "circle"\nt_end = 0.005\nn = 64\n')
    assert main(["sharp", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", str(cfg), "--eps", "0.08", "--out", str(tmp_path / "b")]) == 0
    cfg.write_text("[sharp]\nlx = 4.0\n")
    assert main(["sharp", "--config", str(cfg), "--out", str(tmp_path / "c")]) == 2
