import subprocess
import sys

import yaml

from mcsync.cli import main


def _cfg(tmp_path, doc):
    p = tmp_path / "cfg.yaml"
    p.write_text(yaml.safe_dump(doc))
    return str(p)


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", "--config", _cfg(tmp_path, {"run": {"seed": 3}})]) == 0
    assert "seed: 3" in capsys.readouterr().out


def test_validate_rejects(tmp_path, capsys):
    bad = _cfg(tmp_path, {"interval": {"t_min_ms": 0.4, "t_max_ms": 1.2}})
    assert main(["validate", "--config", bad]) == 2
    assert "error" in capsys.readouterr().err


def test_simulate(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"tt": {"xi_b": 14}})
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--blocks", "2", "--ml-blocks", "1", "--seed", "5",
                 "--out", str(out)]) == 0
    assert (out / "ber.csv").exists() and (out / "manifest.json").exists()
    assert "BER=" in capsys.readouterr().out


def test_sweep_with_set(tmp_path):
    cfg = _cfg(tmp_path, {"scheme": ["tt"]})
    out = tmp_path / "s"
    assert main(["sweep", "--config", cfg, "--blocks", "2", "--set", "tt.xi_b=[11,13]", "--out", str(out)]) == 0
    assert (out / "hist_tt_xib11.csv").exists() and (out / "hist_tt_xib13.csv").exists()


def test_figure(tmp_path):
    assert main(["figure", "fig5", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "zones.csv").exists()
    assert (tmp_path / "trace.csv").read_text().startswith("t_n,rbar_A,rbar_B,r_A,r_B\n")


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "mcsync.cli", "figure", "fig3", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "ml_metric.csv").exists()
