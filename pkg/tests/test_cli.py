"""End-to-end CLI tests on a deliberately tiny problem."""
from __future__ import annotations

import json

import numpy as np
import pytest

from cdii.cli import cli_main
from cdii.fieldio import read_field

TINY = "n_fine = 30\nn_coarse = 10\nmax_iter = 3\npicard_max_iter = 3\n"


@pytest.fixture
def tiny_cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return str(path)


@pytest.fixture
def tiny_data(tmp_path, tiny_cfg):
    out = tmp_path / "data"
    rc = cli_main(["generate", "--config", tiny_cfg, "--test-case", "1", "-o", str(out)])
    assert rc == 0
    return out


def test_generate_writes_fields(tiny_data):
    for name in ("H1.csv", "H2.csv", "sigma_true.csv"):
        field = read_field(tiny_data / name)
        assert field.grid.n_cells == 10
        assert np.all(np.isfinite(field.values))


def test_reconstruct_vip(tmp_path, tiny_cfg, tiny_data):
    out = tmp_path / "rec"
    rc = cli_main(
        ["reconstruct", "--algo", "vip", "--config", tiny_cfg, "--data", str(tiny_data), "-o", str(out)]
    )
    assert rc == 0
    report = json.loads((out / "report_vip.json").read_text())
    assert report["algorithm"] == "vip"
    assert report["n_iter"] <= 3
    assert "relative_l2_error" in report["metrics"]
    assert (out / "sigma_vip.csv").exists() and (out / "sigma_vip.png").exists()


def test_reconstruct_picard(tmp_path, tiny_cfg, tiny_data):
    out = tmp_path / "rec"
    rc = cli_main(
        ["reconstruct", "--algo", "picard", "--config", tiny_cfg, "--data", str(tiny_data), "-o", str(out)]
    )
    assert rc == 0
    report = json.loads((out / "report_picard.json").read_text())
    assert report["algorithm"] == "picard"
    assert "n_clamped" in report["metrics"]


def test_compare_runs_both(tmp_path, tiny_cfg, tiny_data):
    out = tmp_path / "cmp"
    rc = cli_main(["compare", "--config", tiny_cfg, "--data", str(tiny_data), "-o", str(out)])
    assert rc == 0
    side = json.loads((out / "compare.json").read_text())
    assert set(side) == {"vip", "picard"}
    for m in side.values():
        assert "relative_l2_error" in m


def test_reconstruct_both_delegates_to_compare(tmp_path, tiny_cfg, tiny_data):
    out = tmp_path / "both"
    rc = cli_main(
        ["reconstruct", "--algo", "both", "--config", tiny_cfg, "--data", str(tiny_data), "-o", str(out)]
    )
    assert rc == 0
    assert (out / "compare.json").exists()


def test_render_subcommand(tmp_path, tiny_data):
    out = tmp_path / "truth.png"
    rc = cli_main(["render", str(tiny_data / "sigma_true.csv"), "-o", str(out), "--vmin", "0", "--vmax", "1"])
    assert rc == 0
    assert out.exists()


def test_missing_data_is_a_clean_error(tmp_path, capsys):
    rc = cli_main(["reconstruct", "--algo", "vip", "--data", str(tmp_path / "void"), "-o", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_bad_config_is_a_clean_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("theta = 1.5\n")
    rc = cli_main(["generate", "--config", str(cfg), "-o", str(tmp_path / "out")])
    assert rc == 1
    assert "theta" in capsys.readouterr().err
