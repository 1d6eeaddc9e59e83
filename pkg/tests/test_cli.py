import json
import subprocess
import sys

import numpy as np
import pytest

from sarfocus.cli import main
from sarfocus.formats import load_cube, load_image, save_image
from sarfocus.image import SarImage


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "radar": {"N_c": 64},
        "error": {"beta_true": 5e-5},
        "grids": {"bpa": {"shape": [32, 32], "extent": [3.2, 3.2]}},
    }))
    return path


def test_simulate(tmp_path, small_config, capsys):
    assert main(["simulate", "--config", str(small_config), "--out-dir", str(tmp_path)]) == 0
    cube = load_cube(tmp_path / "cube.sarc")
    assert cube.data.shape == (4, 64, 256)
    assert (tmp_path / "cube.json").exists()
    assert "scenario" in capsys.readouterr().out


def test_image_then_metrics_then_export(tmp_path, small_config, capsys):
    common = ["--config", str(small_config), "--out-dir", str(tmp_path)]
    assert main(["simulate", *common]) == 0
    assert main(["image", "--pipeline", "bpa_siso", "--cube", str(tmp_path / "cube.sarc"), *common]) == 0
    path = tmp_path / "image_bpa_siso_none.npz"
    image = load_image(path)
    assert image.shape == (32, 32) and len(image.meta["scenario_hash"]) == 16
    capsys.readouterr()

    assert main(["metrics", str(path)]) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["ic"] > 0 and 0 <= metrics["ie"] <= 8

    assert main(["export", str(path), "--out-dir", str(tmp_path), "--mode", "png_db"]) == 0
    assert (tmp_path / "image_bpa_siso_none.png").exists()
    assert main(["export", str(path), "--out-dir", str(tmp_path), "--mode", "csv_complex"]) == 0
    assert (tmp_path / "image_bpa_siso_none.csv").read_text().startswith("# scenario_hash,")


def test_autofocus(tmp_path, small_config, capsys):
    code = main(["autofocus", "--method", "leca_pga", "--pipeline", "pfa",
                 "--config", str(small_config), "--out-dir", str(tmp_path)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["beta_hat"] != 0
    assert (tmp_path / "image_pfa_leca_pga.json").exists()


def test_compare(tmp_path, small_config, capsys):
    code = main(["compare", "--pipelines", "pfa", "bpa_siso", "--autofocus", "none", "leca_pga",
                 "--config", str(small_config), "--out-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "pfa/none" in out and "bpa_siso/leca_pga" in out
    report = json.loads((tmp_path / "compare.json").read_text())
    assert set(report["cells"]) == {"pfa/none", "pfa/leca_pga", "bpa_siso/none", "bpa_siso/leca_pga"}
    assert (tmp_path / "compare.txt").read_text().startswith("metric")


def test_seed_override_is_deterministic(tmp_path, small_config):
    cfg = json.loads(small_config.read_text())
    cfg["error"]["snr_db"] = 10
    small_config.write_text(json.dumps(cfg))
    for name, seed in (("a", 3), ("b", 3), ("c", 4)):
        main(["simulate", "--config", str(small_config), "--seed", str(seed),
              "--output", str(tmp_path / f"{name}.sarc")])
    raw = {n: (tmp_path / f"{n}.sarc").read_bytes() for n in "abc"}
    assert raw["a"] == raw["b"] != raw["c"]


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"radar": {"B": -5}}')
        assert main(["simulate", "--config", str(bad), "--out-dir", str(tmp_path)]) == 2
        assert "radar.B" in capsys.readouterr().err

    def test_format_error(self, tmp_path):
        cube = tmp_path / "junk.sarc"
        cube.write_bytes(b"JUNK" * 40)
        assert main(["image", "--cube", str(cube), "--out-dir", str(tmp_path)]) == 3

    def test_domain_error(self, tmp_path):
        path = tmp_path / "zero.npz"
        save_image(SarImage(np.zeros((4, 4), complex), np.arange(4.0), np.arange(4.0)), path)
        assert main(["metrics", str(path)]) == 4

    def test_io_error(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 6

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["image", "--pipeline", "rda"])
        assert exc.value.code == 2


def test_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "sarfocus.cli", "--help"],
                         capture_output=True, text=True, check=True).stdout
    for command in ("simulate", "image", "autofocus", "metrics", "compare", "export"):
        assert command in out
