import json
import subprocess
import sys

import pytest

from magnoep.cli import EXIT_COMPUTE, EXIT_INVALID, EXIT_OK, main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def spectrum_cfg(tmp_path):
    return write(tmp_path, "pt.yaml", "mode: spectrum2\ngamma2_over_gamma1: -1\nj_over_gamma1: [0, 2, 41]\n")


class TestExitCodes:
    def test_run_ok(self, tmp_path, spectrum_cfg, capsys):
        out = tmp_path / "pt.csv"
        assert main(["run", spectrum_cfg, "--out", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["ep_hits"] == [{"j_over_gamma1": 1.0, "order": 2}]
        assert out.read_text().startswith("# units:")

    def test_validation_failure(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.yaml", "mode: dynamics2\nsamples_per_period: 5\n")
        assert main(["run", cfg]) == EXIT_INVALID
        assert "samples_per_period" in capsys.readouterr().err

    def test_parse_failure(self, tmp_path):
        assert main(["validate", write(tmp_path, "bad.yaml", "mode: [spectrum2\n")]) == EXIT_INVALID

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.yaml")]) == EXIT_INVALID

    def test_compute_failure(self, tmp_path, capsys):
        cfg = write(tmp_path, "ep.yaml", "mode: locate_ep\ngamma2_over_gamma1: -1\nbracket: [1.5, 2.0]\n")
        assert main(["locate-ep", cfg]) == EXIT_COMPUTE
        assert "NoSignChange" in capsys.readouterr().err


class TestCommands:
    def test_validate_prints_nothing_when_quiet(self, spectrum_cfg, capsys):
        assert main(["validate", spectrum_cfg, "--quiet"]) == EXIT_OK
        assert capsys.readouterr().out == ""

    def test_locate_ep_from_range(self, tmp_path, capsys):
        cfg = write(tmp_path, "ph.yaml",
                    "mode: spectrum3\ndelta_over_gamma1: 2\nj_over_gamma1: [1, 2.5, 31]\n")
        out = tmp_path / "ep.json"
        assert main(["locate-ep", cfg, "--format", "json", "--out", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["j_over_gamma1"] == pytest.approx(1.6924880410, abs=1e-8)
        assert json.loads(out.read_text())["ep_order"] == 2

    def test_dynamics_json(self, tmp_path, capsys):
        cfg = write(tmp_path, "d.yaml", "mode: dynamics2\ngamma2_over_gamma1: -1\nj_over_gamma1: 1.1\n")
        out = tmp_path / "d.json"
        assert main(["run", cfg, "--format", "json", "--out", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["fits"]["q1"]["growth_class"] == "Oscillatory"
        obj = json.loads(out.read_text())
        assert obj["kind"] == "trajectory" and len(obj["times"]) == 100 * 200 + 1

    def test_preset_writes_panels_and_manifest(self, tmp_path, capsys):
        assert main(["preset", "fig2", "--out", str(tmp_path)]) == EXIT_OK
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["fig2_a_b_pt.csv", "fig2_a_b_pt.yaml", "fig2_c_d_dissipative.csv",
                         "fig2_c_d_dissipative.yaml", "manifest.json"]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["closed_form_coefficient"] == 1
        hits = [p["ep_hits"] for p in manifest["panels"]]
        assert hits == [[{"j_over_gamma1": 1.0, "order": 2}], [{"j_over_gamma1": 0.5, "order": 2}]]

    def test_preset_is_sugar_for_its_config(self, tmp_path):
        assert main(["preset", "fig2", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
        again = tmp_path / "again.csv"
        assert main(["run", str(tmp_path / "fig2_a_b_pt.yaml"), "--out", str(again), "--quiet"]) == EXIT_OK
        assert again.read_bytes() == (tmp_path / "fig2_a_b_pt.csv").read_bytes()

    def test_deterministic_output(self, tmp_path, spectrum_cfg):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            assert main(["run", spectrum_cfg, "--format", "json", "--out", str(p), "--quiet"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_module_entry_point(self, spectrum_cfg):
        proc = subprocess.run([sys.executable, "-m", "magnoep.cli", "validate", spectrum_cfg],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["valid"] is True
