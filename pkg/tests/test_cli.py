"""Command-line interface: artifacts, determinism, exit codes."""
import json

import numpy as np

from skewdiff import constant_skew_tpd
from skewdiff.cli import main


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path)])


class TestFamilyCommand:
    def test_writes_descriptor_and_manifest(self, tmp_path):
        code = run(tmp_path, "family", "--kind", "horizon", "--T", "2.0",
                   "--table-t", "0.5,1.0")
        assert code == 0
        desc = json.loads((tmp_path / "family.json").read_text())
        assert desc["kind"] == "horizon"
        assert desc["parameters"]["T"] == 2.0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "family"
        assert "family.json" in manifest["artifacts"]
        table = (tmp_path / "family_table.csv").read_text().splitlines()
        assert table[0] == "t,psi,alpha"
        assert len(table) == 3


class TestDensityCommand:
    def test_matches_direct_evaluation(self, tmp_path):
        code = run(tmp_path, "density", "--kind", "constant-skew", "--alpha", "1.0",
                   "--t", "0.5,1.0", "--x", "-2:2:0.5")
        assert code == 0
        lines = (tmp_path / "density.csv").read_text().splitlines()
        assert lines[0] == "x,t,q"
        rows = [tuple(float(v) for v in ln.split(",")) for ln in lines[1:]]
        for x, t, q in rows[:6]:
            assert q == float(constant_skew_tpd(np.asarray(x), t, 1.0, +1))

    def test_missing_parameter_is_schema_error(self, tmp_path):
        code = run(tmp_path, "density", "--kind", "constant-skew",
                   "--t", "1.0", "--x", "-1:1:0.5")
        assert code == 2


class TestSimulateCommand:
    def test_artifacts_and_determinism(self, tmp_path):
        args = ("simulate", "--kind", "constant-skew", "--alpha", "1.0",
                "--t-end", "0.5", "--steps", "50", "--paths", "64",
                "--record-stride", "10", "--seed", "5", "--format", "binary")
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main([*args, "--output-dir", str(a)]) == 0
        assert main([*args, "--output-dir", str(b)]) == 0
        assert (a / "ensemble.skdf").read_bytes() == (b / "ensemble.skdf").read_bytes()
        summary = json.loads((a / "summary.json").read_text())
        assert summary["clamp_events"] == 0

    def test_drift_descriptor_file(self, tmp_path):
        # export a family, then simulate from the descriptor file
        fam_dir = tmp_path / "fam"
        assert main(["family", "--kind", "constant-skew", "--alpha", "1.0",
                     "--output-dir", str(fam_dir)]) == 0
        sim_dir = tmp_path / "sim"
        code = main(["simulate", "--drift-json", str(fam_dir / "family.json"),
                     "--t-end", "0.5", "--steps", "50", "--paths", "32",
                     "--record-stride", "50", "--seed", "5",
                     "--output-dir", str(sim_dir)])
        assert code == 0
        flags_dir = tmp_path / "flags"
        code = main(["simulate", "--kind", "constant-skew", "--alpha", "1.0",
                     "--t-end", "0.5", "--steps", "50", "--paths", "32",
                     "--record-stride", "50", "--seed", "5",
                     "--output-dir", str(flags_dir)])
        assert code == 0
        assert (sim_dir / "ensemble.csv").read_bytes() == \
            (flags_dir / "ensemble.csv").read_bytes()

    def test_horizon_violation_is_numerical_failure(self, tmp_path):
        code = run(tmp_path, "simulate", "--kind", "horizon", "--T", "1.0",
                   "--t-end", "2.0", "--steps", "10", "--paths", "4",
                   "--epsilon", "0.0")
        assert code == 3
        diag = json.loads((tmp_path / "diagnostics.json").read_text())
        assert "horizon" in diag["error"]

    def test_singular_start_needs_positive_t_start(self, tmp_path):
        args = ("simulate", "--kind", "constant-correlation", "--C", "0.5",
                "--t-end", "1.0", "--steps", "50", "--paths", "16",
                "--record-stride", "50")
        assert run(tmp_path, *args) == 2
        assert run(tmp_path, *args, "--t-start", "0.01") == 0


class TestConfigOverlay:
    def test_config_overrides_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"alpha": 2.0}))
        code = run(tmp_path, "density", "--kind", "constant-skew", "--alpha", "1.0",
                   "--t", "1.0", "--x", "0:1:0.5", "--config", str(cfg))
        assert code == 0
        lines = (tmp_path / "density.csv").read_text().splitlines()[1:]
        x, t, q = (float(v) for v in lines[0].split(","))
        assert q == float(constant_skew_tpd(np.asarray(0.0), 1.0, 2.0, +1))

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"not_a_parameter": 1}))
        code = run(tmp_path, "density", "--kind", "constant-skew", "--alpha", "1.0",
                   "--t", "1.0", "--x", "0:1:0.5", "--config", str(cfg))
        assert code == 2

    def test_unknown_flag_rejected(self, tmp_path):
        assert run(tmp_path, "family", "--kind", "horizon", "--T", "1.0",
                   "--bogus", "3") == 2


class TestOtherCommands:
    def test_censor_quick(self, tmp_path):
        code = run(tmp_path, "censor", "--t-end", "1.0", "--steps", "100",
                   "--paths", "8000", "--check-t", "0.5", "--seed", "2")
        assert code == 0
        res = json.loads((tmp_path / "censor_results.json").read_text())
        chk = res["checks"][0]
        assert abs(chk["survivor_fraction"] - 0.5) < 0.05
        assert chk["ks"] <= chk["threshold"]

    def test_mixture_quick(self, tmp_path):
        code = run(tmp_path, "mixture", "--kind", "horizon", "--T", "1.0",
                   "--t-end", "1.0", "--steps", "400", "--paths", "20000",
                   "--record-stride", "400", "--seed", "3")
        assert code == 0
        res = json.loads((tmp_path / "mixture_results.json").read_text())
        assert res["terminal_ks"] <= res["threshold"]
        assert res["p_plus"] == 0.5

    def test_ou_quick(self, tmp_path):
        code = run(tmp_path, "ou", "--mode", "htransform", "--lam", "1.0",
                   "--t-end", "0.5", "--steps", "250", "--paths", "20000",
                   "--record-stride", "250", "--seed", "4")
        assert code == 0
        res = json.loads((tmp_path / "ou_results.json").read_text())
        assert res["terminal_ks"] <= res["threshold"]

    def test_fokker_planck_quick(self, tmp_path):
        code = run(tmp_path, "fokker-planck", "--kind", "constant-skew",
                   "--alpha", "1.0", "--t-end", "0.5", "--x-min", "-7",
                   "--x-max", "7", "--n-x", "281", "--n-t", "200")
        assert code == 0
        summary = json.loads((tmp_path / "kfe_summary.json").read_text())
        assert abs(summary["mass"][-1] - 1.0) < 1e-6

    def test_validate_quick(self, tmp_path, capsys):
        code = run(tmp_path, "validate", "--suite", "quick", "--seed", "1")
        out = capsys.readouterr().out
        assert code == 0
        assert "ALL CHECKS PASSED" in out
        report = json.loads((tmp_path / "validation_report.json").read_text())
        assert report["all_passed"] is True
        assert len(report["checks"]) > 15
