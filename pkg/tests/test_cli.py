"""Command-line interface: config handling, output files, exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from liejet import cli

SMALL = {"n_s": 21, "n_t": 30, "dt": 0.02, "output_every": 10}


def write_config(tmp_path, doc, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2) if isinstance(doc, dict) else doc)
    return p


def run_main(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfigParsing:
    def test_bundled_default(self):
        doc, cfg = cli.load_config(None)
        assert cfg.n_s == 100 and cfg.bc == ("free", "free")

    def test_diagonal_matrices(self):
        cfg = cli.build_config({"J": [1, 2, 3, 4, 5, 6]})
        np.testing.assert_array_equal(cfg.J, np.diag([1, 2, 3, 4, 5, 6.0]))

    def test_unknown_key_has_line(self):
        text = '{\n  "n_s": 21,\n  "bogus": 1\n}\n'
        with pytest.raises(cli.ConfigError, match=r"<config>:3: .*'bogus' was unexpected[\s\S]*line 3"):
            cli.parse_config(text)

    def test_syntax_error_has_line(self):
        with pytest.raises(cli.ConfigError, match=r"<config>:3:1: [\s\S]*line 3: \}"):
            cli.parse_config('{\n  "n_s": 21,\n}\n')

    def test_type_error(self):
        with pytest.raises(cli.ConfigError, match="n_s"):
            cli.parse_config('{"n_s": "many"}')

    def test_bad_boundary(self):
        with pytest.raises(cli.ConfigError, match="bc"):
            cli.parse_config('{"bc": ["free", "hinged"]}')


class TestSimulate:
    def test_default_config(self, tmp_path, capsys):
        code, _, _ = run_main(["simulate", "--out", str(tmp_path / "out")], capsys)
        assert code == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["status"] == "ok"
        assert all(v is not None for v in summary["final"].values())
        assert summary["final"]["momentum_drift_relative"] < 1e-4

    def test_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL)
        code, _, _ = run_main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
        assert code == 0
        with open(tmp_path / "o" / "timeseries.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == cli.TIMESERIES_HEADER and len(rows[0]) == 26
        assert len(rows) == 1 + 4 * 21  # t = 0, 10, 20, 30 steps
        with open(tmp_path / "o" / "diagnostics.csv") as fh:
            diag = list(csv.reader(fh))
        assert diag[0] == cli.DIAGNOSTICS_HEADER and len(diag) == 32
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["grid"]["n_t"] == 30 and summary["steps_completed"] == 30
        assert (tmp_path / "o" / "timeseries.csv").read_bytes().endswith(b"\n")

    def test_custom_output_names(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {**SMALL, "outputs": {"summary": "run.json"}})
        assert run_main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)[0] == 0
        assert (tmp_path / "o" / "run.json").exists()

    def test_convergence_toggle(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {**SMALL, "convergence_check": True})
        run_main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
        ratios = json.loads((tmp_path / "o" / "summary.json").read_text())["convergence_ratios"]
        assert set(ratios) == {"conservation", "compatibility", "right_compatibility", "cell"}

    def test_cfl_violation(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"n_s": 11, "dt": 0.5})
        out = tmp_path / "never"
        code, _, err = run_main(["simulate", "--config", str(cfg), "--out", str(out)], capsys)
        assert code == 1
        assert "CFL bound dt <= c_safety*ds/v_max = 1*0.1/1 = 0.1" in err
        assert not out.exists()

    def test_schema_error_writes_nothing(self, tmp_path, capsys):
        cfg = write_config(tmp_path, '{\n "n_s": 21,\n "colour": "red"\n}')
        out = tmp_path / "never"
        code, _, err = run_main(["simulate", "--config", str(cfg), "--out", str(out)], capsys)
        assert code == 1 and "line 3" in err and not out.exists()

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_main(["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)], capsys)
        assert code == 1 and "cannot read" in err

    def test_instability(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"n_s": 21, "n_t": 400, "dt": 0.2, "c_safety": 5.0, "dissipation": 0.0})
        code, _, err = run_main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
        assert code == 2 and "energy grew" in err
        assert json.loads((tmp_path / "o" / "summary.json").read_text())["status"] == "unstable"

    def test_twin_runs_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL)
        for d in ("a", "b"):
            run_main(["simulate", "--config", str(cfg), "--out", str(tmp_path / d)], capsys)
        for f in ("timeseries.csv", "diagnostics.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


class TestVerify:
    def test_lie(self, capsys):
        code, out, _ = run_main(["verify", "--suite", "lie"], capsys)
        assert code == 0
        assert "FAIL" not in out and out.count("PASS") >= 5

    def test_forms(self, capsys):
        code, out, _ = run_main(["verify", "--suite", "forms"], capsys)
        assert code == 0 and "volume contractions: max 0.00e+00" in out

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["verify", "--suite", "plots"])

    def test_failure_exit_code(self, monkeypatch, capsys):
        from liejet import verify

        monkeypatch.setitem(verify.SUITE_FUNCTIONS, "lie", lambda seed: [verify.Check("forced", False, "x")])
        code, out, _ = run_main(["verify", "--suite", "lie"], capsys)
        assert code == 1 and "FAIL  forced" in out


class TestRigidBody:
    @pytest.mark.parametrize("axis", [1, 2, 3])
    def test_principal_axes(self, axis, capsys):
        code, out, _ = run_main(["rigid-body", "--axis", str(axis), "--steps", "1000"], capsys)
        report = json.loads(out)
        assert code == 0 and report["chi_change"] <= 1e-9

    def test_generic_spin(self, capsys):
        code, out, _ = run_main(["rigid-body", "--axis", "2", "--steps", "2000", "--perturb", "0.1"], capsys)
        report = json.loads(out)
        assert report["chi_change"] > 1e-3
        assert report["spatial_momentum_norm_drift"] <= 1e-8
        assert report["casimir_drift"] <= 1e-8


class TestEntryPoint:
    def test_module_invocation(self):
        out = subprocess.run([sys.executable, "-m", "liejet.cli", "default-config"], capture_output=True, text=True, check=True)
        assert json.loads(out.stdout)["n_s"] == 100
