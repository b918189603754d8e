"""End-to-end checks of the command line driver.

Every test goes through ``kptau.cli.main`` with a real argv list, so the
argument wiring, config loading, artifact writing, and exit codes are all
exercised exactly as a shell user would hit them.  Monte Carlo commands are
run at the smallest legal ensemble sizes to keep the suite quick; the
statistical assertions live elsewhere.
"""

import csv
import json
import os

import numpy as np
import pytest

from kptau import cli


def run(*argv):
    return cli.main([str(a) for a in argv])


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


SMALL = ("--samples", "4000", "--steps", "512")


# -- tau-eval ----------------------------------------------------------------


class TestTauEval:
    def test_default_scalar_value(self, tmp_path, capsys):
        rc = run("tau-eval", "--out", tmp_path)
        assert rc == 0
        assert "= 1.5" in capsys.readouterr().out
        result = load(tmp_path / "tau_eval.json")
        assert result["tau"] == 1.5
        assert result["x"] == [0.0, 0.0, 0.0]
        assert len(result["dlog_tau"]) == 3

    def test_config_matches_direct_evaluation(self, tmp_path):
        from kptau import tauengine
        from kptau.tauengine import SolitonParams

        doc = {
            "params": {"p": [2.0, 1.0], "q": [-1.0, -2.0], "m": [1.0, 0.5]},
            "x": [0.25, -0.1, 0.05],
        }
        rc = run("tau-eval", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        assert rc == 0
        result = load(tmp_path / "tau_eval.json")
        params = SolitonParams(p=[2.0, 1.0], q=[-1.0, -2.0], m=[1.0, 0.5])
        expected = tauengine.tau_det(params, np.array([0.25, -0.1, 0.05]))
        assert result["tau"] == pytest.approx(expected, rel=1e-14)

    def test_effective_config_reproduces_result(self, tmp_path):
        doc = {"params": {"p": [1.5], "q": [-0.5], "m": [2.0]},
               "x": [0.3, 0.0, -0.2]}
        first = tmp_path / "a"
        second = tmp_path / "b"
        assert run("tau-eval", "--config", write_config(tmp_path, doc),
                   "--out", first) == 0
        assert run("tau-eval", "--config", first / "effective_config.json",
                   "--out", second) == 0
        assert load(first / "tau_eval.json") == load(second / "tau_eval.json")

    def test_bad_params_block_exits_2(self, tmp_path):
        doc = {"params": {"p": [1.0, 2.0], "q": [-1.0], "m": [1.0]}}
        assert run("tau-eval", "--config", write_config(tmp_path, doc)) == 2


# -- field -------------------------------------------------------------------


class TestField:
    def test_default_line_peaks_at_two(self, tmp_path):
        rc = run("field", "--out", tmp_path)
        assert rc == 0
        with open(tmp_path / "field.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        header, data = rows[0], rows[1:]
        assert header[-1] == "u"
        assert len(data) == 201
        values = {float(r[0]): float(r[-1]) for r in data}
        assert max(values.values()) == 2.0
        assert values[0.0] == 2.0

    def test_writes_csv_to_stdout_without_out(self, capsys):
        assert run("field") == 0
        out = capsys.readouterr().out
        assert "x,u" in out
        assert out.count("\n") > 201

    def test_params_source_with_custom_grid(self, tmp_path):
        doc = {
            "params": {"p": [1.0], "q": [-1.0], "m": [1.0]},
            "grid": {"axes": [
                {"name": "x1", "start": -2.0, "stop": 2.0, "count": 11},
            ]},
        }
        rc = run("field", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        assert rc == 0
        with open(tmp_path / "field.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "x1"
        assert len(rows) == 12

    def test_unknown_axis_name_exits_2(self, tmp_path):
        doc = {"grid": {"axes": [
            {"name": "y", "start": 0.0, "stop": 1.0, "count": 5},
        ]}}
        assert run("field", "--config", write_config(tmp_path, doc)) == 2


# -- residual ----------------------------------------------------------------


class TestResidual:
    def test_kp_default_passes(self, tmp_path):
        rc = run("residual", "--out", tmp_path)
        assert rc == 0
        summary = load(tmp_path / "residual.json")
        assert summary["kind"] == "kp"
        assert summary["points"] == 100
        assert summary["passed"] is True
        assert summary["max_rel_residual"] <= 1e-8

    def test_kdv_from_scattering_block(self, tmp_path):
        doc = {
            "scattering": {"eta": [0.8, 1.4], "m": [1.0, 2.0]},
            "residual": {"kind": "kdv", "points": 25},
        }
        rc = run("residual", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        assert rc == 0
        summary = load(tmp_path / "residual.json")
        assert summary["kind"] == "kdv"
        assert summary["passed"] is True

    def test_kdv_rejects_asymmetric_params(self, tmp_path):
        doc = {
            "params": {"p": [1.2], "q": [-0.8], "m": [1.0]},
            "residual": {"kind": "kdv"},
        }
        assert run("residual", "--config", write_config(tmp_path, doc)) == 2

    def test_unreachable_tolerance_exits_1(self, tmp_path):
        # machine-epsilon residuals are nonzero, so 1e-30 must fail honestly
        doc = {"tolerances": {"residual": 1e-30},
               "residual": {"points": 5}}
        rc = run("residual", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        assert rc == 1
        assert load(tmp_path / "residual.json")["passed"] is False

    def test_unknown_kind_exits_2(self, tmp_path):
        doc = {"residual": {"kind": "sine-gordon"}}
        assert run("residual", "--config", write_config(tmp_path, doc)) == 2

    def test_seed_flag_changes_sample_points(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        doc = {"residual": {"points": 5}}
        cfg = write_config(tmp_path, doc)
        assert run("residual", "--config", cfg, "--seed", 1, "--out", a) == 0
        assert run("residual", "--config", cfg, "--seed", 2, "--out", b) == 0
        ra, rb = load(a / "residual.json"), load(b / "residual.json")
        assert ra["seed"] != rb["seed"]
        assert ra["max_rel_residual"] != rb["max_rel_residual"]


# -- mc-verify ---------------------------------------------------------------


class TestMcVerify:
    def test_gauss_suite_writes_reports(self, tmp_path, capsys):
        rc = run("mc-verify", "--suite", "gauss", *SMALL, "--seed", 5,
                 "--out", tmp_path)
        assert rc == 0
        out = capsys.readouterr().out
        assert "suite=gauss" in out
        summary = load(tmp_path / "summary.json")
        assert summary["suite"] == "gauss"
        assert summary["passed"] is True
        names = {c["check_name"] for c in summary["checks"]}
        for name in names:
            report = load(tmp_path / f"{name}.json")
            assert len(report) == 15
            assert report["check_name"] == name

    def test_levy_suite_all_six_checks(self, tmp_path):
        rc = run("mc-verify", "--suite", "levy", *SMALL, "--seed", 3,
                 "--out", tmp_path)
        assert rc == 0
        summary = load(tmp_path / "summary.json")
        assert len(summary["checks"]) == 6
        assert all(c["passed"] for c in summary["checks"])

    def test_effective_config_round_trip(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        assert run("mc-verify", "--suite", "gauss", *SMALL, "--seed", 5,
                   "--out", first) == 0
        assert run("mc-verify", "--config", first / "effective_config.json",
                   "--out", second) == 0
        assert load(first / "summary.json") == load(second / "summary.json")
        for check in load(first / "summary.json")["checks"]:
            name = check["check_name"]
            ra, rb = load(first / f"{name}.json"), load(second / f"{name}.json")
            ra.pop("wall_ms"), rb.pop("wall_ms")
            assert ra == rb

    def test_seed_changes_estimates(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        run("mc-verify", "--suite", "gauss", *SMALL, "--seed", 1, "--out", a)
        run("mc-verify", "--suite", "gauss", *SMALL, "--seed", 2, "--out", b)
        name = "realmoment_mc_n2.json"
        assert load(a / name)["estimate_re"] != load(b / name)["estimate_re"]

    def test_custom_area_spec_check(self, tmp_path):
        doc = {
            "suite": "gauss",
            "area_spec": {"lam": [0.2, 0.1],
                          "a": [[0.05, 0.12], [-0.1, 0.04]]},
            "z": [0.0, 1.0],
            "ensemble": {"samples": 4000, "steps": 512, "seed": 7},
        }
        rc = run("mc-verify", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        assert rc == 0
        names = [c["check_name"] for c in load(tmp_path / "summary.json")["checks"]]
        assert "custom_char" in names
        report = load(tmp_path / "custom_char.json")
        assert report["samples"] == 4000
        assert abs(report["estimate_re"] - report["target_re"]) < 0.05

    def test_unknown_suite_exits_2(self):
        assert run("mc-verify", "--suite", "nosuch", *SMALL) == 2

    def test_malformed_json_exits_2(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run("mc-verify", "--config", path) == 2

    def test_missing_config_file_exits_2(self, tmp_path):
        assert run("mc-verify", "--config", tmp_path / "absent.json") == 2

    def test_non_object_config_exits_2(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        assert run("mc-verify", "--config", path) == 2

    def test_undersized_ensemble_exits_2(self):
        assert run("mc-verify", "--suite", "gauss", "--samples", "10") == 2


# -- kps-check ---------------------------------------------------------------


class TestKpsCheck:
    def test_default_passes_identity_and_skips_mc(self, tmp_path, capsys):
        # default weights put the diagonal at zero, outside the positive
        # domain of the stochastic leg; the bridge itself still holds
        rc = run("kps-check", "--out", tmp_path)
        assert rc == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "SKIP" in out
        result = load(tmp_path / "kps_check.json")
        assert result["identity_passed"] is True
        assert result["rel_error"] <= 1e-10
        assert "mc_skipped" in result and "mc" not in result

    def test_stochastic_leg_runs_inside_envelope(self, tmp_path):
        doc = {"params": {"p": [1.5], "q": [-1.5],
                          "m": [float(np.exp(-0.4))]}}
        rc = run("kps-check", "--config", write_config(tmp_path, doc),
                 *SMALL, "--seed", 9, "--out", tmp_path)
        assert rc == 0
        result = load(tmp_path / "kps_check.json")
        assert result["identity_passed"] is True
        mc = result["mc"]
        assert mc["passed"] is True
        assert mc["samples"] == 4000
        assert mc["max_abs_z"] <= 3.0

    def test_tight_tolerance_fails_identity(self, tmp_path):
        # push the working point so roundoff in the determinant exceeds an
        # absurd tolerance; the command must report failure, not clamp
        doc = {
            "params": {"p": [3.0, 1.0], "q": [-1.0, -3.0], "m": [1.0, 1.0]},
            "x": [0.4, -0.3, 0.2],
            "tolerances": {"identity": 1e-30},
        }
        rc = run("kps-check", "--config", write_config(tmp_path, doc),
                 "--out", tmp_path)
        result = load(tmp_path / "kps_check.json")
        if result["rel_error"] == 0.0:
            pytest.skip("identity happened to be exact at this point")
        assert rc == 1
        assert result["identity_passed"] is False


# -- parser-level behavior ---------------------------------------------------


class TestParser:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run("no-such-command")
        assert err.value.code == 2

    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run()
        assert err.value.code == 2

    def test_suite_flag_only_on_mc_verify(self):
        with pytest.raises(SystemExit) as err:
            run("tau-eval", "--suite", "levy")
        assert err.value.code == 2

    def test_every_command_is_registered(self):
        parser = cli.build_parser()
        subparsers = next(
            a for a in parser._actions
            if isinstance(a, cli.argparse._SubParsersAction)
        )
        assert set(subparsers.choices) == {
            "tau-eval", "field", "residual", "mc-verify", "kps-check",
        }
