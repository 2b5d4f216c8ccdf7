import csv
import json
import math

import pytest

from singletpaths.cli import main, run_scenario, scenario_names, SCENARIOS, report_to_dict

FAST_OVERRIDES = {
    "hidden-mc": ["--samples", "20000"],
    "pointer": ["--samples", "2000"],
}


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestListScenarios:
    def test_lists_all_seven(self, capsys):
        code, out, _ = _run(capsys, "list-scenarios")
        assert code == 0
        for name in scenario_names():
            assert name in out
        assert len(scenario_names()) == 7

    def test_json_schema(self, capsys):
        code, out, _ = _run(capsys, "list-scenarios", "--json")
        assert code == 0
        schema = json.loads(out)
        assert set(schema) == set(scenario_names())
        assert "parameters" in schema["bell-test"]


class TestRun:
    @pytest.mark.parametrize("scenario", sorted(SCENARIOS))
    def test_every_scenario_passes(self, capsys, scenario):
        extra = FAST_OVERRIDES.get(scenario, [])
        code, out, _ = _run(capsys, "run", "--scenario", scenario, *extra)
        assert code == 0
        assert f"{scenario}: PASS" in out

    def test_unknown_scenario_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--scenario", "nope"])
        assert exc.value.code == 2

    def test_bell_test_reports_violation(self, capsys):
        code, out, _ = _run(capsys, "run", "--scenario", "bell-test")
        assert code == 0
        assert "violated: +1" in out

    def test_degrees_flag(self, capsys):
        code_rad, out_rad, _ = _run(
            capsys, "run", "--scenario", "weak-values", "--phi", str(math.pi / 3)
        )
        code_deg, out_deg, _ = _run(
            capsys, "run", "--scenario", "weak-values", "--phi", "60", "--degrees"
        )
        assert code_rad == code_deg == 0
        assert out_rad == out_deg

    def test_tolerance_failure_exits_one(self, capsys):
        # nearly parallel axes degrade the expansion conditioning far past the
        # 1e-10 check, a legitimate red report
        code, out, _ = _run(
            capsys, "run", "--scenario", "weak-values", "--phi", repr(math.pi - 1e-5)
        )
        assert code == 1
        assert "FAIL" in out

    def test_library_error_is_config_error(self, capsys):
        code, _, err = _run(capsys, "run", "--scenario", "weak-values", "--phi", "0.0")
        assert code == 2
        assert "weak-values" in err


class TestConfigResolution:
    def test_config_file_overrides_defaults(self, capsys, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"delta_omega": 2.0 * math.pi / 3.0, "delta_omega2": math.pi / 3.0}))
        code, out, _ = _run(capsys, "run", "--scenario", "bell-test", "--config", str(config))
        assert code == 0
        assert "bell lhs: +1 " in out  # the triple changed, lhs is 1 not sqrt(2)

    def test_flag_beats_config(self, capsys, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"phi": 1.0}))
        code_flag, out_flag, _ = _run(
            capsys,
            "run",
            "--scenario",
            "weak-values",
            "--config",
            str(config),
            "--phi",
            str(math.pi / 2),
        )
        code_plain, out_plain, _ = _run(
            capsys, "run", "--scenario", "weak-values", "--phi", str(math.pi / 2)
        )
        assert code_flag == 0
        assert out_flag == out_plain

    def test_unknown_config_key_rejected(self, capsys, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"bogus": 1}))
        code, _, err = _run(capsys, "run", "--scenario", "bell-test", "--config", str(config))
        assert code == 2
        assert "bogus" in err

    def test_scenario_mismatch_rejected(self, capsys, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"scenario": "collapse"}))
        code, _, err = _run(capsys, "run", "--scenario", "bell-test", "--config", str(config))
        assert code == 2


class TestOutputs:
    def test_json_report_written(self, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, _, _ = _run(
            capsys, "run", "--scenario", "collapse", "--out", str(out_file)
        )
        assert code == 0
        report = json.loads(out_file.read_text())
        assert report["scenario"] == "collapse"
        assert report["passed"] is True
        for row in report["results"]:
            assert row["tolerance"] is None or row["tolerance"] > 0.0

    def test_csv_schema(self, capsys, tmp_path):
        out_file = tmp_path / "report.csv"
        code, _, _ = _run(
            capsys, "run", "--scenario", "toy-model", "--out", str(out_file), "--format", "csv"
        )
        assert code == 0
        with out_file.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == [
            "scenario",
            "quantity",
            "label",
            "re",
            "im",
            "std_err",
            "closed_form_re",
            "closed_form_im",
            "pass",
        ]
        for row in rows[1:]:
            assert row[0] == "toy-model"
            assert math.isfinite(float(row[3])) and math.isfinite(float(row[4]))

    def test_output_dir_env_override(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SINGLETPATHS_OUTDIR", str(tmp_path))
        code, _, _ = _run(capsys, "run", "--scenario", "collapse", "--out", "rel.json")
        assert code == 0
        assert (tmp_path / "rel.json").exists()

    def test_reports_are_deterministic(self):
        params = dict(SCENARIOS["hidden-mc"][2])
        params["samples"] = 20_000
        first = report_to_dict(run_scenario("hidden-mc", params))
        second = report_to_dict(run_scenario("hidden-mc", params))
        first.pop("duration_s")
        second.pop("duration_s")
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)

    def test_mc_rows_carry_standard_errors(self):
        params = dict(SCENARIOS["hidden-mc"][2])
        params["samples"] = 20_000
        report = run_scenario("hidden-mc", params)
        mc_rows = [r for r in report.results if r.quantity == "cell_probability"]
        assert mc_rows and all(r.std_err is not None for r in mc_rows)
