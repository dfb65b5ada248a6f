"""Scenario parsing (units, validation, presets) and the command-line interface."""

import csv
import io
import math

import pytest

from cachint.cli import run
from cachint.errors import ScenarioError
from cachint.scenario import (
    PRESETS,
    Scenario,
    db_to_linear,
    dbm_to_watts,
    load_scenario,
    parse_scenario,
)


class TestUnitConversions:
    def test_dbm_to_watts(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)
        assert dbm_to_watts(10.0) == pytest.approx(0.01, rel=1e-12)
        assert dbm_to_watts(-150.0) == pytest.approx(1e-18, rel=1e-12)

    def test_db_to_linear(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-12)
        assert db_to_linear(-3.0) == pytest.approx(10 ** -0.3, rel=1e-12)


class TestPresets:
    def test_baseline_resolves_to_linear_units(self):
        s = load_scenario("paper-baseline")
        assert s.tx_power_w == pytest.approx(0.01, rel=1e-12)
        assert s.noise_power_w == pytest.approx(1e-18, rel=1e-12)
        assert s.sinr_threshold == pytest.approx(10.0, rel=1e-12)
        assert s.bs_intensity == pytest.approx(20.0 / (math.pi * 500.0**2), rel=1e-12)
        assert s.ue_intensity == pytest.approx(60.0 / (math.pi * 500.0**2), rel=1e-12)
        assert s.catalog_files == 100_000
        assert s.subchannels == 6
        assert s.servers == 1

    def test_all_presets_load(self):
        for name in PRESETS:
            assert isinstance(load_scenario(name), Scenario)

    def test_hash_is_stable_and_sensitive(self):
        s = load_scenario("feasible-demo")
        assert s.resolved_hash() == load_scenario("feasible-demo").resolved_hash()
        assert s.resolved_hash() != s.with_value("zipf_exponent", 2.0).resolved_hash()

    def test_unknown_preset_or_path(self):
        with pytest.raises(ScenarioError):
            load_scenario("no-such-preset")


class TestParsing:
    def test_round_trips_through_a_file(self, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text(PRESETS["feasible-demo"])
        assert load_scenario(str(path)) == load_scenario("feasible-demo")

    def test_missing_key_is_named(self):
        text = "\n".join(
            line for line in PRESETS["feasible-demo"].splitlines()
            if not line.startswith("bandwidth")
        )
        with pytest.raises(ScenarioError, match="missing required key 'bandwidth'"):
            parse_scenario(text)

    def test_unknown_key_reports_line_number(self):
        text = PRESETS["feasible-demo"] + "bogus_knob = 3\n"
        lineno = len(PRESETS["feasible-demo"].splitlines()) + 1
        with pytest.raises(ScenarioError, match=f"line {lineno}: unknown key 'bogus_knob'"):
            parse_scenario(text)

    def test_duplicate_key_rejected(self):
        text = PRESETS["feasible-demo"] + "servers = 2\n"
        with pytest.raises(ScenarioError, match="duplicate key 'servers'"):
            parse_scenario(text)

    def test_wrong_unit_rejected(self):
        text = PRESETS["feasible-demo"].replace("tx_power = 10 dbm", "tx_power = 10 hz")
        with pytest.raises(ScenarioError, match="takes units"):
            parse_scenario(text)

    def test_non_number_rejected(self):
        text = PRESETS["feasible-demo"].replace("servers = 1", "servers = one")
        with pytest.raises(ScenarioError, match="not a number"):
            parse_scenario(text)

    def test_non_integer_count_rejected(self):
        text = PRESETS["feasible-demo"].replace("servers = 1", "servers = 1.5")
        with pytest.raises(ScenarioError, match="must be an integer"):
            parse_scenario(text)

    def test_multiple_errors_reported_together(self):
        text = PRESETS["feasible-demo"].replace(
            "servers = 1", "servers = one"
        ).replace("tx_power = 10 dbm", "tx_power = 10 hz")
        with pytest.raises(ScenarioError, match="not a number") as excinfo:
            parse_scenario(text)
        assert "takes units" in str(excinfo.value)

    def test_unstable_queue_rejected_at_load(self):
        text = PRESETS["feasible-demo"].replace(
            "arrival_rate = 0.8 per_s", "arrival_rate = 500 per_s"
        )
        with pytest.raises(ScenarioError, match="unstable"):
            parse_scenario(text)

    def test_cache_larger_than_catalog_rejected(self):
        text = PRESETS["feasible-demo"].replace(
            "cache_files = 20000", "cache_files = 200000"
        )
        with pytest.raises(ScenarioError, match="cache_files exceeds catalog_files"):
            parse_scenario(text)

    def test_bad_coverage_method_rejected(self):
        text = PRESETS["feasible-demo"].replace(
            "coverage_method = closed_form", "coverage_method = magic"
        )
        with pytest.raises(ScenarioError, match="coverage_method"):
            parse_scenario(text)

    def test_comments_and_blank_lines_ignored(self):
        text = "# leading comment\n\n" + PRESETS["feasible-demo"]
        assert parse_scenario(text) == load_scenario("feasible-demo")


def run_cli(capsys, *argv) -> tuple[int, list[dict], str]:
    code = run(list(argv))
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out))) if captured.out else []
    return code, rows, captured.err


class TestCli:
    def test_eval_feasible_demo(self, capsys):
        code, rows, _ = run_cli(capsys, "eval", "--scenario", "feasible-demo")
        assert code == 0
        assert len(rows) == 1
        assert rows[0]["status"] == "feasible"
        assert float(rows[0]["coverage_prob"]) == pytest.approx(0.7117002803620072, rel=1e-12)
        assert float(rows[0]["backhaul_s"]) == pytest.approx(0.005050200803212852, rel=1e-12)

    def test_eval_baseline_reports_infeasible(self, capsys):
        code, rows, _ = run_cli(capsys, "eval", "--scenario", "paper-baseline")
        assert code == 2
        assert rows[0]["status"] == "infeasible"
        assert float(rows[0]["slack_s"]) < 0.0

    def test_optimize_joint_with_oracle(self, capsys):
        code, rows, _ = run_cli(
            capsys, "optimize", "--scenario", "feasible-demo", "--mode", "joint", "--oracle"
        )
        assert code == 0
        row = rows[0]
        assert row["status"] == "feasible"
        assert float(row["residual_delay"]) <= 1e-9
        assert abs(float(row["oracle_gap"])) < 0.05
        lam = float(row["bs_intensity_opt"])
        size = float(row["cache_size"])
        assert float(row["cache_intensity"]) == pytest.approx(lam * size, rel=1e-12)

    def test_optimize_baseline_infeasible_exit_code(self, capsys):
        code, rows, _ = run_cli(
            capsys, "optimize", "--scenario", "paper-baseline", "--mode", "fixed-lambda"
        )
        assert code == 2
        assert rows[0]["status"] == "infeasible"
        assert rows[0]["reason"] != ""

    def test_usage_errors_exit_1(self, capsys):
        assert run_cli(capsys, "optimize", "--scenario", "no-such-preset")[0] == 1
        assert run_cli(capsys, "optimize")[0] == 1
        assert run_cli(capsys, "frobnicate", "--scenario", "feasible-demo")[0] == 1
        assert run_cli(
            capsys, "sweep", "--scenario", "feasible-demo", "--axis", "nu",
            "--from", "1.2", "--to", "3.0", "--points", "0",
        )[0] == 1

    def test_sweep_csv_is_byte_identical_across_runs(self, tmp_path):
        argv = [
            "sweep", "--scenario", "feasible-demo", "--axis", "nu",
            "--from", "1.2", "--to", "2.4", "--points", "4",
            "--mode", "fixed-lambda",
        ]
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(argv + ["--out", str(out_a)]) == 0
        assert run(argv + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        assert out_a.read_bytes().endswith(b"\n")

    def test_simulate_deterministic(self, tmp_path):
        argv = [
            "simulate", "--scenario", "feasible-demo", "--kind", "queue",
            "--seed", "5", "--trials", "4000",
        ]
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(argv + ["--out", str(out_a)]) == 0
        assert run(argv + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_simulate_coverage_smoke(self, capsys):
        code, rows, _ = run_cli(
            capsys, "simulate", "--scenario", "feasible-demo", "--kind", "coverage",
            "--seed", "1", "--trials", "4000",
        )
        assert code == 0
        assert float(rows[0]["abs_gap_in_stderr"]) < 4.0

    def test_sweep_plot_renders_figure(self, tmp_path):
        out = tmp_path / "sweep.csv"
        fig = tmp_path / "sweep.png"
        code = run([
            "sweep", "--scenario", "feasible-demo", "--axis", "nu",
            "--from", "1.2", "--to", "2.4", "--points", "3",
            "--mode", "fixed-lambda", "--out", str(out), "--plot", str(fig),
        ])
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 1000

    def test_eval_plot_renders_figure(self, tmp_path):
        fig = tmp_path / "eval.png"
        code = run([
            "eval", "--scenario", "feasible-demo",
            "--out", str(tmp_path / "eval.csv"), "--plot", str(fig),
        ])
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 1000

    def test_float_formatting_round_trips(self, capsys):
        # repr-formatted floats parse back to the exact same binary value
        code, rows, _ = run_cli(capsys, "eval", "--scenario", "feasible-demo")
        assert code == 0
        value = float(rows[0]["backhaul_s"])
        assert repr(value) == rows[0]["backhaul_s"]
