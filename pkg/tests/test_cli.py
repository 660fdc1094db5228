"""Tests for the command-line interface."""

import io
import json
import math

import pandas as pd
import pytest

from prophet_thresholds.app.main import run
from prophet_thresholds.services.probcore import gamma
from prophet_thresholds.services.storage import save_instance
from prophet_thresholds.services.verify import suite
from prophet_thresholds.services.verify.reference import VARPHI_REFERENCE


@pytest.fixture
def instance_file(tmp_path, four_ones):
    path = tmp_path / "four_ones.json"
    save_instance(four_ones, path)
    return str(path)


def output_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestConstants:
    def test_gamma(self, capsys):
        assert run(["gamma", "--k", "1"]) == 0
        result = output_json(capsys)
        assert result["k"] == 1
        assert result["gamma"] == pytest.approx(1.0 - math.exp(-1.0))

    def test_constants(self, capsys):
        assert run(["constants", "--k", "2"]) == 0
        result = output_json(capsys)
        assert set(result) == {"k", "gamma", "w", "stockout_target"}
        assert result["gamma"] == pytest.approx(gamma(2))

    def test_invalid_supply(self, capsys):
        assert run(["gamma", "--k", "0"]) == 1
        assert "Supply must be a positive integer" in capsys.readouterr().err


class TestCalibrate:
    def test_explicit_target(self, instance_file, capsys):
        code = run(["calibrate", "--instance", instance_file, "--statistic", "expected_demand", "--target", "2"])
        assert code == 0
        result = output_json(capsys)
        assert result["t"] == 1.0
        assert result["p"] == pytest.approx(0.5, abs=1e-10)
        assert result["achieved"] == pytest.approx(2.0, abs=1e-10)

    def test_designated_target(self, instance_file, capsys):
        code = run(
            ["calibrate", "--instance", instance_file, "--statistic", "expected_utilization", "--paper-target"]
        )
        assert code == 0
        result = output_json(capsys)
        assert result["target"] == pytest.approx(gamma(2))

    def test_target_required(self, instance_file):
        assert run(["calibrate", "--instance", instance_file, "--statistic", "expected_demand"]) == 2

    def test_unattainable(self, instance_file, capsys):
        code = run(["calibrate", "--instance", instance_file, "--statistic", "expected_demand", "--target", "9"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        missing = str(tmp_path / "missing.json")
        assert run(["calibrate", "--instance", missing, "--statistic", "expected_demand", "--target", "1"]) == 1


class TestEvaluate:
    def test_performance_only(self, instance_file, capsys):
        assert run(["evaluate", "--instance", instance_file, "--t", "1", "--p", "0.5"]) == 0
        result = output_json(capsys)
        assert result["performance"] == pytest.approx(1.625)
        assert "prophet" not in result

    def test_with_benchmarks(self, instance_file, capsys):
        code = run(
            ["evaluate", "--instance", instance_file, "--t", "1", "--p", "0.5", "--benchmarks",
             "--prophet-mode", "layered"]
        )
        assert code == 0
        result = output_json(capsys)
        assert result["prophet"] == pytest.approx(2.0)
        assert result["prophet_mode"] == "layered"
        assert result["ratio_lp"] == pytest.approx(1.625 / 2.0)

    def test_invalid_policy(self, instance_file, capsys):
        assert run(["evaluate", "--instance", instance_file, "--t", "1", "--p", "1.5"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_simulate(self, instance_file, capsys):
        code = run(
            ["simulate", "--instance", instance_file, "--t", "1", "--p", "0.5", "--trials", "50000", "--seed", "3"]
        )
        assert code == 0
        result = output_json(capsys)
        assert result["trials"] == 50_000
        assert abs(result["estimate"] - 1.625) <= 4 * result["std_error"]


class TestReproduce:
    def test_table_to_file(self, tmp_path):
        out = tmp_path / "nested" / "varphi.csv"
        assert run(["reproduce", "table-varphi", "--out", str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame["k"]) == list(VARPHI_REFERENCE)
        assert frame.loc[0, "l=1"] == pytest.approx(0.1159)

    def test_figure1_to_stdout(self, capsys):
        assert run(["reproduce", "figure1", "--k-max", "4"]) == 0
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(frame.columns) == ["k", "gamma", "demand_guarantee"]
        assert frame["demand_guarantee"].iloc[0] == pytest.approx(0.5)

    def test_figure2(self, capsys):
        assert run(["reproduce", "figure2", "--k", "2", "--n-max", "10"]) == 0
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(frame["n"]) == list(range(2, 11))
        assert frame["expected_ar"].iloc[0] == pytest.approx(2.0 / 3.0)

    def test_example2(self, capsys):
        assert run(["reproduce", "example2", "--k", "1", "--eps", "0.01", "0.001"]) == 0
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert len(frame) == 2
        assert (frame["ratio"] < gamma(1)).all()

    def test_figure3(self, capsys):
        assert run(["reproduce", "figure3", "--k", "1", "--points", "5"]) == 0
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(frame.columns) == ["level", "bound", "ar_value", "p_root"]
        assert len(frame) == 6
        assert frame["level"].is_monotonic_increasing
        assert (frame["bound"] <= frame["level"] + 1e-12).all()
        assert frame.loc[frame["bound"].idxmax(), "level"] == pytest.approx(gamma(1))

    def test_example1(self, tmp_path):
        out = tmp_path / "example1.csv"
        code = run(
            ["reproduce", "example1", "--k", "1", "--n", "200", "--trials", "20000", "--grid-points", "11",
             "--out", str(out)]
        )
        assert code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == [
            "accept_prob", "performance", "ratio", "envelope", "prophet", "prophet_std_error",
        ]
        assert len(frame) == 11
        assert frame["accept_prob"].iloc[0] == 0.0 and frame["accept_prob"].iloc[-1] == 1.0
        assert (frame["ratio"] <= frame["envelope"]).all()


class TestVerify:
    @pytest.fixture
    def small_suite(self, monkeypatch):
        checks = (("first", lambda profile: (True, "fine")), ("second", lambda profile: (True, "also fine")))
        monkeypatch.setattr(suite, "CHECKS", checks)

    def test_all_checks_pass(self, small_suite, tmp_path, capsys):
        out = tmp_path / "summary.json"
        assert run(["verify", "all", "--fast", "--out", str(out)]) == 0
        result = output_json(capsys)
        assert result["passed"] and result["fast"]
        assert [c["name"] for c in result["checks"]] == ["first", "second"]
        assert set(result["checks"][0]) == {"name", "passed", "detail", "seconds"}
        assert json.loads(out.read_text()) == result

    def test_failed_check_exits_nonzero(self, monkeypatch, capsys):
        monkeypatch.setattr(suite, "CHECKS", (("broken", lambda profile: (False, "no")),))
        assert run(["verify", "all", "--fast"]) == 1
        result = output_json(capsys)
        assert not result["passed"]
        assert result["checks"][0]["detail"] == "no"

    def test_suite_name_required(self):
        assert run(["verify"]) == 2


class TestUsage:
    def test_unknown_command(self):
        assert run(["frobnicate"]) == 2

    def test_missing_command(self):
        assert run([]) == 2

    def test_version(self, capsys):
        assert run(["--version"]) == 0
        assert "prophet-thresholds" in capsys.readouterr().out
