"""End-to-end command-line tests: outputs, exit codes, determinism."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import pytest

from ecobot import bundled_scenario_path, load_scenario
from ecobot.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from ecobot.csvio import read_frontier_csv, read_report_text

DEFAULT = str(bundled_scenario_path("default"))


def run_cli(*argv) -> int:
    return main(list(argv))


def read_rows(path: Path) -> list[dict]:
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ecobot-")
    return list(csv.DictReader(lines[1:]))


class TestSweepCommand:
    def test_grid_cardinality(self, tmp_path):
        assert run_cli("sweep", "--scenario", DEFAULT, "--out", str(tmp_path)) == EXIT_OK
        rows = read_rows(tmp_path / "sweep.csv")
        assert len(rows) == 12 * 10
        svg = (tmp_path / "sweep.svg").read_text()
        assert svg.startswith("<svg") and "</svg>" in svg

    def test_entropy_override_zero_gives_full_throughput(self, tmp_path):
        assert (
            run_cli(
                "sweep", "--scenario", DEFAULT, "--entropy", "0", "--out", str(tmp_path)
            )
            == EXIT_OK
        )
        rows = read_rows(tmp_path / "sweep.csv")
        assert all(float(r["throughput"]) == 1.0 for r in rows)
        assert all(r["energy_j"] != "" for r in rows)

    def test_reingested_frontier_matches_in_process(self, tmp_path):
        sweep_dir = tmp_path / "sweep"
        assert run_cli("sweep", "--scenario", DEFAULT, "--out", str(sweep_dir)) == EXIT_OK
        direct = tmp_path / "direct"
        reingested = tmp_path / "reingested"
        assert run_cli("frontier", "--scenario", DEFAULT, "--out", str(direct)) == EXIT_OK
        assert (
            run_cli(
                "frontier",
                "--grid",
                str(sweep_dir / "sweep.csv"),
                "--out",
                str(reingested),
            )
            == EXIT_OK
        )
        assert (direct / "frontier.csv").read_bytes() == (
            reingested / "frontier.csv"
        ).read_bytes()


class TestRunCommand:
    def test_fixed_hs_row_count(self, tmp_path):
        assert (
            run_cli(
                "run", "--scenario", DEFAULT, "--mode", "hs", "--out", str(tmp_path)
            )
            == EXIT_OK
        )
        rows = read_rows(tmp_path / "trace.csv")
        assert len(rows) == 20001
        assert float(rows[-1]["time_s"]) == 20.0

    def test_report_matches_independent_reintegration(self, tmp_path):
        assert run_cli("run", "--scenario", DEFAULT, "--out", str(tmp_path)) == EXIT_OK
        rows = read_rows(tmp_path / "trace.csv")
        e_motor = e_cpu = 0.0
        for a, b in zip(rows, rows[1:]):
            dt = float(b["time_s"]) - float(a["time_s"])
            e_motor += 0.5 * (float(a["p_motor_w"]) + float(b["p_motor_w"])) * dt
            e_cpu += 0.5 * (float(a["p_cpu_w"]) + float(b["p_cpu_w"])) * dt
        report = read_report_text((tmp_path / "report.txt").read_text())
        assert math.isclose(report["e_total_j"], e_motor + e_cpu, rel_tol=1e-12)
        assert math.isclose(report["e_motor_j"], e_motor, rel_tol=1e-12)

    def test_controlled_converges_before_ten_percent_distance(self, tmp_path):
        assert run_cli("run", "--scenario", DEFAULT, "--out", str(tmp_path)) == EXIT_OK
        decisions = read_rows(tmp_path / "decisions.csv")
        assert decisions[-1]["event"] == "converged"
        t_conv = float(decisions[-1]["time_s"])
        trace = read_rows(tmp_path / "trace.csv")
        pos = next(float(r["position_m"]) for r in trace if float(r["time_s"]) >= t_conv)
        total = float(trace[-1]["position_m"])
        assert pos < 0.1 * total

    def test_timeout_exit_code_flushes_partial_trace(self, tmp_path):
        sc_text = Path(DEFAULT).read_text().replace(
            "dt_s = 0.001", "dt_s = 0.001\nmax_ticks = 100"
        )
        sc_path = tmp_path / "tiny.toml"
        sc_path.write_text(sc_text)
        out = tmp_path / "out"
        assert (
            run_cli("run", "--scenario", str(sc_path), "--out", str(out))
            == EXIT_RUNTIME
        )
        assert len(read_rows(out / "trace.csv")) == 101
        assert not (out / "report.txt").exists()


@pytest.fixture(scope="module")
def compare_rows(tmp_path_factory):
    out = tmp_path_factory.mktemp("cmp")
    assert run_cli("compare", "--scenario", DEFAULT, "--out", str(out)) == EXIT_OK
    return read_rows(out / "compare.csv")


class TestCompareCommand:
    def test_cartesian_row_count(self, compare_rows):
        assert len(compare_rows) == 3 * 3 * 4

    def test_controlled_savings_vs_itself_is_zero(self, compare_rows):
        for row in compare_rows:
            if row["mode"] == "controlled":
                assert float(row["controlled_savings"]) == 0.0

    def test_savings_ordering_low_medium_high(self, compare_rows):
        means = {}
        for env in ("low", "medium", "high"):
            vals = [
                float(r["controlled_savings"])
                for r in compare_rows
                if r["environment"] == env and r["mode"] == "hs"
            ]
            assert len(vals) == 3
            assert all(v > 0 for v in vals)
            means[env] = sum(vals) / 3
        assert means["low"] >= means["medium"] >= means["high"]


class TestFrontierCommand:
    def test_three_complexities_one_argmin_each(self, tmp_path):
        argmin_speeds = []
        for env in ("low", "medium", "high"):
            out = tmp_path / env
            assert (
                run_cli(
                    "frontier",
                    "--scenario",
                    DEFAULT,
                    "--environment",
                    env,
                    "--out",
                    str(out),
                )
                == EXIT_OK
            )
            points = read_frontier_csv((out / "frontier.csv").read_text())
            flagged = [p for p in points if p[3]]
            assert len(flagged) == 1
            argmin_speeds.append(flagged[0][0])
        assert all(a >= b for a, b in zip(argmin_speeds, argmin_speeds[1:]))

    def test_zero_entropy_frontier_at_minimum_frequency(self, tmp_path):
        assert (
            run_cli(
                "frontier", "--scenario", DEFAULT, "--entropy", "0", "--out", str(tmp_path)
            )
            == EXIT_OK
        )
        sc = load_scenario(DEFAULT)
        f_min = sc.models.dvfs[0].frequency_hz
        points = read_frontier_csv((tmp_path / "frontier.csv").read_text())
        assert len(points) == 10
        assert all(p[1] == f_min for p in points)

    def test_empty_frontier_warns_and_exits_zero(self, tmp_path, capsys):
        assert (
            run_cli(
                "frontier",
                "--scenario",
                DEFAULT,
                "--app",
                "corner",
                "--entropy",
                "80",
                "--out",
                str(tmp_path),
            )
            == EXIT_OK
        )
        assert "no feasible configuration" in capsys.readouterr().err
        assert read_frontier_csv((tmp_path / "frontier.csv").read_text()) == []

    def test_requires_exactly_one_input(self, tmp_path):
        assert run_cli("frontier", "--out", str(tmp_path)) == EXIT_CONFIG
        assert (
            run_cli(
                "frontier",
                "--scenario",
                DEFAULT,
                "--grid",
                "x.csv",
                "--out",
                str(tmp_path),
            )
            == EXIT_CONFIG
        )


class TestExitCodes:
    def test_malformed_scenario_is_config_error(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("format = 'ecobot-scenario-v1'\n[motor]\nidle_w == 1\n")
        assert run_cli("run", "--scenario", str(bad), "--out", str(tmp_path)) == EXIT_CONFIG

    def test_unknown_key_is_config_error(self, tmp_path):
        text = Path(DEFAULT).read_text().replace("[motor]", "[motor]\nmystery = 1.0")
        bad = tmp_path / "bad.toml"
        bad.write_text(text)
        assert run_cli("run", "--scenario", str(bad), "--out", str(tmp_path)) == EXIT_CONFIG

    def test_missing_file_is_config_error(self, tmp_path):
        assert (
            run_cli("run", "--scenario", "/nope/missing.toml", "--out", str(tmp_path))
            == EXIT_CONFIG
        )

    def test_bad_mode_is_config_error(self, tmp_path):
        assert (
            run_cli(
                "run", "--scenario", DEFAULT, "--mode", "fixed:40,0", "--out", str(tmp_path)
            )
            == EXIT_CONFIG
        )


class TestDeterminism:
    def test_every_command_is_byte_identical_across_invocations(self, tmp_path):
        pairs = {
            "sweep": ["sweep", "--scenario", DEFAULT],
            "run": ["run", "--scenario", DEFAULT, "--mode", "as"],
            "frontier": ["frontier", "--scenario", DEFAULT],
        }
        for name, argv in pairs.items():
            out_a = tmp_path / f"{name}_a"
            out_b = tmp_path / f"{name}_b"
            assert run_cli(*argv, "--out", str(out_a)) == EXIT_OK
            assert run_cli(*argv, "--out", str(out_b)) == EXIT_OK
            for produced in sorted(out_a.iterdir()):
                assert produced.read_bytes() == (out_b / produced.name).read_bytes()
