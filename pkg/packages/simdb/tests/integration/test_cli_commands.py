"""End-to-end tests for the simdb CLI."""

import json
from pathlib import Path

import pytest
from simdb.cli.main import cli
from simdb.workload import ScriptedQuery, ScriptedScenario, register_scenario
from simdb_governor import MB

pytestmark = pytest.mark.integration


def _json(path: Path) -> dict:
    return json.loads(path.read_text())


def _text(result) -> str:
    """CLI output with line wrapping undone."""
    return " ".join(result.output.split())


class TestRunCommand:
    """Tests for `simdb run`."""

    def test_writes_report_files(self, runner, scenario_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            cli, ["run", "--config", str(scenario_file), "--seed", "3", "--out", str(out)]
        )

        assert result.exit_code == 0, result.output
        assert "Simulation Summary" in _text(result)
        for name in ("summary.json", "throughput.csv", "memory.csv", "gateways.csv"):
            assert (out / name).is_file()

        summary = _json(out / "summary.json")
        assert summary["format_version"] == 1
        assert summary["seed"] == 3
        assert summary["config"]["workload"]["seed"] == 3
        assert summary["window"]["slices"] == 4

        throughput = (out / "throughput.csv").read_text().splitlines()
        header = "slice_start_s,completed,completed_degraded,failed_oom,failed_timeout"
        assert throughput[0] == header
        assert [line.split(",")[0] for line in throughput[1:]] == [
            "0.000",
            "30.000",
            "60.000",
            "90.000",
        ]

    def test_same_seed_same_files(self, runner, scenario_file, tmp_path):
        for name in ("a", "b"):
            args = ["run", "--config", str(scenario_file), "--out", str(tmp_path / name), "-q"]
            assert runner.invoke(cli, args).exit_code == 0

        for name in ("summary.json", "throughput.csv", "memory.csv", "gateways.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_override_echoed_in_summary(self, runner, scenario_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            cli,
            [
                "run",
                "--config",
                str(scenario_file),
                "--override",
                "throttling=off",
                "--override",
                "workload.clients=2",
                "--out",
                str(out),
                "-q",
            ],
        )

        assert result.exit_code == 0, result.output
        config = _json(out / "summary.json")["config"]
        assert config["throttling"] is False
        assert config["workload"]["clients"] == 2

    def test_invalid_field_exits_2(self, runner, scenario_file, tmp_path):
        result = runner.invoke(
            cli,
            [
                "run",
                "--config",
                str(scenario_file),
                "--override",
                "engine.duration_seconds=-5",
                "--out",
                str(tmp_path / "out"),
            ],
        )

        assert result.exit_code == 2
        assert "engine.duration_seconds" in result.output
        assert not (tmp_path / "out").exists()

    def test_syntax_error_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"cpu_count": }')

        result = runner.invoke(cli, ["run", "--config", str(bad), "--out", str(tmp_path / "o")])

        assert result.exit_code == 2
        assert "invalid JSON" in _text(result)

    def test_missing_config_exits_2(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", "--config", str(tmp_path / "nope.json")])
        assert result.exit_code == 2

    def test_malformed_override_exits_2(self, runner, scenario_file):
        result = runner.invoke(cli, ["run", "--config", str(scenario_file), "--override", "oops"])
        assert result.exit_code == 2

    def test_unwritable_output_exits_1(self, runner, scenario_file, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")

        result = runner.invoke(
            cli, ["run", "--config", str(scenario_file), "--out", str(blocker / "out"), "-q"]
        )

        assert result.exit_code == 1
        assert "Cannot write" in _text(result)

    def test_preferences_supply_out_dir(self, runner, scenario_file, tmp_path):
        (tmp_path / ".simdb.yaml").write_text("out: from-prefs\nquiet: true\n")

        result = runner.invoke(cli, ["run", "--config", str(scenario_file)])

        assert result.exit_code == 0, result.output
        assert (tmp_path / "from-prefs" / "summary.json").is_file()

    def test_env_out_dir(self, runner, scenario_file, tmp_path, monkeypatch):
        monkeypatch.setenv("SIMDB_OUT", str(tmp_path / "from-env"))

        result = runner.invoke(cli, ["run", "--config", str(scenario_file), "-q"])

        assert result.exit_code == 0, result.output
        assert (tmp_path / "from-env" / "summary.json").is_file()


class TestCompareCommand:
    """Tests for `simdb compare`."""

    def test_writes_both_reports(self, runner, scenario_file, tmp_path):
        out = tmp_path / "ab"
        result = runner.invoke(
            cli, ["compare", "--config", str(scenario_file), "--seed", "5", "--out", str(out)]
        )

        assert result.exit_code == 0, result.output
        assert "Throughput ratio" in _text(result)
        assert _json(out / "throttled" / "summary.json")["config"]["throttling"] is True
        assert _json(out / "unthrottled" / "summary.json")["config"]["throttling"] is False

        document = _json(out / "compare.json")
        assert document["seed"] == 5
        completed = document["completed"]
        assert completed["delta"] == completed["throttled"] - completed["unthrottled"]
        assert set(document["failures"]) == {"oom", "timeout", "total"}
        assert len(document["slices"]) == 4


class TestTraceCommand:
    """Tests for `simdb trace`."""

    def test_fig2_trace_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["trace", "fig2", "--out", str(tmp_path)])

        assert result.exit_code == 0, result.output
        lines = (tmp_path / "trace.csv").read_text().splitlines()
        assert lines[0] == "time_s,task_id,memory_bytes,state,held_tiers"
        assert "12.000,Q1,8388608,BLOCKED,-" in lines
        assert "29.000,Q1,41943040,RUNNING,012" in lines
        assert "22.000,Q3,6291456,BLOCKED,-" in lines

    def test_fig2_without_throttling(self, runner, tmp_path):
        result = runner.invoke(cli, ["trace", "fig2", "--no-throttling", "--out", str(tmp_path)])

        assert result.exit_code == 0, result.output
        assert "BLOCKED" not in (tmp_path / "trace.csv").read_text()

    def test_registered_scenario_is_traceable(self, runner, tmp_path):
        register_scenario(
            "solo_cli",
            lambda: ScriptedScenario(
                name="solo_cli",
                description="One compilation that stays under the first gateway",
                config={
                    "physical_bytes": "1GB",
                    "cpu_count": 1,
                    "engine": {"warmup_seconds": 0, "duration_seconds": 30},
                },
                queries=(ScriptedQuery("S1", 0.0, 2 * MB, 4.0),),
            ),
        )

        result = runner.invoke(cli, ["trace", "solo_cli", "--out", str(tmp_path)])

        assert result.exit_code == 0, result.output
        rows = (tmp_path / "trace.csv").read_text().splitlines()[1:]
        assert rows
        assert all(",S1," in row and row.endswith(",-") for row in rows)

    def test_unknown_scenario_exits_2(self, runner, tmp_path):
        result = runner.invoke(cli, ["trace", "nope", "--out", str(tmp_path)])

        assert result.exit_code == 2
        assert "Unknown trace scenario" in _text(result)
        assert "fig2" in result.output


class TestSweepCommand:
    """Tests for `simdb sweep`."""

    def test_sweep_document(self, runner, scenario_file, tmp_path):
        result = runner.invoke(
            cli,
            ["sweep", "--config", str(scenario_file), "--clients", "1,3", "--out", str(tmp_path)],
        )

        assert result.exit_code == 0, result.output
        document = _json(tmp_path / "sweep.json")
        assert [entry["clients"] for entry in document["runs"]] == [1, 3]
        for entry in document["runs"]:
            assert set(entry) == {"clients", "throughput_ratio", "throttled", "unthrottled"}

    @pytest.mark.parametrize("clients", ["0", "3,x", ""])
    def test_bad_client_list_exits_2(self, runner, clients):
        result = runner.invoke(cli, ["sweep", "--clients", clients])
        assert result.exit_code == 2


class TestMiscCommands:
    """Tests for `simdb presets` and group options."""

    def test_presets_lists_workloads_and_scenarios(self, runner):
        result = runner.invoke(cli, ["presets"])

        assert result.exit_code == 0, result.output
        for name in ("sales_default", "light_adhoc", "mixed_adhoc", "fig2"):
            assert name in result.output

    def test_help_lists_commands(self, runner):
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        for command in ("run", "compare", "trace", "sweep", "presets"):
            assert command in result.output

    def test_seed_must_be_unsigned(self, runner):
        result = runner.invoke(cli, ["run", "--seed", "-1"])
        assert result.exit_code == 2
