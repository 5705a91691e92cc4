"""CLI command handlers - business logic separated from CLI layer."""

from __future__ import annotations

import time
from pathlib import Path
from typing import TYPE_CHECKING, Any

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from simdb.config import apply_overrides, build_config, validation_messages
from simdb.engine import SimulationReport, run, with_run_settings
from simdb.exceptions import ConfigLoadError, UnknownScenarioError
from simdb.report import (
    GATEWAY_COLUMNS,
    MEMORY_COLUMNS,
    THROUGHPUT_COLUMNS,
    TRACE_COLUMNS,
    compare_document,
    gateway_rows,
    memory_rows,
    summary_document,
    sweep_document,
    throughput_rows,
    trace_rows,
)
from simdb.workload import get_preset, get_scenario, list_presets, list_scenarios

from .errors import (
    ConfigParseError,
    ConfigValidationError,
    OutputWriteError,
    UnknownScenarioCLIError,
)
from .exporters import get_exporter
from .logging import get_logger

if TYPE_CHECKING:
    from simdb.config import ScenarioConfig

console = Console()


def write_text(path: Path, text: str) -> None:
    """Write a report file, creating parent directories.

    Raises:
        OutputWriteError: On any filesystem error
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as e:
        raise OutputWriteError(str(path), e) from e


def export(out: Path, stem: str, format: str, data: Any, **options: Any) -> Path:
    """Render ``data`` with the named exporter and write it as ``out/<stem><extension>``.

    Returns:
        The path written
    """
    exporter = get_exporter(format, **options)
    path = out / f"{stem}{exporter.get_file_extension()}"
    write_text(path, exporter.render(data))
    return path


def write_report(out: Path, report: SimulationReport) -> list[Path]:
    """Write summary.json, throughput.csv, memory.csv and gateways.csv into ``out``."""
    return [
        export(out, "summary", "json", summary_document(report)),
        export(out, "throughput", "csv", throughput_rows(report), columns=THROUGHPUT_COLUMNS),
        export(out, "memory", "csv", memory_rows(report), columns=MEMORY_COLUMNS),
        export(out, "gateways", "csv", gateway_rows(report), columns=GATEWAY_COLUMNS),
    ]


def timed_run(config: ScenarioConfig, label: str, **kwargs: Any) -> SimulationReport:
    """Run a simulation and log its outcome and wall-clock time."""
    started = time.perf_counter()
    report = run(config, **kwargs)
    elapsed_ms = (time.perf_counter() - started) * 1000
    get_logger().log_simulation(label, report.completed, report.failed, elapsed_ms)
    return report


def _report_table(title: str, reports: dict[str, SimulationReport]) -> Table:
    table = Table(title=title)
    table.add_column("Run", style="cyan")
    table.add_column("Completed", justify="right")
    table.add_column("Degraded", justify="right")
    table.add_column("OOM", justify="right")
    table.add_column("Timeout", justify="right")
    table.add_column("Mean latency (s)", justify="right")
    for label, report in reports.items():
        mean = report.latency.mean
        table.add_row(
            label,
            str(report.completed),
            str(report.completed_degraded),
            str(report.failed_oom),
            str(report.failed_timeout),
            f"{mean:.1f}" if mean is not None else "-",
        )
    return table


class RunHandler:
    """Handler for run command - one simulation, four report files."""

    def __init__(self, quiet: bool = False, check_invariants: bool = False):
        """Initialize run handler.

        Args:
            quiet: Whether to suppress output
            check_invariants: Verify simulation invariants after every event
        """
        self.quiet = quiet
        self.check_invariants = check_invariants

    def execute(
        self, config: ScenarioConfig, out: Path, seed: int | None = None
    ) -> SimulationReport:
        """Run the scenario and write its report.

        Args:
            config: Validated scenario
            out: Output directory
            seed: Seed replacing the scenario's workload seed

        Returns:
            The simulation report

        Raises:
            OutputWriteError: If a report file cannot be written
        """
        config = with_run_settings(config, seed=seed)
        if not self.quiet:
            console.print(
                f"[bold blue]Simulating {config.workload.clients} clients for "
                f"{config.engine.duration_seconds:.0f}s "
                f"(throttling {'on' if config.throttling else 'off'})...[/bold blue]"
            )

        report = timed_run(config, "run", check_invariants=self.check_invariants)
        written = write_report(out, report)

        if not self.quiet:
            console.print(_report_table("Simulation Summary", {"run": report}))
            for path in written:
                console.print(f"[green]✓[/green] Wrote {path}")
        return report


class CompareHandler:
    """Handler for compare command - the same scenario with throttling on and off."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def execute(
        self, config: ScenarioConfig, out: Path, seed: int | None = None
    ) -> dict[str, Any]:
        """Run the A/B pair and write both reports plus compare.json.

        Returns:
            The compare document
        """
        config = with_run_settings(config, seed=seed)
        if not self.quiet:
            console.print(
                f"[bold blue]Comparing throttled vs unthrottled "
                f"(seed {config.workload.seed})...[/bold blue]"
            )

        throttled = timed_run(config, "throttled", throttling=True)
        unthrottled = timed_run(config, "unthrottled", throttling=False)
        write_report(out / "throttled", throttled)
        write_report(out / "unthrottled", unthrottled)

        document = compare_document(throttled, unthrottled)
        export(out, "compare", "json", document)

        if not self.quiet:
            console.print(
                _report_table(
                    "Throttled vs Unthrottled",
                    {"throttled": throttled, "unthrottled": unthrottled},
                )
            )
            ratio = document["throughput_ratio"]
            ratio_text = f"{ratio:.3f}" if ratio is not None else "n/a"
            console.print(f"📊 Throughput ratio: [bold]{ratio_text}[/bold]")
            console.print(f"[green]✓[/green] Wrote {out / 'compare.json'}")
        return document


class TraceHandler:
    """Handler for trace command - a scripted scenario's per-task timeline."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def execute(
        self,
        scenario_name: str,
        out: Path,
        throttling: bool = True,
        overrides: list[str] | None = None,
    ) -> SimulationReport:
        """Run a scripted scenario and write trace.csv.

        Raises:
            UnknownScenarioCLIError: If the scenario is not registered
            ConfigValidationError: If overrides make the scenario invalid
            OutputWriteError: If trace.csv cannot be written
        """
        try:
            scenario = get_scenario(scenario_name)
        except UnknownScenarioError as e:
            raise UnknownScenarioCLIError(scenario_name, e.known) from e

        try:
            config = build_config(apply_overrides(scenario.config, overrides or []))
        except ConfigLoadError as e:
            raise ConfigParseError(e.source, e) from e
        except ValidationError as e:
            raise ConfigValidationError(f"scenario {scenario_name}", validation_messages(e)) from e

        report = timed_run(
            config,
            f"trace {scenario_name}",
            throttling=throttling,
            script=scenario.queries,
            trace=True,
        )
        path = export(out, "trace", "csv", trace_rows(report), columns=TRACE_COLUMNS)

        if not self.quiet:
            console.print(f"[bold blue]🔍 {scenario.description}[/bold blue]")
            console.print(f"  • {len(scenario.queries)} queries, {len(report.trace)} trace rows")
            console.print(f"[green]✓[/green] Wrote {path}")
        return report


class SweepHandler:
    """Handler for sweep command - A/B pairs across client counts."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def execute(
        self,
        config: ScenarioConfig,
        out: Path,
        client_counts: list[int],
        seed: int | None = None,
    ) -> dict[str, Any]:
        """Run throttled and unthrottled for each client count and write sweep.json.

        Returns:
            The sweep document
        """
        config = with_run_settings(config, seed=seed)
        results: list[tuple[int, SimulationReport, SimulationReport]] = []
        for clients in client_counts:
            document = config.resolved()
            document["workload"]["clients"] = clients
            scenario = build_config(document)
            if not self.quiet:
                console.print(f"[bold blue]Simulating {clients} clients...[/bold blue]")
            throttled = timed_run(scenario, f"clients={clients} throttled", throttling=True)
            unthrottled = timed_run(scenario, f"clients={clients} unthrottled", throttling=False)
            results.append((clients, throttled, unthrottled))

        document = sweep_document(results)
        path = export(out, "sweep", "json", document)

        if not self.quiet:
            table = Table(title="Client Sweep")
            table.add_column("Clients", justify="right", style="cyan")
            table.add_column("Throttled", justify="right")
            table.add_column("Unthrottled", justify="right")
            table.add_column("Ratio", justify="right")
            for entry in document["runs"]:
                ratio = entry["throughput_ratio"]
                table.add_row(
                    str(entry["clients"]),
                    str(entry["throttled"]["completed"]),
                    str(entry["unthrottled"]["completed"]),
                    f"{ratio:.3f}" if ratio is not None else "n/a",
                )
            console.print(table)
            console.print(f"[green]✓[/green] Wrote {path}")
        return document


class PresetsHandler:
    """Handler for presets command - list workload presets and trace scenarios."""

    def execute(self) -> dict[str, list[str]]:
        table = Table(title="Workload Presets")
        table.add_column("Name", style="cyan", no_wrap=True)
        table.add_column("Classes", justify="right")
        table.add_column("Description")
        for name in list_presets():
            workload = get_preset(name)
            table.add_row(name, str(len(workload.classes)), workload.description)
        console.print(table)

        scenarios = Table(title="Trace Scenarios")
        scenarios.add_column("Name", style="cyan", no_wrap=True)
        scenarios.add_column("Queries", justify="right")
        scenarios.add_column("Description")
        for name in list_scenarios():
            scenario = get_scenario(name)
            scenarios.add_row(name, str(len(scenario.queries)), scenario.description)
        console.print(scenarios)

        return {"presets": list_presets(), "scenarios": list_scenarios()}
