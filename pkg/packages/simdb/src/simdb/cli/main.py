"""CLI commands for simdb - presentation layer only."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import NoReturn

import click
from rich.console import Console

from .config import load_config
from .errors import CLIError
from .handlers import CompareHandler, PresetsHandler, RunHandler, SweepHandler, TraceHandler
from .logging import CLILogger, get_logger, setup_logging
from .utils import display_error, load_scenario_config, parse_client_counts

console = Console()

SEED = click.IntRange(0, 2**64 - 1)

config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path, dir_okay=False),
    default=None,
    help="Scenario file (.json or .yaml); canonical defaults when omitted",
)
seed_option = click.option("--seed", type=SEED, default=None, help="Master seed (U64)")
out_option = click.option(
    "--out", type=click.Path(path_type=Path, file_okay=False), default=None, help="Output directory"
)
override_option = click.option(
    "--override",
    "overrides",
    multiple=True,
    metavar="KEY=VALUE",
    help="Override a scenario setting by dotted path (repeatable)",
)
quiet_option = click.option("--quiet", "-q", is_flag=True, help="Quiet mode")


def _fail(logger: CLILogger, error: Exception, context: dict[str, str]) -> NoReturn:
    """Log, display and exit with the error's code (1 for unexpected errors)."""
    logger.log_error(error, context)
    display_error(error)
    sys.exit(error.exit_code if isinstance(error, CLIError) else 1)


@click.group()
@click.version_option(package_name="simdb")
@click.option("--debug", is_flag=True, help="Enable debug mode with verbose logging")
@click.pass_context
def cli(ctx: click.Context, debug: bool) -> None:
    """simdb - DBMS memory simulator for compilation-throttling experiments."""
    setup_logging(debug=debug)

    ctx.ensure_object(dict)
    ctx.obj["config"] = load_config()
    ctx.obj["debug"] = debug


@cli.command()
@config_option
@seed_option
@out_option
@override_option
@quiet_option
@click.option(
    "--check-invariants", is_flag=True, help="Verify simulation invariants after every event"
)
@click.pass_context
def run(
    ctx: click.Context,
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    overrides: tuple[str, ...],
    quiet: bool,
    check_invariants: bool,
) -> None:
    """Run one scenario and write summary.json plus throughput, memory and gateway CSVs.

    Examples:

        \b
        simdb run --config sales30.json --seed 7 --out out/
        simdb run --config sales30.json --override throttling=off
    """
    prefs = ctx.obj["config"]
    logger = get_logger(debug=ctx.obj["debug"])

    if seed is None:
        seed = prefs.get_seed()
    if out is None:
        out = prefs.get_out_dir()
    if not quiet:
        quiet = prefs.get_quiet()

    logger.log_command(
        "run", {"config": str(config_path), "seed": seed, "overrides": list(overrides)}
    )

    try:
        config = load_scenario_config(config_path, overrides)
        RunHandler(quiet=quiet, check_invariants=check_invariants).execute(config, out, seed)
    except Exception as e:
        _fail(logger, e, {"command": "run", "config": str(config_path)})


@cli.command()
@config_option
@seed_option
@out_option
@override_option
@quiet_option
@click.pass_context
def compare(
    ctx: click.Context,
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    overrides: tuple[str, ...],
    quiet: bool,
) -> None:
    """Run a scenario with throttling on and off using the same seed.

    Writes throttled/ and unthrottled/ report directories and compare.json.
    """
    prefs = ctx.obj["config"]
    logger = get_logger(debug=ctx.obj["debug"])

    if seed is None:
        seed = prefs.get_seed()
    if out is None:
        out = prefs.get_out_dir()
    if not quiet:
        quiet = prefs.get_quiet()

    logger.log_command(
        "compare", {"config": str(config_path), "seed": seed, "overrides": list(overrides)}
    )

    try:
        config = load_scenario_config(config_path, overrides)
        CompareHandler(quiet=quiet).execute(config, out, seed)
    except Exception as e:
        _fail(logger, e, {"command": "compare", "config": str(config_path)})


@cli.command()
@click.argument("scenario")
@out_option
@override_option
@quiet_option
@click.option(
    "--throttling/--no-throttling", default=True, help="Enable the compilation gateways"
)
@click.pass_context
def trace(
    ctx: click.Context,
    scenario: str,
    out: Path | None,
    overrides: tuple[str, ...],
    quiet: bool,
    throttling: bool,
) -> None:
    """Run a scripted scenario (e.g. fig2) and write its per-task timeline to trace.csv."""
    prefs = ctx.obj["config"]
    logger = get_logger(debug=ctx.obj["debug"])

    if out is None:
        out = prefs.get_out_dir()
    if not quiet:
        quiet = prefs.get_quiet()

    logger.log_command("trace", {"scenario": scenario, "throttling": throttling})

    try:
        TraceHandler(quiet=quiet).execute(scenario, out, throttling, list(overrides))
    except Exception as e:
        _fail(logger, e, {"command": "trace", "scenario": scenario})


@cli.command()
@config_option
@click.option(
    "--clients", default="30,35,40", show_default=True, help="Comma-separated client counts"
)
@seed_option
@out_option
@override_option
@quiet_option
@click.pass_context
def sweep(
    ctx: click.Context,
    config_path: Path | None,
    clients: str,
    seed: int | None,
    out: Path | None,
    overrides: tuple[str, ...],
    quiet: bool,
) -> None:
    """Compare throttled and unthrottled runs across client counts (writes sweep.json)."""
    prefs = ctx.obj["config"]
    logger = get_logger(debug=ctx.obj["debug"])

    if seed is None:
        seed = prefs.get_seed()
    if out is None:
        out = prefs.get_out_dir()
    if not quiet:
        quiet = prefs.get_quiet()

    logger.log_command("sweep", {"config": str(config_path), "clients": clients, "seed": seed})

    try:
        counts = parse_client_counts(clients)
        config = load_scenario_config(config_path, overrides)
        SweepHandler(quiet=quiet).execute(config, out, counts, seed)
    except Exception as e:
        _fail(logger, e, {"command": "sweep", "config": str(config_path)})


@cli.command()
@click.pass_context
def presets(ctx: click.Context) -> None:
    """List workload presets and scripted trace scenarios."""
    logger = get_logger(debug=ctx.obj["debug"])
    logger.log_command("presets", {})
    try:
        PresetsHandler().execute()
    except Exception as e:
        _fail(logger, e, {"command": "presets"})


if __name__ == "__main__":
    cli()
