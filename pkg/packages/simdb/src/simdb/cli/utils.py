"""CLI utility functions."""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from simdb.config import ScenarioConfig, load_scenario, validation_messages
from simdb.exceptions import ConfigLoadError

from .errors import CLIError, ConfigParseError, ConfigValidationError

console = Console()


def load_scenario_config(config_path: Path | None, overrides: Iterable[str]) -> ScenarioConfig:
    """Load, override and validate a scenario, translating failures into CLI errors.

    Args:
        config_path: Scenario file, or None for the canonical defaults
        overrides: ``KEY=VALUE`` strings

    Returns:
        Validated scenario

    Raises:
        ConfigParseError: Unreadable or syntactically invalid file, malformed override
        ConfigValidationError: Document failed validation
    """
    source = str(config_path) if config_path is not None else "built-in defaults"
    try:
        return load_scenario(config_path, list(overrides))
    except ConfigLoadError as e:
        location = e.source
        if e.line is not None:
            location = f"{e.source}:{e.line}" + (f":{e.column}" if e.column else "")
        raise ConfigParseError(location, e) from e
    except ValidationError as e:
        raise ConfigValidationError(source, validation_messages(e)) from e


def parse_client_counts(value: str) -> list[int]:
    """Parse ``30,35,40`` into client counts.

    Raises:
        CLIError: If any entry is not a positive integer
    """
    counts = []
    for part in value.split(","):
        part = part.strip()
        if not part.isdigit() or int(part) < 1:
            raise CLIError(
                f"Invalid client count: '{part}'",
                "Use a comma-separated list of positive integers, e.g. --clients 30,35,40",
                exit_code=2,
            )
        counts.append(int(part))
    return counts


def display_error(error: Exception) -> None:
    """Display error message with optional suggestion."""
    if isinstance(error, CLIError):
        console.print(f"[red]❌ Error:[/red] {escape(error.message)}")
        if error.suggestion:
            console.print(f"[blue]💡 Suggestion:[/blue] {escape(error.suggestion)}")
    else:
        console.print(f"[red]❌ Error:[/red] {escape(str(error))}")
