"""Structured logging for the simdb CLI."""

from __future__ import annotations

import logging
import traceback
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.logging import RichHandler

console = Console(stderr=True)

# Library loggers that share the CLI handlers
LIBRARY_LOGGERS = ("simdb_governor",)


class CLILogger:
    """Structured logger for CLI operations."""

    def __init__(self, name: str = "simdb", debug: bool = False):
        """Initialize CLI logger.

        Args:
            name: Logger name (also the simdb library's root logger)
            debug: Enable debug mode
        """
        self.name = name
        self.debug_mode = debug
        self.log_file: Path | None = None
        self._logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        level = logging.DEBUG if self.debug_mode else logging.INFO
        handlers: list[logging.Handler] = []

        console_handler = RichHandler(
            console=console,
            rich_tracebacks=True,
            show_time=self.debug_mode,
            show_path=self.debug_mode,
        )
        console_handler.setLevel(level)
        console_handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        handlers.append(console_handler)

        if self.debug_mode:
            log_dir = Path.home() / ".simdb" / "logs"
            log_dir.mkdir(parents=True, exist_ok=True)
            self.log_file = log_dir / "simdb.log"

            file_handler = logging.FileHandler(self.log_file)
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(
                logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
            )
            handlers.append(file_handler)

        logger = logging.getLogger(self.name)
        for target in (logger, *(logging.getLogger(n) for n in LIBRARY_LOGGERS)):
            target.setLevel(level)
            target.handlers.clear()
            for handler in handlers:
                target.addHandler(handler)
            target.propagate = False

        if self.log_file is not None:
            logger.debug(f"Debug logging to: {self.log_file}")
        return logger

    def debug(self, message: str, **kwargs: Any):
        if kwargs:
            message = f"{message} | {kwargs}"
        self._logger.debug(message)

    def info(self, message: str, **kwargs: Any):
        if kwargs:
            message = f"{message} | {kwargs}"
        self._logger.info(message)

    def warning(self, message: str, **kwargs: Any):
        if kwargs:
            message = f"{message} | {kwargs}"
        self._logger.warning(message)

    def error(self, message: str, **kwargs: Any):
        if kwargs:
            message = f"{message} | {kwargs}"
        self._logger.error(message)

    def log_command(self, command: str, args: dict[str, Any]):
        """Log command execution.

        Args:
            command: Command name
            args: Command arguments
        """
        self.debug(f"Executing command: {command}", args=args)

    def log_simulation(self, label: str, completed: int, failed: int, duration_ms: float):
        """Log a finished simulation run.

        Args:
            label: Which run (e.g. "throttled", "clients=35")
            completed: Completions after warm-up
            failed: Failures after warm-up
            duration_ms: Wall-clock time in milliseconds
        """
        self.debug(
            f"Simulation {label} finished",
            completed=completed,
            failed=failed,
            duration_ms=f"{duration_ms:.2f}",
        )

    def log_error(self, error: Exception, context: dict[str, Any] | None = None):
        """Log error with context; includes the traceback in debug mode."""
        context = context or {}
        self.error(f"Error: {error}", **context)

        if self.debug_mode:
            tb = "".join(traceback.format_exception(type(error), error, error.__traceback__))
            self.debug(f"Traceback:\n{tb}")


# Global logger instance
_logger: CLILogger | None = None


def get_logger(debug: bool = False) -> CLILogger:
    """Get or create global logger instance.

    Args:
        debug: Enable debug mode

    Returns:
        CLILogger instance
    """
    global _logger  # noqa: PLW0603
    if _logger is None or _logger.debug_mode != debug:
        _logger = CLILogger(debug=debug)
    return _logger


def setup_logging(debug: bool = False):
    """Set up logging for CLI."""
    get_logger(debug=debug)
