"""CLI error types with context-aware messaging."""

from __future__ import annotations


class CLIError(Exception):
    """Base CLI error with user-friendly messaging."""

    def __init__(self, message: str, suggestion: str | None = None, exit_code: int = 1):
        """Initialize CLI error.

        Args:
            message: Error message to display
            suggestion: Optional suggestion for fixing the error
            exit_code: Exit code to use when terminating
        """
        self.message = message
        self.suggestion = suggestion
        self.exit_code = exit_code
        super().__init__(message)


class ConfigValidationError(CLIError):
    """Scenario document failed validation."""

    def __init__(self, source: str, problems: list[str]):
        """Initialize config validation error.

        Args:
            source: Config file path, or a description of the defaults used
            problems: One ``field.path: message`` line per failing field
        """
        details = "\n".join(f"  {line}" for line in problems)
        super().__init__(
            f"Invalid scenario configuration ({source}):\n{details}",
            "Fix the listed fields; unknown keys are rejected. Byte sizes accept KB/MB/GB suffixes",
            exit_code=2,
        )
        self.source = source
        self.problems = problems


class ConfigParseError(CLIError):
    """Scenario file could not be read or parsed."""

    def __init__(self, location: str, original_error: Exception):
        """Initialize config parse error.

        Args:
            location: ``path:line:col`` of the problem (or just the path)
            original_error: Underlying load error
        """
        super().__init__(
            f"Cannot load scenario: {original_error}",
            f"Check the syntax at {location}; .json files are JSON, .yaml/.yml files are YAML",
            exit_code=2,
        )
        self.location = location
        self.original_error = original_error


class UnknownScenarioCLIError(CLIError):
    """Requested trace scenario is not registered."""

    def __init__(self, name: str, known: list[str]):
        """Initialize unknown scenario error.

        Args:
            name: Requested scenario
            known: Registered scenario names
        """
        super().__init__(
            f"Unknown trace scenario: {name}",
            f"Available scenarios: {', '.join(known) or '(none)'}",
            exit_code=2,
        )
        self.name = name
        self.known = known


class OutputWriteError(CLIError):
    """Report file could not be written."""

    def __init__(self, path: str, original_error: Exception):
        """Initialize output write error.

        Args:
            path: File or directory that failed
            original_error: Underlying OS error
        """
        super().__init__(
            f"Cannot write {path}",
            f"Check that the output directory is writable. Error: {original_error}",
            exit_code=1,
        )
        self.path = path
        self.original_error = original_error
