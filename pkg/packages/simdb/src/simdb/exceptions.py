"""
Custom exceptions with helpful error messages.

All exceptions inherit from SimdbError and provide:
- Clear error descriptions
- Actionable suggestions for resolving the issue

Exception Categories:
- Simulation errors: SimulationStateError, InvariantViolationError, LedgerError
- Workload errors: WorkloadValidationError, UnknownPresetError, UnknownScenarioError
- Configuration errors: ConfigLoadError
"""

from __future__ import annotations


class SimdbError(Exception):
    """Base exception for simdb errors."""

    pass


class SimulationStateError(SimdbError):
    """Operation not allowed in the simulator's current state."""

    def __init__(self, operation: str, reason: str):
        super().__init__(
            f"Cannot {operation}: {reason}.\n\n"
            f"Suggestions:\n"
            f"1. Configure throttling before calling run()\n"
            f"2. Build a new Simulator for every run"
        )
        self.operation = operation
        self.reason = reason


class InvariantViolationError(SimdbError):
    """A simulation invariant failed while invariant checking was enabled."""

    def __init__(self, check: str, detail: str, time: float):
        super().__init__(f"Invariant '{check}' violated at t={time:.3f}: {detail}")
        self.check = check
        self.detail = detail
        self.time = time


class LedgerError(SimdbError):
    """Allocation beyond free memory, or release beyond a component's usage."""

    def __init__(self, component: str, operation: str, requested: int, available: int):
        super().__init__(
            f"Cannot {operation} {requested} bytes for '{component}' "
            f"(only {available} available).\n\n"
            f"Suggestions:\n"
            f"1. Route allocations through Simulator.try_allocate()\n"
            f"2. Release exactly what was allocated"
        )
        self.component = component
        self.operation = operation
        self.requested = requested
        self.available = available


class WorkloadValidationError(SimdbError):
    """Query class or workload definition violates its invariants."""

    def __init__(self, subject: str, reason: str):
        super().__init__(
            f"Invalid workload '{subject}': {reason}.\n\n"
            f"Suggestions:\n"
            f"1. Class weights must be positive and sum to 1\n"
            f"2. Ranges are [low, high] with low <= high; durations must be > 0"
        )
        self.subject = subject
        self.reason = reason


class UnknownPresetError(SimdbError):
    """Workload preset name is not registered."""

    def __init__(self, name: str, known: list[str]):
        super().__init__(
            f"Unknown workload preset '{name}'.\n\n"
            f"Suggestions:\n"
            f"1. Available presets: {', '.join(known) or '(none)'}\n"
            f"2. Define query classes inline under workload.classes"
        )
        self.name = name
        self.known = known


class UnknownScenarioError(SimdbError):
    """Trace scenario name is not registered."""

    def __init__(self, name: str, known: list[str]):
        super().__init__(
            f"Unknown trace scenario '{name}'.\n\n"
            f"Suggestions:\n"
            f"1. Available scenarios: {', '.join(known) or '(none)'}\n"
            f"2. Run 'simdb presets' to list scenarios"
        )
        self.name = name
        self.known = known


class ConfigLoadError(SimdbError):
    """Scenario file could not be read or parsed."""

    def __init__(
        self, source: str, reason: str, line: int | None = None, column: int | None = None
    ):
        location = source
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {reason}")
        self.source = source
        self.reason = reason
        self.line = line
        self.column = column
