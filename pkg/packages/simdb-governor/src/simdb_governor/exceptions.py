"""
Custom exceptions with helpful error messages.

All exceptions inherit from GovernorError and provide:
- Clear error descriptions
- Actionable suggestions for resolving the issue

Exception Categories:
- Broker errors: DuplicateComponentError, UnknownComponentError, FloorOverflowError,
  TimeRegressionError, InvalidUsageError, InvalidBrokerConfigError
- Gateway errors: InvalidPolicyError, AllocationOrderError, TaskStateError, TierNotHeldError
- Invariant errors: CircularWaitError, GatewayInvariantError
"""

from __future__ import annotations


class GovernorError(Exception):
    """Base exception for simdb-governor errors."""

    pass


class DuplicateComponentError(GovernorError):
    """Component id is already registered with the broker."""

    def __init__(self, component: str):
        super().__init__(
            f"Component '{component}' is already registered.\n\n"
            f"Suggestions:\n"
            f"1. Register each memory consumer exactly once\n"
            f"2. Use broker.account('{component}') to get the existing handle"
        )
        self.component = component


class UnknownComponentError(GovernorError):
    """Component id was never registered."""

    def __init__(self, component: str, known: list[str] | None = None):
        known_str = ", ".join(known) if known else "none"
        super().__init__(
            f"Component '{component}' is not registered.\n\n"
            f"Suggestions:\n"
            f"1. Check the component id spelling (registered: {known_str})\n"
            f"2. Call broker.register_component('{component}', ...) first"
        )
        self.component = component


class FloorOverflowError(GovernorError):
    """Sum of component floors would reach or exceed physical memory."""

    def __init__(self, component: str, floors_total: int, physical_bytes: int):
        super().__init__(
            f"Registering '{component}' brings the floor total to {floors_total} bytes, "
            f"which is not below physical memory ({physical_bytes} bytes).\n\n"
            f"Suggestions:\n"
            f"1. Lower the floor_bytes of one or more components\n"
            f"2. Increase physical_bytes in the broker configuration"
        )
        self.component = component
        self.floors_total = floors_total
        self.physical_bytes = physical_bytes


class TimeRegressionError(GovernorError):
    """A timestamp went backwards."""

    def __init__(self, subject: str, now: float, last: float):
        super().__init__(
            f"Time went backwards for '{subject}': {now} < {last}.\n\n"
            f"Suggestions:\n"
            f"1. Report samples in non-decreasing time order\n"
            f"2. Equal timestamps are allowed and overwrite the previous sample"
        )
        self.subject = subject
        self.now = now
        self.last = last


class InvalidUsageError(GovernorError):
    """Usage report is negative."""

    def __init__(self, component: str, usage_bytes: int):
        super().__init__(
            f"Usage for '{component}' must be >= 0, got {usage_bytes}.\n\n"
            f"Suggestions:\n"
            f"1. Report absolute usage, not deltas"
        )
        self.component = component
        self.usage_bytes = usage_bytes


class InvalidBrokerConfigError(GovernorError):
    """Broker configuration violates its invariants."""

    def __init__(self, reason: str):
        super().__init__(f"Invalid broker configuration: {reason}")
        self.reason = reason


class InvalidPolicyError(GovernorError):
    """Gateway policy violates its invariants."""

    def __init__(self, reason: str):
        super().__init__(
            f"Invalid gateway policy: {reason}\n\n"
            f"Suggestions:\n"
            f"1. Timeouts must strictly increase: (small < medium < large)\n"
            f"2. Fractions must be in (0, 1) and small_fraction + medium_fraction < 1\n"
            f"3. cpu_count and slot counts must be >= 1"
        )
        self.reason = reason


class AllocationOrderError(GovernorError):
    """Compile memory went down during compilation."""

    def __init__(self, task_id: str, current: int, requested: int):
        super().__init__(
            f"Task '{task_id}' reported {requested} bytes after {current} bytes. "
            f"Compile memory is monotone until the task is released."
        )
        self.task_id = task_id


class TaskStateError(GovernorError):
    """Operation is not allowed in the task's current state."""

    def __init__(self, task_id: str, state: str, operation: str):
        super().__init__(f"Cannot {operation} task '{task_id}' in state {state}.")
        self.task_id = task_id
        self.state = state
        self.operation = operation


class TierNotHeldError(GovernorError):
    """Release of a tier the task does not hold."""

    def __init__(self, task_id: str, tier: int):
        super().__init__(f"Task '{task_id}' does not hold gateway tier {tier}.")
        self.task_id = task_id
        self.tier = tier


class CircularWaitError(GovernorError):
    """Cycle detected in the wait-for graph over gateway resources."""

    def __init__(self, tasks: set[str]):
        tasks_str = ", ".join(sorted(tasks))
        super().__init__(
            f"Circular wait detected involving tasks: {tasks_str}\n\n"
            f"Suggestions:\n"
            f"1. Tiers must be acquired in ascending order only\n"
            f"2. Tiers must be released in descending order only"
        )
        self.tasks = tasks


class GatewayInvariantError(GovernorError):
    """A structural gateway invariant does not hold."""

    def __init__(self, reason: str):
        super().__init__(f"Gateway invariant violated: {reason}")
        self.reason = reason
