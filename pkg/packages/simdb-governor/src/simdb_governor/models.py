"""Data models and type definitions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from simdb_governor.exceptions import InvalidBrokerConfigError, InvalidPolicyError

KB = 1024
MB = 1024 * KB
GB = 1024 * MB

TIER_COUNT = 3


class Notification(str, Enum):
    """Broker advice published to a component after each tick."""

    CAN_GROW = "CAN_GROW"
    STABLE = "STABLE"
    MUST_SHRINK = "MUST_SHRINK"


class TaskState(str, Enum):
    """Lifecycle state of a compilation task as seen by the gateways."""

    RUNNING = "RUNNING"
    BLOCKED = "BLOCKED"
    ABORTED_TIMEOUT = "ABORTED_TIMEOUT"
    ABORTED_OOM = "ABORTED_OOM"
    FINALIZE_BEST_PLAN = "FINALIZE_BEST_PLAN"
    DONE = "DONE"

    @property
    def is_terminal(self) -> bool:
        return self in _TERMINAL_STATES

    @property
    def is_releasable(self) -> bool:
        """States from which the task's tiers may be released."""
        return self in _TERMINAL_STATES or self is TaskState.FINALIZE_BEST_PLAN


_TERMINAL_STATES = frozenset({TaskState.ABORTED_TIMEOUT, TaskState.ABORTED_OOM, TaskState.DONE})


@dataclass(frozen=True)
class BrokerConfig:
    """
    Broker-wide settings.

    Attributes:
        physical_bytes: Total governable memory
        slack_fraction: Share of physical memory deliberately left unassigned
        window: Number of samples kept per component for the trend fit
        horizon: Seconds ahead of the newest sample to predict
        low_water: Usage/target ratio below which a component may grow
    """

    physical_bytes: int
    slack_fraction: float = 0.05
    window: int = 16
    horizon: float = 1.0
    low_water: float = 0.9

    def __post_init__(self) -> None:
        if self.physical_bytes <= 0:
            raise InvalidBrokerConfigError("physical_bytes must be > 0")
        if not 0 <= self.slack_fraction < 1:
            raise InvalidBrokerConfigError("slack_fraction must be in [0, 1)")
        if self.window < 2:  # noqa: PLR2004
            raise InvalidBrokerConfigError("window must hold at least 2 samples")
        if self.horizon < 0:
            raise InvalidBrokerConfigError("horizon must be >= 0")
        if not 0 < self.low_water < 1:
            raise InvalidBrokerConfigError("low_water must be in (0, 1)")


@dataclass
class ComponentAccount:
    """
    One registered memory consumer.

    Attributes:
        id: Component identifier
        shrinkable: Whether the component can give memory back (caches)
        floor_bytes: Minimum the component keeps even under pressure
        samples: Ring buffer of (time, usage) pairs, strictly increasing in time
        predicted_bytes: Last trend prediction
        target_bytes: Last computed target
        notification: Last published notification
    """

    id: str
    shrinkable: bool
    floor_bytes: int
    samples: deque[tuple[float, int]]
    predicted_bytes: int = 0
    target_bytes: int = 0
    notification: Notification = Notification.CAN_GROW

    @property
    def usage_bytes(self) -> int:
        """Most recent reported usage (0 before the first report)."""
        return self.samples[-1][1] if self.samples else 0


@dataclass(frozen=True)
class GatewayPolicy:
    """
    Static gateway configuration.

    Slot counts follow the per-CPU rule: small tier 4 per CPU, medium tier
    1 per CPU, large tier 1 in total.
    """

    cpu_count: int
    t1_bytes: int = 5 * MB
    small_fraction: float = 0.5
    medium_fraction: float = 0.35
    timeouts: tuple[float, float, float] = (60.0, 180.0, 600.0)
    best_plan_min_progress: float = 0.25
    small_slots_per_cpu: int = 4
    medium_slots_per_cpu: int = 1
    large_slots_total: int = 1
    dynamic_thresholds: bool = True
    static_t2_bytes: int | None = None
    static_t3_bytes: int | None = None

    def __post_init__(self) -> None:
        if self.cpu_count < 1:
            raise InvalidPolicyError(f"cpu_count must be >= 1, got {self.cpu_count}")
        if min(self.small_slots_per_cpu, self.medium_slots_per_cpu, self.large_slots_total) < 1:
            raise InvalidPolicyError("slot counts must be >= 1")
        if self.t1_bytes < 0:
            raise InvalidPolicyError("t1_bytes must be >= 0")
        if len(self.timeouts) != TIER_COUNT:
            raise InvalidPolicyError(f"expected {TIER_COUNT} timeouts, got {len(self.timeouts)}")
        if self.timeouts[0] <= 0 or not self.timeouts[0] < self.timeouts[1] < self.timeouts[2]:
            raise InvalidPolicyError(f"timeouts must be positive and increasing: {self.timeouts}")
        if not (0 < self.small_fraction < 1 and 0 < self.medium_fraction < 1):
            raise InvalidPolicyError("fractions must be in (0, 1)")
        if self.small_fraction + self.medium_fraction >= 1:
            raise InvalidPolicyError("small_fraction + medium_fraction must be < 1")
        if not 0 <= self.best_plan_min_progress <= 1:
            raise InvalidPolicyError("best_plan_min_progress must be in [0, 1]")
        if not self.dynamic_thresholds:
            if self.static_t2_bytes is None or self.static_t3_bytes is None:
                raise InvalidPolicyError("static thresholds required when dynamic_thresholds=False")
            if not self.t1_bytes < self.static_t2_bytes < self.static_t3_bytes:
                raise InvalidPolicyError("static thresholds must satisfy t1 < t2 < t3")

    @property
    def slot_counts(self) -> tuple[int, int, int]:
        return (
            self.small_slots_per_cpu * self.cpu_count,
            self.medium_slots_per_cpu * self.cpu_count,
            self.large_slots_total,
        )


class WaitEntry(NamedTuple):
    """Wait-queue entry; tuple order gives FIFO with task-id tie-break."""

    enqueue_time: float
    task_id: str
    deadline: float


@dataclass
class GatewayTier:
    """
    One monitor.

    Attributes:
        index: 0 (small), 1 (medium) or 2 (large)
        threshold_bytes: Task memory at which this tier must be held
        slots: Maximum concurrent holders
        timeout: Seconds a waiter may queue
        wait_queue: Entries sorted by (enqueue_time, task_id)
        holders: Holding task ids in grant order
    """

    index: int
    threshold_bytes: int
    slots: int
    timeout: float
    wait_queue: list[WaitEntry] = field(default_factory=list)
    holders: dict[str, None] = field(default_factory=dict)

    @property
    def has_free_slot(self) -> bool:
        return len(self.holders) < self.slots


@dataclass
class CompilationTask:
    """
    A compiling query as tracked by the gateways.

    held_tiers is always a prefix [0..k] (or empty): tiers are acquired in
    ascending order and released in descending order.
    """

    task_id: str
    memory_bytes: int = 0
    held_tiers: list[int] = field(default_factory=list)
    state: TaskState = TaskState.RUNNING
    progress: float = 0.0
    blocked_tier: int | None = None
    deadline: float | None = None

    @property
    def highest_tier(self) -> int | None:
        return self.held_tiers[-1] if self.held_tiers else None

    def held_label(self) -> str:
        """Held tiers as ``-``, ``0``, ``01`` or ``012``."""
        return "".join(str(t) for t in self.held_tiers) or "-"


@dataclass(frozen=True)
class GateDecision:
    """Outcome of an allocation report: proceed, or blocked at a tier until a deadline."""

    tier: int | None = None
    deadline: float | None = None

    @property
    def blocked(self) -> bool:
        return self.tier is not None


PROCEED = GateDecision()


@dataclass(frozen=True)
class AuditRecord:
    """One gateway event, recorded when auditing is enabled."""

    time: float
    task_id: str
    action: str
    tier: int
    memory_bytes: int
    threshold_bytes: int


class TimeoutSweep(NamedTuple):
    """Result of a timeout scan: expired waiters and the waiters their release granted."""

    timed_out: list[CompilationTask]
    unblocked: list[CompilationTask]


@dataclass
class GatewayCounters:
    """Running totals kept by a gateway set."""

    acquisitions: int = 0
    blocks: int = 0
    timeouts: int = 0
    best_plan_finalizations: int = 0
