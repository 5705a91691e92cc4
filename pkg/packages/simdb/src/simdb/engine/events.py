"""Event queue and simulated clock."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple

from simdb.exceptions import SimulationStateError


class EventKind(str, Enum):
    QUERY_ARRIVAL = "QUERY_ARRIVAL"
    COMPILE_STEP = "COMPILE_STEP"
    COMPILE_DONE = "COMPILE_DONE"
    EXEC_GRANT_RETRY = "EXEC_GRANT_RETRY"
    EXEC_DONE = "EXEC_DONE"
    GATEWAY_TIMEOUT_SCAN = "GATEWAY_TIMEOUT_SCAN"
    BROKER_TICK = "BROKER_TICK"
    CLIENT_RESUBMIT = "CLIENT_RESUBMIT"
    METRICS_SAMPLE = "METRICS_SAMPLE"


class Submission(NamedTuple):
    """Payload of a client arrival: which client, and which attempt of its query."""

    client: int
    attempt: int = 1


@dataclass(frozen=True, order=True)
class SimEvent:
    """Scheduled event; ordered by (time, seq)."""

    time: float
    seq: int
    kind: EventKind = field(compare=False)
    payload: Any = field(default=None, compare=False)


class EventQueue:
    """Min-heap of events with a monotone sequence number for ties.

    Events scheduled for the same instant fire in the order they were scheduled.
    """

    def __init__(self):
        self._heap: list[SimEvent] = []
        self._seq = itertools.count()

    def schedule(self, time: float, kind: EventKind, payload: Any = None) -> SimEvent:
        event = SimEvent(time, next(self._seq), kind, payload)
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> SimEvent:
        return heapq.heappop(self._heap)

    def peek_time(self) -> float | None:
        return self._heap[0].time if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


class SimClock:
    """Simulated time; only moves forward."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def advance(self, time: float) -> None:
        if time < self.now:
            raise SimulationStateError(
                "advance clock", f"event at t={time} is before current time t={self.now}"
            )
        self.now = time
