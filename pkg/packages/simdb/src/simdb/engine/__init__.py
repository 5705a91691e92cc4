"""Discrete-event memory simulator."""

from simdb.engine.events import EventKind, EventQueue, SimClock, SimEvent, Submission
from simdb.engine.ledger import MemoryLedger
from simdb.engine.simulator import AllocationResult, Simulator, run, with_run_settings
from simdb.engine.subcomponents import BufferPoolModel, PlanCacheModel, execution_duration
from simdb.engine.telemetry import (
    GatewaySample,
    LatencySummary,
    SimulationReport,
    SliceCounts,
    Telemetry,
    TraceRow,
)

__all__ = [
    "AllocationResult",
    "BufferPoolModel",
    "EventKind",
    "EventQueue",
    "GatewaySample",
    "LatencySummary",
    "MemoryLedger",
    "PlanCacheModel",
    "SimClock",
    "SimEvent",
    "SimulationReport",
    "Simulator",
    "SliceCounts",
    "Submission",
    "Telemetry",
    "TraceRow",
    "execution_duration",
    "run",
    "with_run_settings",
]
