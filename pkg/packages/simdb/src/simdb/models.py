"""Data models for simulated queries."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from simdb_governor import CompilationTask

    from simdb.workload.classes import GrowthShape


class QueryPhase(str, Enum):
    """Where a query instance is in its lifecycle."""

    QUEUED = "QUEUED"
    COMPILING = "COMPILING"
    AWAITING_GRANT = "AWAITING_GRANT"
    EXECUTING = "EXECUTING"
    DONE = "DONE"
    FAILED = "FAILED"


class FailureReason(str, Enum):
    OOM = "OOM"
    TIMEOUT = "TIMEOUT"


@dataclass
class QueryInstance:
    """
    One submission of a query by a client.

    A failed instance is never retried in place: the client resubmits a new
    instance with ``attempt_count + 1`` and freshly sampled parameters.

    Attributes:
        query_id: Unique id, ``c<client>-<n>`` for workload queries
        client: Submitting client index
        query_class: Name of the class it was sampled from
        growth_shape: Compile-memory profile
        compile_seconds: Compile work
        peak_compile_bytes: Memory held at the end of compilation
        exec_seconds: Base execution time with a fully cached working set
        exec_grant_bytes: Execution memory reserved at execution start
        working_set_bytes: Pages the execution wants in the buffer pool
        submit_time: Simulated time of this attempt's submission
        attempt_count: 1 for a fresh query
        phase: Lifecycle phase
        failure: Reason when FAILED
        task: Gateway-side compilation task while compiling
        degraded: Completed with a best-so-far plan
        plan_cache_hit: Skipped compilation
        completion_time: Simulated time the query reached DONE or FAILED
    """

    query_id: str
    client: int
    query_class: str
    growth_shape: GrowthShape
    compile_seconds: float
    peak_compile_bytes: int
    exec_seconds: float
    exec_grant_bytes: int
    working_set_bytes: int
    submit_time: float
    attempt_count: int = 1
    phase: QueryPhase = QueryPhase.QUEUED
    failure: FailureReason | None = None
    task: CompilationTask | None = None
    degraded: bool = False
    plan_cache_hit: bool = False
    completion_time: float | None = None
    compile_steps: int = 0
    steps_done: int = 0
    grant_wait_start: float | None = None
    grant_backoff: float = 0.0

    @property
    def latency(self) -> float | None:
        if self.completion_time is None:
            return None
        return self.completion_time - self.submit_time

    @property
    def compile_memory_bytes(self) -> int:
        """Compile memory currently held (0 outside compilation)."""
        if self.phase is not QueryPhase.COMPILING or self.task is None:
            return 0
        return self.task.memory_bytes

    def trace_state(self) -> str:
        """Gateway state while compiling, lifecycle phase otherwise."""
        if self.phase is QueryPhase.COMPILING and self.task is not None:
            return self.task.state.value
        return self.phase.value
