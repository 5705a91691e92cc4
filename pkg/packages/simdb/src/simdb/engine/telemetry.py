"""Telemetry recording and the simulation report."""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass, field
from typing import Any

from simdb_governor import GatewayCounters

from simdb.models import FailureReason

COMPONENTS = ("buffer_pool", "compilation", "execution", "plan_cache")


@dataclass
class SliceCounts:
    """Outcomes within one metrics slice ``[start, start + width)``."""

    start: float
    completed: int = 0
    completed_degraded: int = 0
    failed_oom: int = 0
    failed_timeout: int = 0


@dataclass(frozen=True)
class GatewaySample:
    time: float
    small: int
    medium: int
    large: int
    queue0: int
    queue1: int
    queue2: int
    t2_bytes: int
    t3_bytes: int


@dataclass(frozen=True)
class TraceRow:
    time: float
    task_id: str
    memory_bytes: int
    state: str
    held_tiers: str


@dataclass
class LatencySummary:
    mean: float | None
    p50: float | None
    p95: float | None

    @classmethod
    def from_samples(cls, samples: list[float]) -> LatencySummary:
        if not samples:
            return cls(None, None, None)
        if len(samples) == 1:
            return cls(samples[0], samples[0], samples[0])
        cuts = statistics.quantiles(samples, n=100, method="inclusive")
        return cls(statistics.fmean(samples), cuts[49], cuts[94])


@dataclass
class SimulationReport:
    """
    Everything a run measured after warm-up.

    Attributes:
        config: Fully resolved scenario configuration
        slices: Per-slice outcome counts
        memory: (time, per-component usage plus free) at each slice boundary
        gateways: Gateway occupancy, queues and thresholds at each slice boundary
        trace: Per-task timeline rows (only when tracing)
        latency: Completion latency statistics
        peak_bytes: Peak usage per component after warm-up
        gateway_counters: Acquisitions, blocks, timeouts and finalizations after warm-up
        must_shrink: MUST_SHRINK notifications per component after warm-up
        plan_cache_hits: Queries that skipped compilation after warm-up
    """

    config: dict[str, Any]
    slices: list[SliceCounts]
    memory: list[tuple[float, dict[str, int]]]
    gateways: list[GatewaySample]
    trace: list[TraceRow]
    latency: LatencySummary
    peak_bytes: dict[str, int]
    gateway_counters: dict[str, int]
    must_shrink: dict[str, int]
    plan_cache_hits: int = 0

    @property
    def throttling(self) -> bool:
        return bool(self.config.get("throttling", True))

    @property
    def completed(self) -> int:
        return sum(s.completed for s in self.slices)

    @property
    def completed_degraded(self) -> int:
        return sum(s.completed_degraded for s in self.slices)

    @property
    def failed_oom(self) -> int:
        return sum(s.failed_oom for s in self.slices)

    @property
    def failed_timeout(self) -> int:
        return sum(s.failed_timeout for s in self.slices)

    @property
    def failed(self) -> int:
        return self.failed_oom + self.failed_timeout

    @property
    def slice_mean(self) -> float:
        """Mean completions per slice."""
        return self.completed / len(self.slices) if self.slices else 0.0


@dataclass
class Telemetry:
    """Collects counts and samples while the engine runs."""

    warmup: float
    duration: float
    slice_seconds: float
    trace_enabled: bool = False
    slices: list[SliceCounts] = field(default_factory=list)
    memory: list[tuple[float, dict[str, int]]] = field(default_factory=list)
    gateway_samples: list[GatewaySample] = field(default_factory=list)
    trace: list[TraceRow] = field(default_factory=list)
    latencies: list[float] = field(default_factory=list)
    peaks: dict[str, int] = field(default_factory=lambda: dict.fromkeys(COMPONENTS, 0))
    must_shrink: dict[str, int] = field(default_factory=lambda: dict.fromkeys(COMPONENTS, 0))
    plan_cache_hits: int = 0
    counters_at_warmup: GatewayCounters | None = None

    def __post_init__(self) -> None:
        count = math.ceil((self.duration - self.warmup) / self.slice_seconds)
        self.slices = [SliceCounts(self.slice_start(i)) for i in range(count)]

    def slice_start(self, index: int) -> float:
        return self.warmup + index * self.slice_seconds

    def _slice_at(self, time: float) -> SliceCounts | None:
        if time < self.warmup:
            return None
        index = int((time - self.warmup) // self.slice_seconds)
        return self.slices[index] if index < len(self.slices) else None

    def record_completion(self, time: float, latency: float, degraded: bool) -> None:
        counts = self._slice_at(time)
        if counts is None:
            return
        counts.completed += 1
        if degraded:
            counts.completed_degraded += 1
        self.latencies.append(latency)

    def record_failure(self, time: float, reason: FailureReason) -> None:
        counts = self._slice_at(time)
        if counts is None:
            return
        if reason is FailureReason.OOM:
            counts.failed_oom += 1
        else:
            counts.failed_timeout += 1

    def record_plan_cache_hit(self, time: float) -> None:
        if time >= self.warmup:
            self.plan_cache_hits += 1

    def record_must_shrink(self, time: float, component: str) -> None:
        if time >= self.warmup:
            self.must_shrink[component] += 1

    def update_peaks(self, usage: dict[str, int]) -> None:
        for component in COMPONENTS:
            if usage[component] > self.peaks[component]:
                self.peaks[component] = usage[component]

    def record_trace(self, row: TraceRow) -> None:
        if self.trace_enabled:
            self.trace.append(row)

    def build_report(self, config: dict[str, Any], counters: GatewayCounters) -> SimulationReport:
        baseline = self.counters_at_warmup or GatewayCounters()
        deltas = {
            name: value - getattr(baseline, name) for name, value in asdict(counters).items()
        }
        return SimulationReport(
            config=config,
            slices=self.slices,
            memory=self.memory,
            gateways=self.gateway_samples,
            trace=self.trace,
            latency=LatencySummary.from_samples(self.latencies),
            peak_bytes=dict(self.peaks),
            gateway_counters=deltas,
            must_shrink=dict(self.must_shrink),
            plan_cache_hits=self.plan_cache_hits,
        )
