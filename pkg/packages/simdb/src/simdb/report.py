"""Report documents and table rows written by the CLI.

Column names and JSON field names are stable; ``format_version`` changes if
they ever do.
"""

from __future__ import annotations

from dataclasses import asdict
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from simdb.engine.telemetry import SimulationReport

FORMAT_VERSION = 1

THROUGHPUT_COLUMNS = (
    "slice_start_s",
    "completed",
    "completed_degraded",
    "failed_oom",
    "failed_timeout",
)
MEMORY_COLUMNS = ("time_s", "buffer_pool", "compilation", "execution", "plan_cache", "free")
GATEWAY_COLUMNS = ("time_s", "S", "M", "L", "queue0", "queue1", "queue2", "t2_bytes", "t3_bytes")
TRACE_COLUMNS = ("time_s", "task_id", "memory_bytes", "state", "held_tiers")

Row = dict[str, Any]


def seconds(value: float) -> str:
    """Simulated time as text, always three decimals."""
    return f"{value:.3f}"


def throughput_rows(report: SimulationReport) -> list[Row]:
    return [
        {
            "slice_start_s": seconds(s.start),
            "completed": s.completed,
            "completed_degraded": s.completed_degraded,
            "failed_oom": s.failed_oom,
            "failed_timeout": s.failed_timeout,
        }
        for s in report.slices
    ]


def memory_rows(report: SimulationReport) -> list[Row]:
    return [{"time_s": seconds(time), **usage} for time, usage in report.memory]


def gateway_rows(report: SimulationReport) -> list[Row]:
    return [
        {
            "time_s": seconds(g.time),
            "S": g.small,
            "M": g.medium,
            "L": g.large,
            "queue0": g.queue0,
            "queue1": g.queue1,
            "queue2": g.queue2,
            "t2_bytes": g.t2_bytes,
            "t3_bytes": g.t3_bytes,
        }
        for g in report.gateways
    ]


def trace_rows(report: SimulationReport) -> list[Row]:
    return [
        {
            "time_s": seconds(row.time),
            "task_id": row.task_id,
            "memory_bytes": row.memory_bytes,
            "state": row.state,
            "held_tiers": row.held_tiers,
        }
        for row in report.trace
    ]


def summary_document(report: SimulationReport) -> dict[str, Any]:
    """Build ``summary.json``: totals, latency, peaks and counters plus the resolved config."""
    engine = report.config["engine"]
    return {
        "format_version": FORMAT_VERSION,
        "config": report.config,
        "seed": report.config["workload"]["seed"],
        "window": {
            "warmup_seconds": engine["warmup_seconds"],
            "duration_seconds": engine["duration_seconds"],
            "slice_seconds": engine["slice_seconds"],
            "slices": len(report.slices),
        },
        "totals": {
            "completed": report.completed,
            "completed_degraded": report.completed_degraded,
            "failed_oom": report.failed_oom,
            "failed_timeout": report.failed_timeout,
            "failed": report.failed,
            "plan_cache_hits": report.plan_cache_hits,
        },
        "slice_mean_completed": report.slice_mean,
        "latency_seconds": asdict(report.latency),
        "peak_bytes": report.peak_bytes,
        "gateways": report.gateway_counters,
        "broker": {"must_shrink": report.must_shrink},
    }


def throughput_ratio(throttled: SimulationReport, unthrottled: SimulationReport) -> float | None:
    """Throttled over unthrottled completions; 1.0 when both are 0, None when only the base is."""
    if unthrottled.completed == 0:
        return 1.0 if throttled.completed == 0 else None
    return throttled.completed / unthrottled.completed


def _paired(throttled: int, unthrottled: int) -> dict[str, int]:
    return {"throttled": throttled, "unthrottled": unthrottled, "delta": throttled - unthrottled}


def compare_document(throttled: SimulationReport, unthrottled: SimulationReport) -> dict[str, Any]:
    """Build ``compare.json`` for an A/B pair run with the same seed."""
    return {
        "format_version": FORMAT_VERSION,
        "seed": throttled.config["workload"]["seed"],
        "throughput_ratio": throughput_ratio(throttled, unthrottled),
        "completed": _paired(throttled.completed, unthrottled.completed),
        "completed_degraded": _paired(
            throttled.completed_degraded, unthrottled.completed_degraded
        ),
        "failures": {
            "oom": _paired(throttled.failed_oom, unthrottled.failed_oom),
            "timeout": _paired(throttled.failed_timeout, unthrottled.failed_timeout),
            "total": _paired(throttled.failed, unthrottled.failed),
        },
        "slices": [
            {
                "slice_start_s": a.start,
                "throttled": a.completed,
                "unthrottled": b.completed,
            }
            for a, b in zip(throttled.slices, unthrottled.slices, strict=True)
        ],
    }


def sweep_document(
    results: list[tuple[int, SimulationReport, SimulationReport]],
) -> dict[str, Any]:
    """Build ``sweep.json`` from (clients, throttled, unthrottled) triples."""
    entries = []
    for clients, throttled, unthrottled in results:
        entries.append(
            {
                "clients": clients,
                "throughput_ratio": throughput_ratio(throttled, unthrottled),
                "throttled": _mode_summary(throttled),
                "unthrottled": _mode_summary(unthrottled),
            }
        )
    seed = results[0][1].config["workload"]["seed"] if results else None
    return {"format_version": FORMAT_VERSION, "seed": seed, "runs": entries}


def _mode_summary(report: SimulationReport) -> dict[str, Any]:
    return {
        "completed": report.completed,
        "failed_oom": report.failed_oom,
        "failed_timeout": report.failed_timeout,
        "slice_mean_completed": report.slice_mean,
    }
