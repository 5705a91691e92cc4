"""Scripted trace scenarios.

A scripted scenario replaces the closed-loop clients with a fixed list of
queries arriving at fixed times, so its per-task timeline can be checked
event by event.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from simdb_governor import MB

from simdb.exceptions import UnknownScenarioError
from simdb.models import QueryInstance
from simdb.workload.classes import GrowthShape


@dataclass(frozen=True)
class ScriptedQuery:
    """A query with fixed parameters and a fixed arrival time."""

    name: str
    arrival: float
    peak_compile_bytes: int
    compile_seconds: float
    exec_seconds: float = 1.0
    exec_grant_bytes: int = 0
    working_set_bytes: int = 0
    growth_shape: GrowthShape = GrowthShape.LINEAR

    def instantiate(self) -> QueryInstance:
        return QueryInstance(
            query_id=self.name,
            client=-1,
            query_class="scripted",
            growth_shape=self.growth_shape,
            compile_seconds=self.compile_seconds,
            peak_compile_bytes=self.peak_compile_bytes,
            exec_seconds=self.exec_seconds,
            exec_grant_bytes=self.exec_grant_bytes,
            working_set_bytes=self.working_set_bytes,
            submit_time=self.arrival,
        )


@dataclass(frozen=True)
class ScriptedScenario:
    """
    Named scripted scenario.

    Attributes:
        name: Scenario name (``simdb trace NAME``)
        description: One-line summary for listings
        config: Raw scenario document, validated like a scenario file
        queries: Scripted arrivals
    """

    name: str
    description: str
    config: dict[str, Any]
    queries: tuple[ScriptedQuery, ...] = field(default_factory=tuple)


def fig2() -> ScriptedScenario:
    """
    Four background compilations plus three foreground queries on one CPU.

    Static thresholds of 5/20/40 MB and slots 4/1/1. B1-B4 fill the small
    gateway, so Q1 plateaus at 8 MB until B2 finishes, then again at 20 MB
    until B1 releases the medium gateway. Q2 queues at the small gateway
    behind Q1 and waits longest. Q3 queues behind Q2 and is let in exactly
    when Q2 finishes compiling.
    """
    return ScriptedScenario(
        name="fig2",
        description="Three queries against a saturated small gateway (static 5/20/40 MB)",
        config={
            "physical_bytes": "1GB",
            "cpu_count": 1,
            "throttling": True,
            "gateways": {
                "t1_bytes": "5MB",
                "dynamic_thresholds": False,
                "static_t2_bytes": "20MB",
                "static_t3_bytes": "40MB",
                "timeouts": [60, 180, 600],
            },
            "engine": {
                "warmup_seconds": 0,
                "duration_seconds": 120,
                "floors": {"buffer_pool": "64MB", "compilation": "256MB"},
            },
            "workload": {"clients": 1, "retry_on_failure": False},
        },
        queries=(
            ScriptedQuery("B1", 0.0, 36 * MB, 24.0),
            ScriptedQuery("B2", 0.0, 15 * MB, 15.0),
            ScriptedQuery("B3", 0.0, 16 * MB, 32.0),
            ScriptedQuery("B4", 0.0, 18 * MB, 36.0),
            ScriptedQuery("Q1", 10.0, 60 * MB, 15.0),
            ScriptedQuery("Q2", 10.0, 18 * MB, 9.0),
            ScriptedQuery("Q3", 20.0, 30 * MB, 10.0),
        ),
    )


ScenarioFactory = Callable[[], ScriptedScenario]

_scenarios: dict[str, ScenarioFactory] = {"fig2": fig2}


def register_scenario(name: str, factory: ScenarioFactory) -> None:
    """Register a scripted scenario under a name usable with `simdb trace`."""
    if not callable(factory):
        raise TypeError(f"Scenario factory for '{name}' must be callable")
    _scenarios[name] = factory


def get_scenario(name: str) -> ScriptedScenario:
    """
    Build a registered scripted scenario.

    Raises:
        UnknownScenarioError: If no scenario has this name
    """
    factory = _scenarios.get(name)
    if factory is None:
        raise UnknownScenarioError(name, list_scenarios())
    return factory()


def list_scenarios() -> list[str]:
    return sorted(_scenarios)
