"""Closed-loop workloads, presets and scripted trace scenarios."""

from simdb.workload.classes import (
    ClientModel,
    ClientStreams,
    GrowthShape,
    QueryClass,
    Workload,
    derive_seed,
    next_query,
    think_time,
)
from simdb.workload.presets import (
    get_preset,
    has_preset,
    list_presets,
    register_preset,
    sales_default,
)
from simdb.workload.scripted import (
    ScriptedQuery,
    ScriptedScenario,
    get_scenario,
    list_scenarios,
    register_scenario,
)

__all__ = [
    "ClientModel",
    "ClientStreams",
    "GrowthShape",
    "QueryClass",
    "ScriptedQuery",
    "ScriptedScenario",
    "Workload",
    "derive_seed",
    "get_preset",
    "get_scenario",
    "has_preset",
    "list_presets",
    "list_scenarios",
    "next_query",
    "register_preset",
    "register_scenario",
    "sales_default",
    "think_time",
]
