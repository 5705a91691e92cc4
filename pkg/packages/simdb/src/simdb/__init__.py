"""
simdb - DBMS Memory Simulator

Deterministic discrete-event simulation of a database server's memory:
buffer pool, query compilations, execution grants and plan cache share
physical memory under a memory broker, with compilations throttled by three
memory-triggered gateways. Used to compare throughput and failure behavior
with throttling on and off.
"""

from simdb.config import ScenarioConfig, apply_overrides, load_scenario
from simdb.engine import AllocationResult, SimulationReport, Simulator, run
from simdb.exceptions import SimdbError
from simdb.workload import (
    ClientModel,
    GrowthShape,
    QueryClass,
    Workload,
    get_preset,
    get_scenario,
    list_presets,
    list_scenarios,
    register_preset,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult",
    "ClientModel",
    "GrowthShape",
    "QueryClass",
    "ScenarioConfig",
    "SimdbError",
    "SimulationReport",
    "Simulator",
    "Workload",
    "apply_overrides",
    "get_preset",
    "get_scenario",
    "list_presets",
    "list_scenarios",
    "load_scenario",
    "register_preset",
    "run",
]
