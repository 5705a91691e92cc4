"""
simdb-governor - Memory Broker and Compilation Gateways

Accounts for per-subcomponent memory, predicts demand from trends, hands out
targets under pressure, and throttles concurrent query compilations through
three memory-triggered gateways.
"""

from simdb_governor.broker import MemoryBroker, apportion_targets, budget_bytes, compute_targets
from simdb_governor.exceptions import GovernorError
from simdb_governor.gateways import GatewaySet
from simdb_governor.models import (
    GB,
    KB,
    MB,
    PROCEED,
    AuditRecord,
    BrokerConfig,
    CompilationTask,
    ComponentAccount,
    GateDecision,
    GatewayCounters,
    GatewayPolicy,
    GatewayTier,
    Notification,
    TaskState,
    TimeoutSweep,
)
from simdb_governor.waitfor import WaitForGraph

__version__ = "0.1.0"

__all__ = [
    "GB",
    "KB",
    "MB",
    "PROCEED",
    "AuditRecord",
    "BrokerConfig",
    "CompilationTask",
    "ComponentAccount",
    "GateDecision",
    "GatewayCounters",
    "GatewayPolicy",
    "GatewaySet",
    "GatewayTier",
    "GovernorError",
    "MemoryBroker",
    "Notification",
    "TaskState",
    "TimeoutSweep",
    "WaitForGraph",
    "apportion_targets",
    "budget_bytes",
    "compute_targets",
]
