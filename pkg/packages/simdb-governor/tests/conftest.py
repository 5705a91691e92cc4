"""Pytest configuration and shared fixtures."""

import pytest
from simdb_governor import MB, BrokerConfig, GatewayPolicy, GatewaySet, MemoryBroker


@pytest.fixture
def broker() -> MemoryBroker:
    """Broker over 1000 bytes with no slack, so budgets equal physical memory."""
    return MemoryBroker(BrokerConfig(physical_bytes=1000, slack_fraction=0.0))


@pytest.fixture
def static_policy() -> GatewayPolicy:
    """Single-CPU policy (slots 4/1/1) with fixed thresholds 5/20/40 MB."""
    return GatewayPolicy(
        cpu_count=1,
        t1_bytes=5 * MB,
        timeouts=(30.0, 60.0, 90.0),
        dynamic_thresholds=False,
        static_t2_bytes=20 * MB,
        static_t3_bytes=40 * MB,
    )


@pytest.fixture
def gateways(static_policy: GatewayPolicy) -> GatewaySet:
    """Audited gateway set over the static single-CPU policy."""
    return GatewaySet(static_policy, 1024 * MB, audit=True)
