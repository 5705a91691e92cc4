"""Randomized short runs under memory pressure with every invariant checked per event.

A violation raises InvariantViolationError from inside the event loop, so a
seed that runs to completion already proves the ledger, slot, prefix,
threshold-order and wait-for checks held throughout. The audit log is then
checked for acquire/release ordering.
"""

from collections import defaultdict

import pytest
from simdb.config import build_config
from simdb.engine import Simulator, with_run_settings
from simdb.engine.subcomponents import COMPILATION

pytestmark = [pytest.mark.integration, pytest.mark.slow]

CHUNKS = 10
SEEDS_PER_CHUNK = 100


@pytest.fixture(scope="module")
def fuzz_config():
    """512 MB single-CPU machine with short gateway timeouts."""
    return build_config(
        {
            "physical_bytes": "512MB",
            "cpu_count": 1,
            "gateways": {"timeouts": [5, 10, 20]},
            "engine": {
                "warmup_seconds": 0,
                "duration_seconds": 200,
                "slice_seconds": 20,
                "floors": {"buffer_pool": "64MB", "compilation": "128MB"},
            },
            "workload": {"preset": "mixed_adhoc", "clients": 6},
        }
    )


def _check_audit(sim: Simulator, seed: int) -> None:
    acquired: dict[str, list[int]] = defaultdict(list)
    released: dict[str, list[int]] = defaultdict(list)

    for record in sim.gateways.audit_log:
        if record.action == "acquire":
            assert not released[record.task_id], f"seed {seed}: {record.task_id} re-acquired"
            acquired[record.task_id].append(record.tier)
            if record.tier == 0:
                assert record.memory_bytes >= record.threshold_bytes, f"seed {seed}: {record}"
        elif record.action == "release":
            released[record.task_id].append(record.tier)

    for task_id, tiers in acquired.items():
        assert tiers == list(range(len(tiers))), f"seed {seed}: {task_id} acquired {tiers}"
        if released[task_id]:
            assert released[task_id] == tiers[::-1], (
                f"seed {seed}: {task_id} released {released[task_id]} after acquiring {tiers}"
            )
    for task_id in released:
        assert task_id in acquired, f"seed {seed}: {task_id} released without acquiring"


class TestRandomizedInvariants:
    """Throttled runs over a thousand seeds."""

    @pytest.mark.parametrize("chunk", range(CHUNKS))
    def test_seed_chunk(self, fuzz_config, chunk):
        for seed in range(chunk * SEEDS_PER_CHUNK, (chunk + 1) * SEEDS_PER_CHUNK):
            sim = Simulator(
                with_run_settings(fuzz_config, seed=seed),
                check_invariants=True,
                audit=True,
            )
            report = sim.run()

            assert report.throttling is True
            assert sim.ledger.check_conservation() is None, f"seed {seed}"
            _check_audit(sim, seed)

    def test_pressure_reaches_the_gateways(self, fuzz_config):
        blocks = 0
        for seed in range(20):
            sim = Simulator(with_run_settings(fuzz_config, seed=seed), audit=True)
            blocks += sim.run().gateway_counters["blocks"]

        assert blocks > 0

    def test_unthrottled_runs_hold_ledger_invariants(self, fuzz_config):
        for seed in range(50):
            sim = Simulator(with_run_settings(fuzz_config, seed=seed), check_invariants=True)
            sim.set_throttling(False)
            sim.run()

            assert sim.ledger.usage(COMPILATION) >= 0
            assert sim.ledger.check_conservation() is None
