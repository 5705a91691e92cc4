"""Randomized property checks for broker target computation and prediction."""

import random

import pytest
from simdb_governor import BrokerConfig, MemoryBroker, Notification, apportion_targets

pytestmark = pytest.mark.unit

CASES = 10_000


def _random_accounts(rng: random.Random) -> tuple[list[int], list[int], int]:
    count = rng.randint(1, 6)
    floors = [rng.choice([0, rng.randint(0, 500)]) for _ in range(count)]
    demands = [f + rng.randint(0, 4000) for f in floors]
    budget = rng.randint(sum(floors) + 1, sum(floors) + 8000)
    return demands, floors, budget


class TestTargetProperties:
    """Property checks over randomized account sets."""

    def test_under_capacity_no_op(self):
        rng = random.Random(11)
        checked = 0
        for _ in range(CASES):
            demands, floors, budget = _random_accounts(rng)
            if sum(demands) > budget:
                continue
            targets = apportion_targets(demands, floors, budget)
            checked += 1
            for demand, target in zip(demands, targets, strict=True):
                assert target >= demand
        assert checked > 1000

    def test_constrained_conservation_and_floors(self):
        rng = random.Random(12)
        checked = 0
        for _ in range(CASES):
            demands, floors, budget = _random_accounts(rng)
            if sum(demands) <= budget:
                continue
            targets = apportion_targets(demands, floors, budget)
            checked += 1
            assert sum(targets) == budget
            for floor, target in zip(floors, targets, strict=True):
                assert target >= floor
        assert checked > 1000

    def test_demand_monotonicity(self):
        rng = random.Random(13)
        for _ in range(CASES):
            demands, floors, budget = _random_accounts(rng)
            before = apportion_targets(demands, floors, budget)

            raised = list(demands)
            k = rng.randrange(len(raised))
            raised[k] += rng.randint(1, 3000)
            if sum(raised) <= budget:
                continue
            after = apportion_targets(raised, floors, budget)

            for j in range(len(demands)):
                if j != k:
                    # largest-remainder rounding may move a single byte
                    assert after[j] <= before[j] + 1

    def test_deterministic(self):
        rng = random.Random(14)
        for _ in range(1000):
            demands, floors, budget = _random_accounts(rng)
            assert apportion_targets(demands, floors, budget) == apportion_targets(
                list(demands), list(floors), budget
            )


class TestPredictionProperties:
    """Prediction on samples lying exactly on a line."""

    def test_line_is_reproduced(self):
        rng = random.Random(15)
        physical = 1 << 40
        for case in range(2000):
            broker = MemoryBroker(BrokerConfig(physical_bytes=physical, window=8))
            broker.register_component("c", shrinkable=True, floor_bytes=0)
            intercept = rng.randint(0, 1 << 32)
            slope = rng.randint(-(1 << 20), 1 << 20)
            start = rng.randint(0, 100)
            times = [start + i for i in range(rng.randint(2, 12))]
            for t in times:
                broker.record_usage("c", max(intercept + slope * t, 0), t)
            if any(intercept + slope * t < 0 for t in times):
                continue

            horizon = rng.randint(0, 30)
            expected = min(max(intercept + slope * (times[-1] + horizon), 0), physical)
            assert abs(broker.predict_usage("c", horizon) - expected) <= 1, case


class TestTickProperties:
    """End-to-end tick checks on random histories."""

    def test_under_capacity_never_must_shrink(self):
        rng = random.Random(16)
        for _ in range(500):
            broker = MemoryBroker(BrokerConfig(physical_bytes=100_000, slack_fraction=0.05))
            names = [f"c{i}" for i in range(rng.randint(1, 4))]
            for name in names:
                broker.register_component(name, shrinkable=True, floor_bytes=rng.randint(0, 1000))
            for t in range(rng.randint(1, 10)):
                for name in names:
                    broker.record_usage(name, rng.randint(0, 15_000), t)
                broker.broker_tick(t)

            accounts = broker.accounts
            demand = sum(max(a.predicted_bytes, a.usage_bytes, a.floor_bytes) for a in accounts)
            if demand <= 95_000:
                for account in accounts:
                    assert account.target_bytes >= account.predicted_bytes
                    assert account.notification is not Notification.MUST_SHRINK
