"""Tests for MemoryBroker accounting, prediction, targets and notifications."""

import pytest
from simdb_governor import (
    BrokerConfig,
    MemoryBroker,
    Notification,
    apportion_targets,
    budget_bytes,
    compute_targets,
)
from simdb_governor.exceptions import (
    DuplicateComponentError,
    FloorOverflowError,
    InvalidBrokerConfigError,
    InvalidUsageError,
    TimeRegressionError,
    UnknownComponentError,
)

pytestmark = pytest.mark.unit


class TestBrokerConfig:
    """Tests for BrokerConfig validation."""

    def test_defaults(self):
        config = BrokerConfig(physical_bytes=1000)
        assert config.window == 16
        assert config.slack_fraction == 0.05
        assert config.low_water == 0.9

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"physical_bytes": 0},
            {"physical_bytes": 1000, "slack_fraction": 1.0},
            {"physical_bytes": 1000, "low_water": 1.0},
            {"physical_bytes": 1000, "low_water": 0.0},
            {"physical_bytes": 1000, "window": 1},
        ],
    )
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(InvalidBrokerConfigError):
            BrokerConfig(**kwargs)

    def test_budget_excludes_slack(self):
        assert budget_bytes(BrokerConfig(physical_bytes=1000, slack_fraction=0.05)) == 950
        assert budget_bytes(BrokerConfig(physical_bytes=1000, slack_fraction=0.0)) == 1000


class TestRegisterComponent:
    """Tests for MemoryBroker.register_component()."""

    def test_initial_state(self, broker):
        account = broker.register_component("buffer_pool", shrinkable=True, floor_bytes=64)

        assert account.notification is Notification.CAN_GROW
        assert len(account.samples) == 0
        assert account.target_bytes == 1000

    def test_initial_target_excludes_other_floors(self, broker):
        broker.register_component("buffer_pool", shrinkable=True, floor_bytes=100)
        account = broker.register_component("compilation", shrinkable=False, floor_bytes=50)

        assert account.target_bytes == 900

    def test_duplicate_id(self, broker):
        broker.register_component("buffer_pool", shrinkable=True, floor_bytes=0)

        with pytest.raises(DuplicateComponentError) as exc_info:
            broker.register_component("buffer_pool", shrinkable=True, floor_bytes=0)
        assert "buffer_pool" in str(exc_info.value)

    def test_floor_overflow(self, broker):
        broker.register_component("a", shrinkable=True, floor_bytes=600)

        with pytest.raises(FloorOverflowError):
            broker.register_component("b", shrinkable=True, floor_bytes=500)

    def test_floors_equal_to_physical_overflow(self, broker):
        with pytest.raises(FloorOverflowError):
            broker.register_component("a", shrinkable=True, floor_bytes=1000)

    def test_negative_floor(self, broker):
        with pytest.raises(InvalidUsageError):
            broker.register_component("a", shrinkable=True, floor_bytes=-1)


class TestRecordUsage:
    """Tests for MemoryBroker.record_usage()."""

    def test_samples_appended(self, broker):
        account = broker.register_component("bp", shrinkable=True, floor_bytes=0)
        broker.record_usage("bp", 100, 0)
        broker.record_usage("bp", 110, 1)

        assert list(account.samples) == [(0, 100), (1, 110)]
        assert account.usage_bytes == 110

    def test_time_regression(self, broker):
        broker.register_component("bp", shrinkable=True, floor_bytes=0)
        broker.record_usage("bp", 100, 1)

        with pytest.raises(TimeRegressionError):
            broker.record_usage("bp", 100, 0)

    def test_equal_time_overwrites(self, broker):
        account = broker.register_component("bp", shrinkable=True, floor_bytes=0)
        broker.record_usage("bp", 100, 1)
        broker.record_usage("bp", 150, 1)

        assert list(account.samples) == [(1, 150)]

    def test_window_evicts_oldest(self):
        broker = MemoryBroker(BrokerConfig(physical_bytes=1000, window=4))
        account = broker.register_component("bp", shrinkable=True, floor_bytes=0)
        for t in range(5):
            broker.record_usage("bp", t * 10, t)

        assert len(account.samples) == 4
        assert account.samples[0] == (1, 10)

    def test_unknown_component(self, broker):
        with pytest.raises(UnknownComponentError):
            broker.record_usage("missing", 1, 0)

    def test_negative_usage(self, broker):
        broker.register_component("bp", shrinkable=True, floor_bytes=0)

        with pytest.raises(InvalidUsageError):
            broker.record_usage("bp", -5, 0)


class TestPredictUsage:
    """Tests for MemoryBroker.predict_usage()."""

    def _with_samples(self, broker, samples):
        broker.register_component("bp", shrinkable=True, floor_bytes=0)
        for t, usage in samples:
            broker.record_usage("bp", usage, t)

    def test_exact_linear_trend(self, broker):
        self._with_samples(broker, [(0, 100), (1, 110), (2, 120)])
        assert broker.predict_usage("bp", 1) == 130

    def test_flat_trend(self, broker):
        self._with_samples(broker, [(0, 50), (1, 50), (2, 50)])
        assert broker.predict_usage("bp", 10) == 50

    def test_negative_extrapolation_clamps_to_zero(self, broker):
        self._with_samples(broker, [(0, 10), (1, 5)])
        assert broker.predict_usage("bp", 5) == 0

    def test_clamps_to_physical(self, broker):
        self._with_samples(broker, [(0, 500), (1, 900)])
        assert broker.predict_usage("bp", 10) == 1000

    def test_single_sample_returns_usage(self, broker):
        self._with_samples(broker, [(0, 42)])
        assert broker.predict_usage("bp", 10) == 42

    def test_no_samples_returns_zero(self, broker):
        self._with_samples(broker, [])
        assert broker.predict_usage("bp", 10) == 0

    def test_default_horizon(self, broker):
        self._with_samples(broker, [(0, 100), (1, 110)])
        assert broker.predict_usage("bp") == 120

    def test_unknown_component(self, broker):
        with pytest.raises(UnknownComponentError):
            broker.predict_usage("missing", 1)


class TestApportionTargets:
    """Tests for apportion_targets() and compute_targets()."""

    def test_unconstrained_splits_surplus(self):
        assert apportion_targets([40, 30], [0, 0], 100) == [55, 45]

    def test_unconstrained_remainder_goes_to_first(self):
        assert apportion_targets([40, 30], [0, 0], 101) == [56, 45]

    def test_constrained_proportional(self):
        assert apportion_targets([80, 120], [0, 0], 100) == [40, 60]

    def test_constrained_floors_first(self):
        targets = apportion_targets([120, 70], [20, 10], 100)

        # 20 + 70*100/160 = 63.75, 10 + 70*60/160 = 36.25
        assert targets == [64, 36]
        assert sum(targets) == 100
        assert targets[0] >= 20 and targets[1] >= 10

    def test_budget_below_floors(self):
        assert apportion_targets([300, 300], [200, 100], 250) == [200, 100]

    def test_empty(self):
        assert apportion_targets([], [], 100) == []

    def test_compute_targets_uses_usage_and_floor(self, broker):
        bp = broker.register_component("bp", shrinkable=True, floor_bytes=0)
        comp = broker.register_component("comp", shrinkable=False, floor_bytes=200)
        broker.record_usage("bp", 300, 0)
        bp.predicted_bytes = 100
        comp.predicted_bytes = 50

        targets = compute_targets(broker.accounts, broker.config)

        # demands: bp = max(100, 300, 0) = 300, comp = max(50, 0, 200) = 200
        assert targets == {"bp": 550, "comp": 450}


class TestNotifications:
    """Tests for MemoryBroker.notification_for()."""

    @pytest.mark.parametrize(
        ("usage", "expected"),
        [
            (50, Notification.CAN_GROW),
            (89, Notification.CAN_GROW),
            (90, Notification.STABLE),
            (95, Notification.STABLE),
            (100, Notification.STABLE),
            (120, Notification.MUST_SHRINK),
        ],
    )
    def test_thresholds(self, broker, usage, expected):
        account = broker.register_component("bp", shrinkable=True, floor_bytes=0)
        account.target_bytes = 100
        broker.record_usage("bp", usage, 0)

        assert broker.notification_for("bp") is expected

    def test_unknown_component(self, broker):
        with pytest.raises(UnknownComponentError):
            broker.notification_for("missing")


class TestBrokerTick:
    """Tests for MemoryBroker.broker_tick()."""

    def _two_components(self, broker):
        broker.register_component("buffer_pool", shrinkable=True, floor_bytes=0)
        broker.register_component("compilation", shrinkable=False, floor_bytes=0)

    def test_flat_usage_under_budget_no_changes(self, broker):
        self._two_components(broker)
        for t in range(3):
            broker.record_usage("buffer_pool", 100, t)
            broker.record_usage("compilation", 100, t)

        assert broker.broker_tick(2) == []
        assert broker.target_for("buffer_pool") == 500
        assert broker.target_for("compilation") == 500

    def test_second_tick_is_idempotent(self, broker):
        self._two_components(broker)
        broker.record_usage("buffer_pool", 700, 0)
        broker.record_usage("compilation", 300, 0)

        broker.broker_tick(0)
        assert broker.broker_tick(1) == []

    def test_buffer_pool_trend_squeezes_compilation(self, broker):
        self._two_components(broker)
        for t, usage in enumerate([300, 500, 700]):
            broker.record_usage("buffer_pool", usage, t)
            broker.record_usage("compilation", 300, t)

        changes = broker.broker_tick(2)

        # predicted bp 900, comp 300 -> targets 750 / 250 out of 1000
        assert broker.target_for("buffer_pool") == 750
        assert broker.target_for("compilation") == 250
        assert changes == [
            ("buffer_pool", Notification.STABLE),
            ("compilation", Notification.MUST_SHRINK),
        ]

    def test_under_capacity_never_shrinks(self, broker):
        self._two_components(broker)
        for t, usage in enumerate([400, 300, 200]):
            broker.record_usage("buffer_pool", usage, t)
            broker.record_usage("compilation", 100, t)

        broker.broker_tick(2)

        for account in broker.accounts:
            assert account.target_bytes >= account.predicted_bytes
            assert account.notification is not Notification.MUST_SHRINK

    def test_target_listener_receives_target(self, broker):
        self._two_components(broker)
        received = []
        broker.add_target_listener("compilation", received.append)
        broker.record_usage("buffer_pool", 100, 0)
        broker.record_usage("compilation", 300, 0)

        broker.broker_tick(0)

        assert received == [broker.target_for("compilation")]

    def test_tick_time_regression(self, broker):
        self._two_components(broker)
        broker.broker_tick(5)

        with pytest.raises(TimeRegressionError):
            broker.broker_tick(4)

    def test_empty_broker(self, broker):
        assert broker.broker_tick(0) == []

    def test_identical_history_identical_targets(self):
        def run() -> list[tuple[str, int, Notification]]:
            broker = MemoryBroker(BrokerConfig(physical_bytes=10_000))
            for name in ("a", "b", "c"):
                broker.register_component(name, shrinkable=True, floor_bytes=100)
            for t in range(10):
                broker.record_usage("a", 1000 + 300 * t, t)
                broker.record_usage("b", 2000, t)
                broker.record_usage("c", 4000 - 100 * t, t)
                broker.broker_tick(t)
            return [(a.id, a.target_bytes, a.notification) for a in broker.accounts]

        assert run() == run()
