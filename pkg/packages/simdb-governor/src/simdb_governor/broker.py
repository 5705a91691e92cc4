"""Memory broker: per-component accounting, trend prediction, targets and notifications."""

from __future__ import annotations

import logging
import statistics
import threading
from collections import deque
from collections.abc import Callable, Sequence
from fractions import Fraction

from simdb_governor.exceptions import (
    DuplicateComponentError,
    FloorOverflowError,
    InvalidUsageError,
    TimeRegressionError,
    UnknownComponentError,
)
from simdb_governor.models import BrokerConfig, ComponentAccount, Notification

logger = logging.getLogger(__name__)

TargetListener = Callable[[int], None]


def budget_bytes(config: BrokerConfig) -> int:
    """Memory the broker hands out: physical minus the slack share, floored."""
    keep = 1 - Fraction(str(config.slack_fraction))
    return int(config.physical_bytes * keep)


def apportion_targets(demands: Sequence[int], floors: Sequence[int], budget: int) -> list[int]:
    """
    Split a byte budget across components.

    Unconstrained (sum of demands fits): every component gets its demand plus an
    equal share of the surplus. Constrained: floors first, then the rest in
    proportion to each component's demand above its floor. Integer rounding uses
    largest remainder with ties going to the earlier component, so the targets
    sum to the budget exactly.

    Args:
        demands: Per-component demand, each already >= its floor
        floors: Per-component floor
        budget: Bytes available

    Returns:
        Per-component targets, in input order
    """
    count = len(demands)
    if count == 0:
        return []

    total_demand = sum(demands)
    if total_demand <= budget:
        share, extra = divmod(budget - total_demand, count)
        return [d + share + (1 if i < extra else 0) for i, d in enumerate(demands)]

    floor_total = sum(floors)
    if budget <= floor_total:
        return list(floors)

    rest = budget - floor_total
    excess = [d - f for d, f in zip(demands, floors, strict=True)]
    excess_total = sum(excess)

    quotas = [divmod(rest * e, excess_total) for e in excess]
    targets = [f + q for f, (q, _) in zip(floors, quotas, strict=True)]
    leftover = rest - sum(q for q, _ in quotas)
    by_remainder = sorted(range(count), key=lambda i: (-quotas[i][1], i))
    for i in by_remainder[:leftover]:
        targets[i] += 1
    return targets


def compute_targets(accounts: Sequence[ComponentAccount], config: BrokerConfig) -> dict[str, int]:
    """
    Compute per-component targets from predictions, usage and floors.

    Demand is max(predicted, current usage, floor).

    Args:
        accounts: Registered accounts in registration order
        config: Broker configuration

    Returns:
        Mapping component id -> target bytes
    """
    demands = [max(a.predicted_bytes, a.usage_bytes, a.floor_bytes) for a in accounts]
    floors = [a.floor_bytes for a in accounts]
    targets = apportion_targets(demands, floors, budget_bytes(config))
    return {a.id: t for a, t in zip(accounts, targets, strict=True)}


def notification_for_usage(usage: int, target: int, low_water: float) -> Notification:
    if usage > target:
        return Notification.MUST_SHRINK
    if usage < Fraction(str(low_water)) * target:
        return Notification.CAN_GROW
    return Notification.STABLE


class MemoryBroker:
    """Central memory accountant.

    Every public method holds the broker lock, so concurrent callers observe
    a consistent account state.
    """

    def __init__(self, config: BrokerConfig):
        """Initialize broker.

        Args:
            config: Broker configuration
        """
        self.config = config
        self._accounts: dict[str, ComponentAccount] = {}
        self._listeners: dict[str, list[TargetListener]] = {}
        self._last_tick: float | None = None
        self._lock = threading.RLock()

    # ------------------------------------------------------------------ accounts

    def register_component(
        self, component: str, shrinkable: bool, floor_bytes: int
    ) -> ComponentAccount:
        """Register a memory consumer.

        The new account starts with no samples, CAN_GROW, and an unconstrained
        target of physical memory minus the other components' floors.

        Args:
            component: Component identifier
            shrinkable: Whether the component can release memory on demand
            floor_bytes: Minimum the component keeps

        Returns:
            The account handle

        Raises:
            DuplicateComponentError: If the id is already registered
            FloorOverflowError: If the floors would reach physical memory
        """
        with self._lock:
            if component in self._accounts:
                raise DuplicateComponentError(component)
            if floor_bytes < 0:
                raise InvalidUsageError(component, floor_bytes)

            other_floors = sum(a.floor_bytes for a in self._accounts.values())
            if other_floors + floor_bytes >= self.config.physical_bytes:
                raise FloorOverflowError(
                    component, other_floors + floor_bytes, self.config.physical_bytes
                )

            account = ComponentAccount(
                id=component,
                shrinkable=shrinkable,
                floor_bytes=floor_bytes,
                samples=deque(maxlen=self.config.window),
                target_bytes=self.config.physical_bytes - other_floors,
            )
            self._accounts[component] = account
            logger.debug(
                "Registered component %s (shrinkable=%s, floor=%d)",
                component,
                shrinkable,
                floor_bytes,
            )
            return account

    def account(self, component: str) -> ComponentAccount:
        with self._lock:
            return self._get(component)

    @property
    def accounts(self) -> list[ComponentAccount]:
        with self._lock:
            return list(self._accounts.values())

    def target_for(self, component: str) -> int:
        with self._lock:
            return self._get(component).target_bytes

    def add_target_listener(self, component: str, listener: TargetListener) -> None:
        """Call ``listener(target_bytes)`` after every tick for ``component``."""
        with self._lock:
            self._get(component)
            self._listeners.setdefault(component, []).append(listener)

    # ------------------------------------------------------------------ samples

    def record_usage(self, component: str, usage_bytes: int, now: float) -> None:
        """Append a usage sample.

        A sample at the same timestamp as the newest one replaces it; the
        oldest sample is evicted once the window is full.

        Raises:
            UnknownComponentError: If the component is not registered
            TimeRegressionError: If ``now`` precedes the newest sample
            InvalidUsageError: If usage is negative
        """
        with self._lock:
            account = self._get(component)
            if usage_bytes < 0:
                raise InvalidUsageError(component, usage_bytes)
            samples = account.samples
            if samples:
                last_time = samples[-1][0]
                if now < last_time:
                    raise TimeRegressionError(component, now, last_time)
                if now == last_time:
                    samples[-1] = (now, usage_bytes)
                    return
            samples.append((now, usage_bytes))

    def predict_usage(self, component: str, horizon_seconds: float | None = None) -> int:
        """Predict usage ``horizon_seconds`` past the newest sample.

        Least-squares line over the sample window, clamped to [0, physical].
        With fewer than two samples the current usage is returned.

        Args:
            component: Component identifier
            horizon_seconds: Look-ahead (defaults to the configured horizon)

        Returns:
            Predicted bytes
        """
        with self._lock:
            account = self._get(component)
            horizon = self.config.horizon if horizon_seconds is None else horizon_seconds
            samples = account.samples
            if len(samples) < 2:  # noqa: PLR2004
                return account.usage_bytes

            newest = samples[-1][0]
            times = [t - newest for t, _ in samples]
            usages = [u for _, u in samples]
            slope, intercept = statistics.linear_regression(times, usages)
            predicted = round(intercept + slope * horizon)
            return min(max(predicted, 0), self.config.physical_bytes)

    # ------------------------------------------------------------------ targets

    def notification_for(self, component: str) -> Notification:
        """Classify current usage against the component's target."""
        with self._lock:
            account = self._get(component)
            return notification_for_usage(
                account.usage_bytes, account.target_bytes, self.config.low_water
            )

    def broker_tick(self, now: float) -> list[tuple[str, Notification]]:
        """Re-predict, re-target and re-notify every component.

        Args:
            now: Current time

        Returns:
            (component, notification) pairs whose notification changed, in
            registration order
        """
        with self._lock:
            if self._last_tick is not None and now < self._last_tick:
                raise TimeRegressionError("broker", now, self._last_tick)
            self._last_tick = now

            accounts = list(self._accounts.values())
            if not accounts:
                return []

            for account in accounts:
                account.predicted_bytes = self.predict_usage(account.id)
            targets = compute_targets(accounts, self.config)

            changes: list[tuple[str, Notification]] = []
            for account in accounts:
                account.target_bytes = targets[account.id]
                notification = notification_for_usage(
                    account.usage_bytes, account.target_bytes, self.config.low_water
                )
                if notification is not account.notification:
                    account.notification = notification
                    changes.append((account.id, notification))
                    logger.debug(
                        "t=%.3f %s -> %s (usage=%d target=%d)",
                        now,
                        account.id,
                        notification.value,
                        account.usage_bytes,
                        account.target_bytes,
                    )

            for component, listeners in self._listeners.items():
                target = self._accounts[component].target_bytes
                for listener in listeners:
                    listener(target)
            return changes

    def _get(self, component: str) -> ComponentAccount:
        try:
            return self._accounts[component]
        except KeyError:
            raise UnknownComponentError(component, list(self._accounts)) from None
