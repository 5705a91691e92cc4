"""Three-tier compilation-throttling gateways.

A compilation acquires tiers in ascending order as its memory crosses each
tier's threshold and releases them in descending order when it finishes.
Tier 0 has 4 slots per CPU, tier 1 one per CPU, tier 2 a single slot. Tasks
that never reach the tier-0 threshold never touch a gateway.
"""

from __future__ import annotations

import bisect
import logging
import threading
from fractions import Fraction

from simdb_governor.exceptions import (
    AllocationOrderError,
    GatewayInvariantError,
    TaskStateError,
    TierNotHeldError,
)
from simdb_governor.models import (
    PROCEED,
    TIER_COUNT,
    AuditRecord,
    CompilationTask,
    GateDecision,
    GatewayCounters,
    GatewayPolicy,
    GatewayTier,
    TaskState,
    TimeoutSweep,
    WaitEntry,
)
from simdb_governor.waitfor import WaitForGraph

logger = logging.getLogger(__name__)


class GatewaySet:
    """The three monitors plus their wait queues.

    Operations are serialized by a lock so a grant is always atomic with the
    queue mutation that produced it.
    """

    def __init__(
        self,
        policy: GatewayPolicy,
        compilation_target_bytes: int,
        *,
        enabled: bool = True,
        audit: bool = False,
    ):
        """Initialize gateways.

        Args:
            policy: Slot, threshold and timeout policy
            compilation_target_bytes: Broker target of the compilation component
            enabled: When False, allocations always proceed and no tier is ever held
            audit: Record every enqueue/acquire/release/timeout in ``audit_log``
        """
        self.policy = policy
        self.enabled = enabled
        self.counters = GatewayCounters()
        self.audit_log: list[AuditRecord] | None = [] if audit else None

        slots = policy.slot_counts
        self.tiers = [
            GatewayTier(index=i, threshold_bytes=0, slots=slots[i], timeout=policy.timeouts[i])
            for i in range(TIER_COUNT)
        ]
        self.tiers[0].threshold_bytes = policy.t1_bytes
        self._target = compilation_target_bytes
        self._tasks: dict[str, CompilationTask] = {}
        self._lock = threading.RLock()
        self._apply_thresholds(*self.recompute_thresholds(compilation_target_bytes, 0, 0))

    @classmethod
    def configure(
        cls, policy: GatewayPolicy, compilation_target_bytes: int, **kwargs: bool
    ) -> GatewaySet:
        """Build a gateway set with slots {4*cpus, cpus, 1} and initial thresholds."""
        return cls(policy, compilation_target_bytes, **kwargs)

    # ---------------------------------------------------------------- thresholds

    @property
    def thresholds(self) -> tuple[int, int, int]:
        with self._lock:
            return tuple(t.threshold_bytes for t in self.tiers)  # type: ignore[return-value]

    @property
    def compilation_target(self) -> int:
        return self._target

    def recompute_thresholds(
        self, compilation_target_bytes: int, small_active: int, medium_active: int
    ) -> tuple[int, int]:
        """Compute the tier-1 and tier-2 thresholds.

        t2 = target * F_small / max(S, 1) and t3 = target * F_medium / max(M, 1),
        in exact arithmetic, then clamped so t1 < t2 < t3. In static mode the
        configured thresholds are returned unchanged.

        Args:
            compilation_target_bytes: Broker target for compilations
            small_active: S, tasks whose highest held tier is 0
            medium_active: M, tasks holding tier 1

        Returns:
            (t2, t3) in bytes
        """
        policy = self.policy
        if not policy.dynamic_thresholds:
            return policy.static_t2_bytes, policy.static_t3_bytes  # type: ignore[return-value]

        target = Fraction(compilation_target_bytes)
        t2 = int(target * Fraction(str(policy.small_fraction)) / max(small_active, 1))
        t3 = int(target * Fraction(str(policy.medium_fraction)) / max(medium_active, 1))
        t2 = max(t2, policy.t1_bytes + 1)
        t3 = max(t3, t2 + 1)
        return t2, t3

    def update_target(self, compilation_target_bytes: int) -> tuple[int, int]:
        """Take a new broker target and re-derive thresholds from current counts."""
        with self._lock:
            self._target = compilation_target_bytes
            small, medium, _ = self.active_counts()
            thresholds = self.recompute_thresholds(compilation_target_bytes, small, medium)
            self._apply_thresholds(*thresholds)
            return thresholds

    def _apply_thresholds(self, t2: int, t3: int) -> None:
        self.tiers[1].threshold_bytes = t2
        self.tiers[2].threshold_bytes = t3

    # ---------------------------------------------------------------- allocation

    def on_allocation(
        self, task: CompilationTask, new_memory_bytes: int, now: float
    ) -> GateDecision:
        """Report a task's new memory total and acquire whatever tiers it now needs.

        Args:
            task: Running compilation
            new_memory_bytes: Task memory after the allocation
            now: Current time

        Returns:
            PROCEED, or a blocked decision naming the tier and deadline

        Raises:
            TaskStateError: If the task is not running
            AllocationOrderError: If memory went down
        """
        with self._lock:
            if task.state is not TaskState.RUNNING:
                raise TaskStateError(task.task_id, task.state.value, "allocate for")
            if new_memory_bytes < task.memory_bytes:
                raise AllocationOrderError(task.task_id, task.memory_bytes, new_memory_bytes)
            task.memory_bytes = new_memory_bytes
            if not self.enabled:
                return PROCEED
            return self._advance(task, now)

    def _advance(self, task: CompilationTask, now: float) -> GateDecision:
        while len(task.held_tiers) < TIER_COUNT:
            tier = self.tiers[len(task.held_tiers)]
            if task.memory_bytes < tier.threshold_bytes:
                break
            if tier.has_free_slot and not tier.wait_queue:
                self._acquire(task, tier, now)
                continue
            return self._block(task, tier, now)
        return PROCEED

    def _acquire(self, task: CompilationTask, tier: GatewayTier, now: float) -> None:
        tier.holders[task.task_id] = None
        task.held_tiers.append(tier.index)
        self._tasks[task.task_id] = task
        self.counters.acquisitions += 1
        self._audit(now, task, "acquire", tier)

    def _block(self, task: CompilationTask, tier: GatewayTier, now: float) -> GateDecision:
        deadline = now + tier.timeout
        bisect.insort(tier.wait_queue, WaitEntry(now, task.task_id, deadline))
        task.state = TaskState.BLOCKED
        task.blocked_tier = tier.index
        task.deadline = deadline
        self._tasks[task.task_id] = task
        self.counters.blocks += 1
        self._audit(now, task, "enqueue", tier)
        logger.debug(
            "t=%.3f %s blocked at tier %d (%d bytes, deadline %.3f)",
            now,
            task.task_id,
            tier.index,
            task.memory_bytes,
            deadline,
        )
        return GateDecision(tier=tier.index, deadline=deadline)

    # ---------------------------------------------------------------- release

    def on_release_event(self, task: CompilationTask, now: float = 0.0) -> list[CompilationTask]:
        """Release a finishing task's tiers, highest first, granting queue heads.

        Each granted waiter returns to RUNNING and immediately retries the
        tiers above the one it was granted, so it may come back BLOCKED at a
        higher tier.

        Args:
            task: Task in a terminal or best-plan state
            now: Current time

        Returns:
            Waiters granted a slot, in grant order

        Raises:
            TaskStateError: If the task is still running or blocked
            TierNotHeldError: If the task's held tiers are inconsistent
        """
        with self._lock:
            if not task.state.is_releasable:
                raise TaskStateError(task.task_id, task.state.value, "release")
            self._dequeue(task)
            return self._release_all(task, now)

    def _release_all(self, task: CompilationTask, now: float) -> list[CompilationTask]:
        granted: list[CompilationTask] = []
        for index in reversed(list(task.held_tiers)):
            self.release_tier(task, index, now)
            granted.extend(self._grant_waiters(self.tiers[index], now))
        self._tasks.pop(task.task_id, None)
        return granted

    def release_tier(self, task: CompilationTask, index: int, now: float = 0.0) -> None:
        """Release one tier; only the task's highest held tier may be released."""
        with self._lock:
            tier = self.tiers[index]
            if task.task_id not in tier.holders or task.highest_tier != index:
                raise TierNotHeldError(task.task_id, index)
            del tier.holders[task.task_id]
            task.held_tiers.pop()
            self._audit(now, task, "release", tier)

    def _grant_waiters(self, tier: GatewayTier, now: float) -> list[CompilationTask]:
        granted: list[CompilationTask] = []
        while tier.has_free_slot and tier.wait_queue:
            entry = tier.wait_queue.pop(0)
            waiter = self._tasks[entry.task_id]
            waiter.blocked_tier = None
            waiter.deadline = None
            self._acquire(waiter, tier, now)
            logger.debug("t=%.3f %s granted tier %d", now, waiter.task_id, tier.index)
            self._advance(waiter, now)
            # One state write per grant: BLOCKED again at a higher tier, or RUNNING
            if waiter.blocked_tier is None:
                waiter.state = TaskState.RUNNING
            granted.append(waiter)
        return granted

    def _dequeue(self, task: CompilationTask) -> None:
        if task.blocked_tier is None:
            return
        queue = self.tiers[task.blocked_tier].wait_queue
        queue[:] = [entry for entry in queue if entry.task_id != task.task_id]
        task.blocked_tier = None
        task.deadline = None

    # ---------------------------------------------------------------- timeouts

    def check_timeouts(self, now: float) -> TimeoutSweep:
        """Abort every waiter whose deadline has passed.

        Expired waiters are taken out of their queues first (tier order, then
        queue order), marked ABORTED_TIMEOUT, and then have their held tiers
        released, which may grant other waiters.

        Returns:
            TimeoutSweep(timed_out, unblocked)
        """
        with self._lock:
            expired: list[tuple[CompilationTask, GatewayTier]] = []
            for tier in self.tiers:
                keep: list[WaitEntry] = []
                for entry in tier.wait_queue:
                    if entry.deadline <= now:
                        expired.append((self._tasks[entry.task_id], tier))
                    else:
                        keep.append(entry)
                tier.wait_queue[:] = keep

            timed_out: list[CompilationTask] = []
            for task, tier in expired:
                task.state = TaskState.ABORTED_TIMEOUT
                task.blocked_tier = None
                task.deadline = None
                self.counters.timeouts += 1
                self._audit(now, task, "timeout", tier)
                logger.debug("t=%.3f %s timed out at tier %d", now, task.task_id, tier.index)
                timed_out.append(task)

            unblocked: list[CompilationTask] = []
            for task in timed_out:
                unblocked.extend(self._release_all(task, now))
            return TimeoutSweep(timed_out, unblocked)

    def next_deadline(self) -> float | None:
        with self._lock:
            deadlines = [e.deadline for t in self.tiers for e in t.wait_queue]
            return min(deadlines) if deadlines else None

    # ---------------------------------------------------------------- best plan

    def oom_imminent(self, task: CompilationTask) -> bool:
        """Signal that the task is about to run out of memory.

        If enough of the search space has been explored, the task switches to
        FINALIZE_BEST_PLAN: it stops growing, leaves any wait queue, and keeps
        its tiers until released. Inert when throttling is disabled.

        Returns:
            True if the task is now finalizing

        Raises:
            TaskStateError: If the task is already terminal or finalizing
        """
        with self._lock:
            if task.state.is_releasable:
                raise TaskStateError(task.task_id, task.state.value, "finalize")
            if not self.enabled or task.progress < self.policy.best_plan_min_progress:
                return False
            self._dequeue(task)
            task.state = TaskState.FINALIZE_BEST_PLAN
            self.counters.best_plan_finalizations += 1
            logger.debug(
                "%s finalizing best plan at progress %.2f", task.task_id, task.progress
            )
            return True

    # ---------------------------------------------------------------- observation

    def active_counts(self) -> tuple[int, int, int]:
        """(S, M, L): tier-0-only holders, tier-1 holders, tier-2 holders."""
        with self._lock:
            small, medium, large = (len(t.holders) for t in self.tiers)
            return small - medium, medium, large

    def queue_lengths(self) -> tuple[int, int, int]:
        with self._lock:
            return tuple(len(t.wait_queue) for t in self.tiers)  # type: ignore[return-value]

    def wait_for_graph(self) -> WaitForGraph:
        with self._lock:
            graph = WaitForGraph()
            for task_id in self._tasks:
                graph.add_task(task_id)
            for tier in self.tiers:
                for entry in tier.wait_queue:
                    for holder in tier.holders:
                        graph.add_wait(entry.task_id, holder)
            return graph

    def check_invariants(self) -> None:
        """Assert slot caps, prefix holding, queue consistency, ordering and acyclicity.

        Raises:
            GatewayInvariantError: On the first structural violation
            CircularWaitError: If the wait-for graph has a cycle
        """
        with self._lock:
            for tier in self.tiers:
                if len(tier.holders) > tier.slots:
                    raise GatewayInvariantError(
                        f"tier {tier.index} has {len(tier.holders)} holders for {tier.slots} slots"
                    )
                for holder in tier.holders:
                    if tier.index not in self._tasks[holder].held_tiers:
                        raise GatewayInvariantError(f"{holder} listed at tier {tier.index}")
                for entry in tier.wait_queue:
                    waiter = self._tasks[entry.task_id]
                    if waiter.state is not TaskState.BLOCKED or waiter.blocked_tier != tier.index:
                        raise GatewayInvariantError(f"{entry.task_id} queued but not blocked")
                    if waiter.held_tiers != list(range(tier.index)):
                        raise GatewayInvariantError(
                            f"{entry.task_id} queued at tier {tier.index} "
                            f"holding {waiter.held_tiers}"
                        )
                if tier.wait_queue != sorted(tier.wait_queue):
                    raise GatewayInvariantError(f"tier {tier.index} queue out of order")

            for task in self._tasks.values():
                if task.held_tiers != list(range(len(task.held_tiers))):
                    raise GatewayInvariantError(f"{task.task_id} holds {task.held_tiers}")

            t1, t2, t3 = self.thresholds
            if not t1 < t2 < t3:
                raise GatewayInvariantError(f"thresholds out of order: {t1}, {t2}, {t3}")

            self.wait_for_graph().assert_acyclic()

    def _audit(self, now: float, task: CompilationTask, action: str, tier: GatewayTier) -> None:
        if self.audit_log is not None:
            self.audit_log.append(
                AuditRecord(
                    time=now,
                    task_id=task.task_id,
                    action=action,
                    tier=tier.index,
                    memory_bytes=task.memory_bytes,
                    threshold_bytes=tier.threshold_bytes,
                )
            )
