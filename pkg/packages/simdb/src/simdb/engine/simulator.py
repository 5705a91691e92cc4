"""
Deterministic discrete-event DBMS memory simulator.

The simulator owns a memory ledger shared by four components (buffer pool,
compilations, execution grants, plan cache), a memory broker fed by the
ledger, and a gateway set that throttles compilations. Closed-loop clients
submit queries that compile step by step, wait for an execution grant,
execute with an I/O penalty that depends on the buffer pool, and come back
after a think time.

All randomness comes from per-client streams derived from the workload seed,
so a run is a pure function of (config, seed).
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable, Sequence
from enum import Enum
from fractions import Fraction
from typing import Any

from simdb_governor import (
    CompilationTask,
    GatewaySet,
    GovernorError,
    MemoryBroker,
    Notification,
    TaskState,
)

from simdb.config import ScenarioConfig
from simdb.engine.events import EventKind, EventQueue, SimClock, SimEvent, Submission
from simdb.engine.ledger import MemoryLedger
from simdb.engine.subcomponents import (
    BUFFER_POOL,
    COMPILATION,
    EXECUTION,
    PLAN_CACHE,
    BufferPoolModel,
    PlanCacheModel,
)
from simdb.engine.telemetry import GatewaySample, SimulationReport, Telemetry, TraceRow
from simdb.exceptions import InvariantViolationError, SimulationStateError
from simdb.models import FailureReason, QueryInstance, QueryPhase
from simdb.workload.classes import ClientModel, ClientStreams, Workload, next_query, think_time
from simdb.workload.scripted import ScriptedQuery

logger = logging.getLogger(__name__)

COMPONENTS = (BUFFER_POOL, COMPILATION, EXECUTION, PLAN_CACHE)


class AllocationResult(str, Enum):
    GRANTED = "GRANTED"
    GRANTED_AFTER_SHRINK = "GRANTED_AFTER_SHRINK"
    DENIED = "DENIED"


class Simulator:
    """One simulation run.

    Build it, optionally call set_throttling(), then run() once.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        *,
        workload: Workload | None = None,
        clients: ClientModel | None = None,
        script: Sequence[ScriptedQuery] | None = None,
        trace: bool = False,
        check_invariants: bool = False,
        audit: bool = False,
    ):
        """Initialize simulator.

        Args:
            config: Validated scenario
            workload: Workload to draw from (defaults to the configured one)
            clients: Client population (defaults to the configured one)
            script: Fixed arrivals replacing the closed-loop clients
            trace: Record a per-task timeline row for every query an event touches
            check_invariants: Verify ledger, gateway and lifecycle invariants after every event
            audit: Keep the gateway audit log
        """
        self.config = config
        self.workload = workload or config.workload.build_workload()
        self.clients = clients or config.workload.client_model()
        self.script = tuple(script) if script is not None else None
        self.check_invariants_enabled = check_invariants
        self.throttling = config.throttling
        self._started = False

        engine = config.engine
        floors = engine.floors
        self.queue = EventQueue()
        self.clock = SimClock()
        self._tick_time = 0.0

        self.broker = MemoryBroker(config.broker_config())
        self.broker.register_component(BUFFER_POOL, True, floors.buffer_pool)
        self.broker.register_component(COMPILATION, False, floors.compilation)
        self.broker.register_component(EXECUTION, False, floors.execution)
        self.broker.register_component(PLAN_CACHE, True, floors.plan_cache)

        self.ledger = MemoryLedger(config.physical_bytes, COMPONENTS, self._mirror_usage)
        self.buffer_pool = BufferPoolModel(self.ledger, floors.buffer_pool, engine.io_penalty_k)
        self.plan_cache = PlanCacheModel(
            self.ledger,
            floors.plan_cache,
            engine.plan_cache_hit_rate,
            engine.plan_cache_working_bytes,
            engine.plan_bytes,
        )
        self.buffer_pool.fill_floor()
        self.plan_cache.fill_floor()

        self.gateways = GatewaySet(
            config.gateway_policy(),
            self.broker.target_for(COMPILATION),
            enabled=self.throttling,
            audit=audit,
        )
        self.broker.add_target_listener(COMPILATION, self.gateways.update_target)

        self.telemetry = Telemetry(
            warmup=engine.warmup_seconds,
            duration=engine.duration_seconds,
            slice_seconds=engine.slice_seconds,
            trace_enabled=trace,
        )

        seed = config.workload.seed
        self._streams = [
            ClientStreams.for_client(seed, client) for client in range(self.clients.client_count)
        ]
        self._issued = [0] * self.clients.client_count
        self._compiling: dict[str, QueryInstance] = {}
        self._executing: dict[str, QueryInstance] = {}
        self._in_flight = 0
        self._touched: dict[str, QueryInstance] = {}

        self._handlers: dict[EventKind, Callable[[Any], None]] = {
            EventKind.QUERY_ARRIVAL: self._on_arrival,
            EventKind.CLIENT_RESUBMIT: self._on_arrival,
            EventKind.COMPILE_STEP: self.compile_step,
            EventKind.COMPILE_DONE: self._on_compile_done,
            EventKind.EXEC_GRANT_RETRY: self._request_grant,
            EventKind.EXEC_DONE: self._on_exec_done,
            EventKind.GATEWAY_TIMEOUT_SCAN: self._on_timeout_scan,
            EventKind.BROKER_TICK: self._on_broker_tick,
            EventKind.METRICS_SAMPLE: self._on_metrics_sample,
        }

    # ------------------------------------------------------------------ control

    @property
    def now(self) -> float:
        return self.clock.now

    def set_throttling(self, enabled: bool) -> None:
        """Switch the gateways on or off before the run starts.

        With throttling off every allocation proceeds without touching a
        gateway; the broker and the ledger behave exactly as before.

        Raises:
            SimulationStateError: If the run has started
        """
        if self._started:
            raise SimulationStateError("toggle throttling", "the simulation has already started")
        self.throttling = enabled
        self.gateways.enabled = enabled
        self.config = self.config.model_copy(update={"throttling": enabled})

    def run(self) -> SimulationReport:
        """Drive the event loop until the configured duration.

        Raises:
            SimulationStateError: If called a second time
            InvariantViolationError: In invariant-check mode, on the first violation
        """
        if self._started:
            raise SimulationStateError("run the simulator", "it has already run")
        self._started = True

        engine = self.config.engine
        self._schedule_initial()
        logger.debug(
            "Starting run: %d clients, throttling=%s, duration=%.0fs",
            self.clients.client_count,
            self.throttling,
            engine.duration_seconds,
        )

        while self.queue:
            event = self.queue.pop()
            if event.time >= engine.duration_seconds:
                break
            self.clock.advance(event.time)
            self._dispatch(event)
            if self.check_invariants_enabled:
                self.check_invariants()
            if self.now >= engine.warmup_seconds:
                self.telemetry.update_peaks(self.ledger.snapshot())
            self._flush_trace()

        return self.telemetry.build_report(self.config.resolved(), self.gateways.counters)

    def _schedule_initial(self) -> None:
        engine = self.config.engine
        self.queue.schedule(engine.warmup_seconds, EventKind.METRICS_SAMPLE, 0)
        self.queue.schedule(0.0, EventKind.BROKER_TICK, 0)
        if self.script is not None:
            for scripted in self.script:
                self.queue.schedule(scripted.arrival, EventKind.QUERY_ARRIVAL, scripted)
            return
        for client in range(self.clients.client_count):
            delay = think_time(self.clients, self._streams[client].think)
            self.queue.schedule(delay, EventKind.QUERY_ARRIVAL, Submission(client))

    def _dispatch(self, event: SimEvent) -> None:
        self._handlers[event.kind](event.payload)

    # ------------------------------------------------------------------ memory

    def _mirror_usage(self, component: str, usage_bytes: int) -> None:
        self.broker.record_usage(component, usage_bytes, self._tick_time)

    def try_allocate(self, component: str, delta_bytes: int) -> AllocationResult:
        """
        Allocate memory for a component, shrinking caches if needed.

        When free memory is short, the plan cache and then the buffer pool give
        back memory down to max(floor, broker target). If even that cannot
        cover the request nothing is shrunk and the request is denied.

        Args:
            component: Requesting component
            delta_bytes: Bytes requested (>= 0)

        Returns:
            GRANTED, GRANTED_AFTER_SHRINK or DENIED
        """
        if delta_bytes < 0:
            raise ValueError(f"delta_bytes must be >= 0, got {delta_bytes}")
        free = self.ledger.free_bytes
        if free >= delta_bytes:
            self.ledger.allocate(component, delta_bytes)
            return AllocationResult.GRANTED

        needed = delta_bytes - free
        caches = (self.plan_cache, self.buffer_pool)
        targets = [self.broker.target_for(cache.component) for cache in caches]
        reclaimable = sum(c.reclaimable(t) for c, t in zip(caches, targets, strict=True))
        if reclaimable < needed:
            return AllocationResult.DENIED

        for cache, target in zip(caches, targets, strict=True):
            if needed <= 0:
                break
            needed -= cache.shrink_by(needed, target)
        self.ledger.allocate(component, delta_bytes)
        return AllocationResult.GRANTED_AFTER_SHRINK

    def execution_duration(self, query: QueryInstance) -> float:
        """Execution time of a query given the current pool and working-set demand."""
        return self.buffer_pool.execution_duration(query.exec_seconds)

    # ------------------------------------------------------------------ arrivals

    def _on_arrival(self, payload: Submission | ScriptedQuery) -> None:
        if isinstance(payload, ScriptedQuery):
            query = payload.instantiate()
        else:
            query = self._new_query(payload)
        self._submit(query)

    def _new_query(self, submission: Submission) -> QueryInstance:
        client = submission.client
        self._issued[client] += 1
        return next_query(
            self.workload,
            client,
            self._streams[client].query,
            query_id=f"c{client:03d}-{self._issued[client]:05d}",
            submit_time=self.now,
            attempt_count=submission.attempt,
        )

    def _submit(self, query: QueryInstance) -> None:
        self._in_flight += 1
        self._touch(query)
        probability = self.plan_cache.hit_probability()
        if probability > 0 and query.client >= 0:
            if self._streams[query.client].cache.random() < probability:
                query.plan_cache_hit = True
                self.telemetry.record_plan_cache_hit(self.now)
                self._request_grant(query)
                return
        self._start_compile(query)

    # ------------------------------------------------------------------ compilation

    def _start_compile(self, query: QueryInstance) -> None:
        step = self.config.engine.step_seconds
        query.phase = QueryPhase.COMPILING
        query.task = CompilationTask(query.query_id)
        query.compile_steps = max(1, math.ceil(query.compile_seconds / step))
        query.steps_done = 0
        self._compiling[query.query_id] = query
        self.queue.schedule(self.now + step, EventKind.COMPILE_STEP, query)

    def compile_step(self, query: QueryInstance) -> None:
        """
        Advance a running compilation by one step of work.

        Memory moves to ``floor(peak * shape(k / n))``. The increment is
        allocated through try_allocate and reported to the gateways; a blocked
        task stays at its current memory until a release or timeout lets it go.
        """
        task = query.task
        assert task is not None
        k = query.steps_done + 1
        n = query.compile_steps

        if self.throttling and self._compile_oom_imminent(query):
            if self.gateways.oom_imminent(task):
                self._finalize(query)
                return

        share = query.growth_shape.fraction(Fraction(k, n))
        new_memory = math.floor(query.peak_compile_bytes * share)
        delta = new_memory - task.memory_bytes
        if self.try_allocate(COMPILATION, delta) is AllocationResult.DENIED:
            self.on_denied_allocation(query)
            return

        query.steps_done = k
        task.progress = k / n
        self._touch(query)
        decision = self.gateways.on_allocation(task, new_memory, self.now)
        if decision.blocked:
            self._schedule_timeout_scan(decision.deadline)
            return
        self._continue_compile(query, self.now)

    def _compile_oom_imminent(self, query: QueryInstance) -> bool:
        """The compilation component is over target and this task's remaining growth won't fit."""
        account = self.broker.account(COMPILATION)
        if account.notification is not Notification.MUST_SHRINK:
            return False
        task = query.task
        assert task is not None
        remaining = query.peak_compile_bytes - task.memory_bytes
        headroom = account.target_bytes - self.ledger.usage(COMPILATION)
        return remaining > headroom

    def _continue_compile(self, query: QueryInstance, at: float) -> None:
        if query.steps_done >= query.compile_steps:
            self.queue.schedule(at, EventKind.COMPILE_DONE, query)
        else:
            self.queue.schedule(at + self.config.engine.step_seconds, EventKind.COMPILE_STEP, query)

    def _finalize(self, query: QueryInstance) -> None:
        logger.debug("t=%.3f %s finishing with its best plan so far", self.now, query.query_id)
        self._touch(query)
        self.queue.schedule(
            self.now + self.config.gateways.finalize_seconds, EventKind.COMPILE_DONE, query
        )

    def _on_compile_done(self, query: QueryInstance) -> None:
        task = query.task
        assert task is not None
        query.degraded = task.state is TaskState.FINALIZE_BEST_PLAN
        if not query.degraded:
            task.state = TaskState.DONE

        granted = self.gateways.on_release_event(task, self.now)
        del self._compiling[query.query_id]
        self.ledger.release(COMPILATION, task.memory_bytes)
        if not query.degraded:
            self.plan_cache.insert(self.broker.target_for(PLAN_CACHE))
        self._touch(query)
        self._request_grant(query)
        self._resume(granted)

    def _resume(self, granted: list[CompilationTask]) -> None:
        for task in granted:
            query = self._compiling[task.task_id]
            self._touch(query)
            if task.state is TaskState.BLOCKED:
                self._schedule_timeout_scan(task.deadline)
            else:
                self._continue_compile(query, self.now)

    def _schedule_timeout_scan(self, deadline: float | None) -> None:
        if deadline is not None:
            self.queue.schedule(deadline, EventKind.GATEWAY_TIMEOUT_SCAN)

    def _on_timeout_scan(self, _payload: None) -> None:
        sweep = self.gateways.check_timeouts(self.now)
        for task in sweep.timed_out:
            query = self._compiling.pop(task.task_id)
            self.ledger.release(COMPILATION, task.memory_bytes)
            logger.debug("t=%.3f %s timed out in a gateway queue", self.now, query.query_id)
            self._fail(query, FailureReason.TIMEOUT)
        self._resume(sweep.unblocked)

    def on_denied_allocation(self, query: QueryInstance) -> None:
        """
        Handle a DENIED allocation.

        A compiling query first asks the gateways whether it can finish with
        its best plan so far; otherwise it is aborted, its memory and tiers are
        released and its client resubmits. A query waiting for an execution
        grant retries with exponential backoff until the grant timeout.
        """
        if query.phase is QueryPhase.AWAITING_GRANT:
            self._wait_for_grant(query)
            return

        task = query.task
        assert task is not None
        if self.gateways.oom_imminent(task):
            self._finalize(query)
            return

        task.state = TaskState.ABORTED_OOM
        granted = self.gateways.on_release_event(task, self.now)
        del self._compiling[query.query_id]
        self.ledger.release(COMPILATION, task.memory_bytes)
        logger.debug(
            "t=%.3f %s aborted: out of memory at %d compile bytes",
            self.now,
            query.query_id,
            task.memory_bytes,
        )
        self._resume(granted)
        self._fail(query, FailureReason.OOM)

    # ------------------------------------------------------------------ execution

    def _request_grant(self, query: QueryInstance) -> None:
        query.phase = QueryPhase.AWAITING_GRANT
        if self.try_allocate(EXECUTION, query.exec_grant_bytes) is AllocationResult.DENIED:
            self.on_denied_allocation(query)
            return
        self._start_execution(query)

    def _wait_for_grant(self, query: QueryInstance) -> None:
        engine = self.config.engine
        if query.grant_wait_start is None:
            query.grant_wait_start = self.now
            query.grant_backoff = engine.grant_backoff_initial_seconds
        elif self.now - query.grant_wait_start >= engine.grant_timeout_seconds:
            logger.debug("t=%.3f %s gave up waiting for its grant", self.now, query.query_id)
            self._fail(query, FailureReason.OOM)
            return
        else:
            query.grant_backoff = min(query.grant_backoff * 2, engine.grant_backoff_max_seconds)
        self._touch(query)
        self.queue.schedule(self.now + query.grant_backoff, EventKind.EXEC_GRANT_RETRY, query)

    def _start_execution(self, query: QueryInstance) -> None:
        query.phase = QueryPhase.EXECUTING
        self._executing[query.query_id] = query
        self.buffer_pool.add_demand(query.working_set_bytes)
        self._touch(query)
        self.queue.schedule(
            self.now + self.execution_duration(query), EventKind.EXEC_DONE, query
        )

    def _on_exec_done(self, query: QueryInstance) -> None:
        self.ledger.release(EXECUTION, query.exec_grant_bytes)
        del self._executing[query.query_id]
        self.buffer_pool.remove_demand(query.working_set_bytes)
        query.phase = QueryPhase.DONE
        query.completion_time = self.now
        self._in_flight -= 1
        self.telemetry.record_completion(self.now, self.now - query.submit_time, query.degraded)
        self._touch(query)
        self._next_arrival(query.client)

    # ------------------------------------------------------------------ clients

    def _fail(self, query: QueryInstance, reason: FailureReason) -> None:
        query.phase = QueryPhase.FAILED
        query.failure = reason
        query.completion_time = self.now
        self._in_flight -= 1
        self.telemetry.record_failure(self.now, reason)
        self._touch(query)
        if query.client < 0:
            return
        if self.clients.retry_on_failure:
            self.queue.schedule(
                self.now + self.config.engine.retry_delay_seconds,
                EventKind.CLIENT_RESUBMIT,
                Submission(query.client, query.attempt_count + 1),
            )
        else:
            self._next_arrival(query.client)

    def _next_arrival(self, client: int) -> None:
        if client < 0:
            return
        delay = think_time(self.clients, self._streams[client].think)
        self.queue.schedule(self.now + delay, EventKind.QUERY_ARRIVAL, Submission(client))

    # ------------------------------------------------------------------ broker and metrics

    def _on_broker_tick(self, index: int) -> None:
        now = self.now
        self._tick_time = now
        for component in COMPONENTS:
            self.broker.record_usage(component, self.ledger.usage(component), now)

        for component, notification in self.broker.broker_tick(now):
            if notification is Notification.MUST_SHRINK:
                self.telemetry.record_must_shrink(now, component)

        pool = self.broker.account(BUFFER_POOL)
        if pool.notification is Notification.MUST_SHRINK:
            self.buffer_pool.shrink_to(pool.target_bytes)
        elif pool.notification is Notification.CAN_GROW:
            self.buffer_pool.grow_toward(pool.target_bytes)

        cache = self.broker.account(PLAN_CACHE)
        if cache.notification is Notification.MUST_SHRINK:
            self.plan_cache.shrink_to(cache.target_bytes)

        next_index = index + 1
        self.queue.schedule(
            next_index * self.config.broker.tick_seconds, EventKind.BROKER_TICK, next_index
        )

    def _on_metrics_sample(self, index: int) -> None:
        telemetry = self.telemetry
        if index == 0:
            telemetry.counters_at_warmup = dataclasses.replace(self.gateways.counters)
        telemetry.memory.append((self.now, self.ledger.snapshot()))
        small, medium, large = self.gateways.active_counts()
        queue0, queue1, queue2 = self.gateways.queue_lengths()
        _, t2, t3 = self.gateways.thresholds
        telemetry.gateway_samples.append(
            GatewaySample(self.now, small, medium, large, queue0, queue1, queue2, t2, t3)
        )
        if index + 1 < len(telemetry.slices):
            self.queue.schedule(
                telemetry.slice_start(index + 1), EventKind.METRICS_SAMPLE, index + 1
            )

    # ------------------------------------------------------------------ tracing

    def _touch(self, query: QueryInstance) -> None:
        if self.telemetry.trace_enabled:
            self._touched[query.query_id] = query

    def _flush_trace(self) -> None:
        if not self._touched:
            return
        for query in self._touched.values():
            held = "-"
            if query.phase is QueryPhase.COMPILING and query.task is not None:
                held = query.task.held_label()
            self.telemetry.record_trace(
                TraceRow(
                    self.now,
                    query.query_id,
                    query.compile_memory_bytes,
                    query.trace_state(),
                    held,
                )
            )
        self._touched.clear()

    # ------------------------------------------------------------------ invariants

    def check_invariants(self) -> None:
        """
        Verify cross-component invariants at an event boundary.

        Raises:
            InvariantViolationError: Naming the first failing check
        """
        now = self.now
        problem = self.ledger.check_conservation()
        if problem is not None:
            raise InvariantViolationError("ledger conservation", problem, now)

        try:
            self.gateways.check_invariants()
        except GovernorError as e:
            raise InvariantViolationError("gateways", str(e), now) from e

        compiling = sum(q.task.memory_bytes for q in self._compiling.values() if q.task)
        if compiling != self.ledger.usage(COMPILATION):
            raise InvariantViolationError(
                "compilation memory",
                f"ledger holds {self.ledger.usage(COMPILATION)}, tasks hold {compiling}",
                now,
            )

        granted = sum(q.exec_grant_bytes for q in self._executing.values())
        if granted != self.ledger.usage(EXECUTION):
            raise InvariantViolationError(
                "execution memory",
                f"ledger holds {self.ledger.usage(EXECUTION)}, grants total {granted}",
                now,
            )

        pool = self.buffer_pool
        cap = max(pool.floor_bytes, pool.demand_bytes)
        if not pool.floor_bytes <= pool.usage_bytes <= cap:
            raise InvariantViolationError(
                "buffer pool bounds",
                f"usage {pool.usage_bytes} outside [{pool.floor_bytes}, {cap}]",
                now,
            )

        if self.script is None and self._in_flight > self.clients.client_count:
            raise InvariantViolationError(
                "closed loop",
                f"{self._in_flight} queries in flight for {self.clients.client_count} clients",
                now,
            )

        if not self.throttling and any(tier.holders for tier in self.gateways.tiers):
            raise InvariantViolationError("throttling off", "a gateway tier is held", now)


def with_run_settings(
    config: ScenarioConfig, seed: int | None = None, duration: float | None = None
) -> ScenarioConfig:
    """Copy of ``config`` with a different workload seed or duration (re-validated)."""
    if seed is None and duration is None:
        return config
    document = config.resolved()
    if seed is not None:
        document["workload"]["seed"] = seed
    if duration is not None:
        document["engine"]["duration_seconds"] = duration
    return ScenarioConfig.model_validate(document)


def run(
    config: ScenarioConfig,
    workload: Workload | None = None,
    seed: int | None = None,
    duration: float | None = None,
    *,
    throttling: bool | None = None,
    **options: Any,
) -> SimulationReport:
    """
    Run one simulation.

    Args:
        config: Validated scenario
        workload: Workload to use instead of the configured one
        seed: Master seed replacing ``workload.seed``
        duration: Simulated seconds replacing ``engine.duration_seconds``
        throttling: Replace the configured throttling switch
        **options: Passed to Simulator (script, trace, check_invariants, audit)

    Returns:
        The run's report

    Example:
        >>> report = run(load_scenario(Path("sales30.json")), seed=7)
        >>> report.completed
    """
    simulator = Simulator(with_run_settings(config, seed, duration), workload=workload, **options)
    if throttling is not None:
        simulator.set_throttling(throttling)
    return simulator.run()
