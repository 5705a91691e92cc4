"""Event-by-event check of the fig2 scripted scenario.

Four background compilations (B1-B4) fill the four small-gateway slots of a
single-CPU machine; three foreground queries (Q1-Q3) then queue behind them.
Thresholds are static at 5/20/40 MB and every query grows linearly, one
compile step per second.
"""

import pytest
from simdb.config import build_config
from simdb.engine import SimulationReport, Simulator
from simdb.workload import get_scenario
from simdb_governor import MB

pytestmark = pytest.mark.integration

TASKS = ("B1", "B2", "B3", "B4", "Q1", "Q2", "Q3")


def _simulate(throttling: bool) -> tuple[Simulator, SimulationReport]:
    scenario = get_scenario("fig2")
    sim = Simulator(
        build_config(scenario.config),
        script=scenario.queries,
        trace=True,
        check_invariants=True,
        audit=True,
    )
    sim.set_throttling(throttling)
    return sim, sim.run()


def blocked_intervals(report: SimulationReport, task_id: str) -> list[tuple[float, float]]:
    """[first BLOCKED row, next row in another state] spans for one task."""
    intervals = []
    start = None
    for row in report.trace:
        if row.task_id != task_id:
            continue
        if row.state == "BLOCKED":
            if start is None:
                start = row.time
        elif start is not None:
            intervals.append((start, row.time))
            start = None
    return intervals


def compile_done_time(report: SimulationReport, task_id: str) -> float:
    return next(r.time for r in report.trace if r.task_id == task_id and r.state == "EXECUTING")


@pytest.fixture(scope="module")
def throttled() -> tuple[Simulator, SimulationReport]:
    return _simulate(throttling=True)


@pytest.fixture(scope="module")
def unthrottled() -> tuple[Simulator, SimulationReport]:
    return _simulate(throttling=False)


class TestThrottledTimeline:
    """The gateway-by-gateway timeline with throttling on."""

    def test_blocked_intervals(self, throttled):
        _, report = throttled

        assert blocked_intervals(report, "Q1") == [(12.0, 15.0), (18.0, 24.0)]
        assert blocked_intervals(report, "Q2") == [(13.0, 24.0)]
        assert blocked_intervals(report, "Q3") == [(22.0, 30.0)]
        for task_id in ("B1", "B2", "B3", "B4"):
            assert blocked_intervals(report, task_id) == []

    def test_blocked_memory_plateaus(self, throttled):
        _, report = throttled
        blocked = [
            (r.time, r.task_id, r.memory_bytes, r.held_tiers)
            for r in report.trace
            if r.state == "BLOCKED"
        ]

        assert blocked == [
            (12.0, "Q1", 8 * MB, "-"),
            (13.0, "Q2", 6 * MB, "-"),
            (18.0, "Q1", 20 * MB, "0"),
            (22.0, "Q3", 6 * MB, "-"),
        ]

    def test_compile_completion_times(self, throttled):
        _, report = throttled
        done = {task_id: compile_done_time(report, task_id) for task_id in TASKS}

        assert done == {
            "B1": 24.0,
            "B2": 15.0,
            "B3": 32.0,
            "B4": 36.0,
            "Q1": 34.0,
            "Q2": 30.0,
            "Q3": 38.0,
        }

    def test_q3_admitted_when_q2_finishes(self, throttled):
        _, report = throttled
        assert blocked_intervals(report, "Q3")[0][1] == compile_done_time(report, "Q2")

    def test_gateway_acquisitions(self, throttled):
        sim, _ = throttled
        acquisitions = [
            (r.time, r.task_id, r.tier) for r in sim.gateways.audit_log if r.action == "acquire"
        ]

        assert acquisitions == [
            (4.0, "B1", 0),
            (5.0, "B2", 0),
            (10.0, "B3", 0),
            (10.0, "B4", 0),
            (14.0, "B1", 1),
            (15.0, "Q1", 0),
            (24.0, "Q1", 1),
            (24.0, "Q2", 0),
            (29.0, "Q1", 2),
            (30.0, "Q3", 0),
            (35.0, "Q3", 1),
        ]

    def test_releases_highest_tier_first(self, throttled):
        sim, _ = throttled
        releases = [
            r.tier for r in sim.gateways.audit_log if r.action == "release" and r.task_id == "Q1"
        ]

        assert releases == [2, 1, 0]

    def test_held_tier_labels(self, throttled):
        _, report = throttled
        labels = {(r.time, r.task_id): r.held_tiers for r in report.trace}

        assert labels[(14.0, "B1")] == "01"
        assert labels[(29.0, "Q1")] == "012"
        assert labels[(35.0, "Q3")] == "01"

    def test_counters_and_outcomes(self, throttled):
        _, report = throttled

        assert report.gateway_counters == {
            "acquisitions": 11,
            "blocks": 4,
            "timeouts": 0,
            "best_plan_finalizations": 0,
        }
        assert report.completed == 7
        assert report.failed == 0

    def test_static_thresholds_sampled(self, throttled):
        _, report = throttled
        for sample in report.gateways:
            assert (sample.t2_bytes, sample.t3_bytes) == (20 * MB, 40 * MB)

    def test_all_memory_returned(self, throttled):
        sim, _ = throttled
        assert sim.ledger.usage("compilation") == 0
        assert sim.gateways.active_counts() == (0, 0, 0)


class TestUnthrottledTimeline:
    """The same arrivals with the gateways switched off."""

    def test_nothing_blocks(self, unthrottled):
        sim, report = unthrottled

        assert not any(r.state == "BLOCKED" for r in report.trace)
        assert all(r.held_tiers == "-" for r in report.trace)
        assert not [r for r in sim.gateways.audit_log if r.action == "acquire"]

    def test_compile_completion_times(self, unthrottled):
        _, report = unthrottled
        done = {task_id: compile_done_time(report, task_id) for task_id in TASKS}

        assert done == {
            "B1": 24.0,
            "B2": 15.0,
            "B3": 32.0,
            "B4": 36.0,
            "Q1": 25.0,
            "Q2": 19.0,
            "Q3": 30.0,
        }

    def test_thresholds_still_tracked(self, unthrottled):
        _, report = unthrottled
        assert report.gateways
        assert report.gateways[0].t2_bytes == 20 * MB
