"""Tests for WaitForGraph cycle detection."""

import pytest
from simdb_governor import MB, CompilationTask, WaitForGraph
from simdb_governor.exceptions import CircularWaitError

pytestmark = pytest.mark.unit


class TestWaitForGraph:
    """Tests for WaitForGraph.assert_acyclic()."""

    def test_empty_graph(self):
        WaitForGraph().assert_acyclic()

    def test_chain_is_acyclic(self):
        graph = WaitForGraph()
        graph.add_wait("a", "b")
        graph.add_wait("b", "c")

        graph.assert_acyclic()
        assert graph.waits_on("a") == ["b"]
        assert graph.waits_on("c") == []

    def test_isolated_tasks(self):
        graph = WaitForGraph()
        graph.add_task("a")
        graph.add_task("b")

        graph.assert_acyclic()

    def test_two_task_cycle(self):
        graph = WaitForGraph()
        graph.add_wait("a", "b")
        graph.add_wait("b", "a")

        with pytest.raises(CircularWaitError) as exc_info:
            graph.assert_acyclic()
        assert "a" in str(exc_info.value)

    def test_cycle_behind_a_tail(self):
        graph = WaitForGraph()
        graph.add_wait("x", "a")
        graph.add_wait("a", "b")
        graph.add_wait("b", "c")
        graph.add_wait("c", "a")

        with pytest.raises(CircularWaitError):
            graph.assert_acyclic()

    def test_waiters_sorted(self):
        graph = WaitForGraph()
        graph.add_wait("q", "z")
        graph.add_wait("q", "b")

        assert graph.waits_on("q") == ["b", "z"]

    def test_gateway_queues_never_cycle(self, gateways):
        for i in range(6):
            gateways.on_allocation(CompilationTask(f"T{i}"), 6 * MB, i)

        graph = gateways.wait_for_graph()
        graph.assert_acyclic()
        assert graph.waits_on("T4") == ["T0", "T1", "T2", "T3"]
