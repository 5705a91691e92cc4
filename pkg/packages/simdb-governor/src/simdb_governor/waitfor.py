"""Wait-for graph over gateway resources."""

from __future__ import annotations

from collections import defaultdict, deque

from simdb_governor.exceptions import CircularWaitError


class WaitForGraph:
    """Directed graph: an edge ``waiter -> holder`` means waiter needs a slot holder owns."""

    def __init__(self):
        self._graph: dict[str, set[str]] = defaultdict(set)
        self._tasks: set[str] = set()

    def add_task(self, task_id: str) -> None:
        self._tasks.add(task_id)

    def add_wait(self, waiter: str, holder: str) -> None:
        """Record that ``waiter`` waits on a resource held by ``holder``."""
        self._tasks.add(waiter)
        self._tasks.add(holder)
        self._graph[waiter].add(holder)

    def waits_on(self, task_id: str) -> list[str]:
        return sorted(self._graph.get(task_id, set()))

    def assert_acyclic(self) -> None:
        """
        Check for cycles using Kahn's algorithm.

        Raises:
            CircularWaitError: If some set of tasks wait on each other
        """
        in_degree: dict[str, int] = dict.fromkeys(self._tasks, 0)
        reverse: dict[str, set[str]] = defaultdict(set)
        for waiter, holders in self._graph.items():
            in_degree[waiter] += len(holders)
            for holder in holders:
                reverse[holder].add(waiter)

        queue = deque(task for task, degree in in_degree.items() if degree == 0)
        visited = 0
        while queue:
            task = queue.popleft()
            visited += 1
            for waiter in reverse[task]:
                in_degree[waiter] -= 1
                if in_degree[waiter] == 0:
                    queue.append(waiter)

        if visited != len(self._tasks):
            stuck = {task for task, degree in in_degree.items() if degree > 0}
            raise CircularWaitError(stuck)
