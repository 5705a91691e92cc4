"""Modeled memory consumers: the data-page buffer pool and the plan cache."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from simdb.engine.ledger import MemoryLedger

BUFFER_POOL = "buffer_pool"
COMPILATION = "compilation"
EXECUTION = "execution"
PLAN_CACHE = "plan_cache"


def execution_duration(
    base_seconds: float, pool_bytes: int, demand_bytes: int, io_penalty_k: float
) -> float:
    """
    Execution time given how much of the active working set the pool holds.

    ``base * (1 + k * (1 - min(1, pool / demand)))``: a fully cached working
    set runs at base speed, an empty pool runs ``1 + k`` times slower. No
    demand means no penalty.

    Example:
        >>> execution_duration(100.0, 50, 100, 2.0)
        200.0
    """
    if demand_bytes <= 0:
        return base_seconds
    coverage = min(1.0, pool_bytes / demand_bytes)
    return base_seconds * (1 + io_penalty_k * (1 - coverage))


class _CacheModel:
    """Shared shrink/grow bookkeeping for a shrinkable ledger component."""

    component: str

    def __init__(self, ledger: MemoryLedger, floor_bytes: int):
        self.ledger = ledger
        self.floor_bytes = floor_bytes

    @property
    def usage_bytes(self) -> int:
        return self.ledger.usage(self.component)

    def reclaimable(self, target_bytes: int) -> int:
        """Bytes the component can give up without going below max(floor, target)."""
        return max(0, self.usage_bytes - max(self.floor_bytes, target_bytes))

    def shrink_to(self, target_bytes: int) -> int:
        """Shrink to max(floor, target); returns the bytes released."""
        excess = self.reclaimable(target_bytes)
        self.ledger.release(self.component, excess)
        return excess

    def shrink_by(self, nbytes: int, target_bytes: int) -> int:
        """Release up to ``nbytes`` without crossing max(floor, target)."""
        amount = min(nbytes, self.reclaimable(target_bytes))
        self.ledger.release(self.component, amount)
        return amount

    def fill_floor(self) -> None:
        """Claim the floor at startup."""
        missing = max(0, self.floor_bytes - self.usage_bytes)
        self.ledger.allocate(self.component, min(missing, self.ledger.free_bytes))


class BufferPoolModel(_CacheModel):
    """
    Data-page cache sized by demand.

    Demand is the aggregate working set of executing queries. The pool grows
    toward min(demand, target) from free memory when the broker allows it and
    never holds more than max(floor, demand).
    """

    component = BUFFER_POOL

    def __init__(self, ledger: MemoryLedger, floor_bytes: int, io_penalty_k: float):
        super().__init__(ledger, floor_bytes)
        self.io_penalty_k = io_penalty_k
        self.demand_bytes = 0

    def add_demand(self, working_set_bytes: int) -> None:
        self.demand_bytes += working_set_bytes

    def remove_demand(self, working_set_bytes: int) -> None:
        self.demand_bytes -= working_set_bytes
        cap = max(self.floor_bytes, self.demand_bytes)
        if self.usage_bytes > cap:
            self.ledger.release(self.component, self.usage_bytes - cap)

    def grow_toward(self, target_bytes: int) -> int:
        """Grow toward min(demand, target) using free memory; returns bytes added."""
        limit = min(self.demand_bytes, target_bytes)
        amount = min(max(0, limit - self.usage_bytes), self.ledger.free_bytes)
        self.ledger.allocate(self.component, amount)
        return amount

    def execution_duration(self, base_seconds: float) -> float:
        return execution_duration(
            base_seconds, self.usage_bytes, self.demand_bytes, self.io_penalty_k
        )


class PlanCacheModel(_CacheModel):
    """
    Compiled-plan cache.

    Hit probability is ``hit_rate_at_full * min(1, usage / working_size)``.
    """

    component = PLAN_CACHE

    def __init__(
        self,
        ledger: MemoryLedger,
        floor_bytes: int,
        hit_rate_at_full: float,
        working_size_bytes: int,
        plan_bytes: int,
    ):
        super().__init__(ledger, floor_bytes)
        self.hit_rate_at_full = hit_rate_at_full
        self.working_size_bytes = working_size_bytes
        self.plan_bytes = plan_bytes

    def hit_probability(self) -> float:
        if self.hit_rate_at_full <= 0 or self.working_size_bytes <= 0:
            return 0.0
        return self.hit_rate_at_full * min(1.0, self.usage_bytes / self.working_size_bytes)

    def insert(self, target_bytes: int) -> int:
        """Cache one compiled plan within min(working size, target), from free memory only."""
        room = min(self.working_size_bytes, target_bytes) - self.usage_bytes
        amount = max(0, min(self.plan_bytes, room, self.ledger.free_bytes))
        self.ledger.allocate(self.component, amount)
        return amount
