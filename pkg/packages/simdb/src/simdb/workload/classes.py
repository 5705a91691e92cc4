"""Query classes, client model and per-client random streams.

A workload is a weighted set of query classes. Each class describes its
population statistically: uniform compile and execution durations, a
log-uniform peak compile memory, uniform grant and working-set sizes, and a
growth shape that maps compile progress to a fraction of the peak.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

from simdb.exceptions import WorkloadValidationError
from simdb.models import QueryInstance

if TYPE_CHECKING:
    from collections.abc import Sequence


ValueRange = tuple[float, float]
ByteRange = tuple[int, int]

WEIGHT_TOLERANCE = 1e-9


class GrowthShape(str, Enum):
    """Piecewise-linear compile-memory profiles, normalized to the peak."""

    LINEAR = "LINEAR"
    FRONT_LOADED = "FRONT_LOADED"
    BACK_LOADED = "BACK_LOADED"

    def fraction(self, progress: Fraction) -> Fraction:
        """Fraction of peak memory held after ``progress`` of the compile work.

        Args:
            progress: Completed share of the work, in [0, 1]

        Returns:
            Exact fraction in [0, 1], non-decreasing in progress
        """
        knee = _KNEES.get(self)
        if knee is None:
            return progress
        knee_x, knee_y = knee
        if progress <= knee_x:
            return knee_y * progress / knee_x
        return knee_y + (1 - knee_y) * (progress - knee_x) / (1 - knee_x)


# (progress, fraction of peak) at the single bend of each non-linear shape
_KNEES: dict[GrowthShape, tuple[Fraction, Fraction]] = {
    GrowthShape.FRONT_LOADED: (Fraction(3, 10), Fraction(4, 5)),
    GrowthShape.BACK_LOADED: (Fraction(7, 10), Fraction(1, 5)),
}


def uniform(rng: random.Random, bounds: ValueRange) -> float:
    low, high = bounds
    if low == high:
        return low
    return rng.uniform(low, high)


def uniform_bytes(rng: random.Random, bounds: ByteRange) -> int:
    low, high = bounds
    if low == high:
        return low
    return rng.randint(low, high)


def log_uniform_bytes(rng: random.Random, bounds: ByteRange) -> int:
    """Sample bytes whose logarithm is uniform over the range."""
    low, high = bounds
    if low == high:
        return low
    value = math.exp(rng.uniform(math.log(low), math.log(high)))
    return min(max(int(value), low), high)


def _check_range(subject: str, field_name: str, bounds: Sequence[float], minimum: float) -> None:
    low, high = bounds
    if low > high:
        raise WorkloadValidationError(subject, f"{field_name} low {low} > high {high}")
    if low < minimum:
        raise WorkloadValidationError(subject, f"{field_name} must be >= {minimum}, got {low}")


@dataclass(frozen=True)
class QueryClass:
    """
    Statistical description of a query population.

    Attributes:
        name: Class name
        weight: Selection probability within its workload
        compile_seconds: Uniform range of compile work
        peak_compile_bytes: Log-uniform range of peak compile memory
        exec_seconds: Uniform range of base execution time
        exec_grant_bytes: Uniform range of the execution memory grant
        working_set_bytes: Uniform range of the pages an execution touches
        growth_shape: How compile memory approaches its peak
    """

    name: str
    weight: float
    compile_seconds: ValueRange
    peak_compile_bytes: ByteRange
    exec_seconds: ValueRange
    exec_grant_bytes: ByteRange
    working_set_bytes: ByteRange
    growth_shape: GrowthShape = GrowthShape.LINEAR

    def __post_init__(self) -> None:
        if not 0 < self.weight <= 1:
            raise WorkloadValidationError(self.name, f"weight must be in (0, 1], got {self.weight}")
        _check_range(self.name, "compile_seconds", self.compile_seconds, 0)
        _check_range(self.name, "exec_seconds", self.exec_seconds, 0)
        if self.compile_seconds[0] <= 0 or self.exec_seconds[0] <= 0:
            raise WorkloadValidationError(self.name, "durations must be > 0")
        _check_range(self.name, "peak_compile_bytes", self.peak_compile_bytes, 1)
        _check_range(self.name, "exec_grant_bytes", self.exec_grant_bytes, 0)
        _check_range(self.name, "working_set_bytes", self.working_set_bytes, 0)


@dataclass(frozen=True)
class Workload:
    """A named, weighted set of query classes plus the default think time."""

    name: str
    classes: tuple[QueryClass, ...]
    think_seconds: ValueRange = (0.0, 5.0)
    description: str = ""

    def __post_init__(self) -> None:
        if not self.classes:
            raise WorkloadValidationError(self.name, "at least one query class is required")
        total = math.fsum(c.weight for c in self.classes)
        if abs(total - 1) > WEIGHT_TOLERANCE:
            raise WorkloadValidationError(self.name, f"class weights sum to {total}, not 1")
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise WorkloadValidationError(self.name, "class names must be unique")
        _check_range(self.name, "think_seconds", self.think_seconds, 0)


@dataclass(frozen=True)
class ClientModel:
    """Closed-loop client population: each client has at most one query in flight."""

    client_count: int
    think_seconds: ValueRange = (0.0, 5.0)
    retry_on_failure: bool = True

    def __post_init__(self) -> None:
        if self.client_count < 1:
            raise WorkloadValidationError(
                "clients", f"need at least 1 client, got {self.client_count}"
            )
        _check_range("clients", "think_seconds", self.think_seconds, 0)


def derive_seed(master_seed: int, client: int, stream: str) -> int:
    """64-bit seed for one client's named stream, independent of every other stream."""
    digest = hashlib.sha256(f"{master_seed}:{client}:{stream}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class ClientStreams:
    """The three random streams a client draws from."""

    query: random.Random
    think: random.Random
    cache: random.Random

    @classmethod
    def for_client(cls, master_seed: int, client: int) -> ClientStreams:
        return cls(
            query=random.Random(derive_seed(master_seed, client, "query")),
            think=random.Random(derive_seed(master_seed, client, "think")),
            cache=random.Random(derive_seed(master_seed, client, "cache")),
        )


def choose_class(workload: Workload, rng: random.Random) -> QueryClass:
    """Pick a class by weight with a single draw."""
    draw = rng.random()
    cumulative = 0.0
    for query_class in workload.classes:
        cumulative += query_class.weight
        if draw < cumulative:
            return query_class
    return workload.classes[-1]


def next_query(
    workload: Workload,
    client: int,
    rng: random.Random,
    *,
    query_id: str,
    submit_time: float,
    attempt_count: int = 1,
) -> QueryInstance:
    """Sample the client's next query instance.

    Every stochastic field comes from ``rng`` in a fixed order (class, compile
    time, peak memory, execution time, grant, working set), so the sequence is
    a pure function of the stream's seed.

    Args:
        workload: Workload to sample from
        client: Client index
        rng: The client's query stream
        query_id: Identifier for the new instance
        submit_time: Simulated submission time
        attempt_count: 1 for a fresh query, higher for resubmissions

    Returns:
        A QUEUED query instance
    """
    query_class = choose_class(workload, rng)
    return QueryInstance(
        query_id=query_id,
        client=client,
        query_class=query_class.name,
        growth_shape=query_class.growth_shape,
        compile_seconds=uniform(rng, query_class.compile_seconds),
        peak_compile_bytes=log_uniform_bytes(rng, query_class.peak_compile_bytes),
        exec_seconds=uniform(rng, query_class.exec_seconds),
        exec_grant_bytes=uniform_bytes(rng, query_class.exec_grant_bytes),
        working_set_bytes=uniform_bytes(rng, query_class.working_set_bytes),
        submit_time=submit_time,
        attempt_count=attempt_count,
    )


def think_time(clients: ClientModel, rng: random.Random) -> float:
    return uniform(rng, clients.think_seconds)
