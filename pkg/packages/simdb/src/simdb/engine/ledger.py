"""Global memory ledger."""

from __future__ import annotations

from collections.abc import Callable, Iterable

from simdb.exceptions import LedgerError

UsageObserver = Callable[[str, int], None]


class MemoryLedger:
    """
    Byte-exact account of physical memory.

    Every allocation and release of every component goes through the ledger,
    which keeps ``free = physical - sum(usage)`` and reports each change to
    an optional observer (the engine mirrors it to the broker).
    """

    def __init__(
        self,
        physical_bytes: int,
        components: Iterable[str],
        observer: UsageObserver | None = None,
    ):
        self.physical_bytes = physical_bytes
        self._usage: dict[str, int] = dict.fromkeys(components, 0)
        self._free = physical_bytes
        self._observer = observer

    @property
    def free_bytes(self) -> int:
        return self._free

    @property
    def components(self) -> list[str]:
        return list(self._usage)

    def usage(self, component: str) -> int:
        return self._usage[component]

    def allocate(self, component: str, nbytes: int) -> None:
        """Move ``nbytes`` from free memory to ``component``.

        Raises:
            LedgerError: If free memory is short or nbytes is negative
        """
        if nbytes < 0 or nbytes > self._free:
            raise LedgerError(component, "allocate", nbytes, self._free)
        if nbytes == 0:
            return
        self._usage[component] += nbytes
        self._free -= nbytes
        self._notify(component)

    def release(self, component: str, nbytes: int) -> None:
        """Return ``nbytes`` of ``component`` to free memory.

        Raises:
            LedgerError: If the component holds less than nbytes
        """
        held = self._usage[component]
        if nbytes < 0 or nbytes > held:
            raise LedgerError(component, "release", nbytes, held)
        if nbytes == 0:
            return
        self._usage[component] = held - nbytes
        self._free += nbytes
        self._notify(component)

    def check_conservation(self) -> str | None:
        """Describe a conservation violation, or return None when the books balance."""
        total = sum(self._usage.values())
        if self._free < 0:
            return f"free memory is negative ({self._free})"
        if total + self._free != self.physical_bytes:
            return f"usage {total} + free {self._free} != physical {self.physical_bytes}"
        for component, used in self._usage.items():
            if used < 0:
                return f"{component} usage is negative ({used})"
        return None

    def snapshot(self) -> dict[str, int]:
        """Usage per component plus ``free``, in registration order."""
        return {**self._usage, "free": self._free}

    def _notify(self, component: str) -> None:
        if self._observer is not None:
            self._observer(component, self._usage[component])
