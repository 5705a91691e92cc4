"""Workload preset registry."""

from __future__ import annotations

from collections.abc import Callable

from simdb_governor import MB

from simdb.exceptions import UnknownPresetError
from simdb.workload.classes import GrowthShape, QueryClass, Workload

PresetFactory = Callable[[], Workload]


class PresetRegistry:
    """Registry of named workload factories."""

    def __init__(self):
        self._presets: dict[str, PresetFactory] = {}

    def register(self, name: str, factory: PresetFactory) -> None:
        """
        Register a workload preset.

        Args:
            name: Preset name (used as workload.preset in scenario files)
            factory: Zero-argument callable returning the Workload
        """
        if not callable(factory):
            raise TypeError(f"Preset factory for '{name}' must be callable")
        self._presets[name] = factory

    def get(self, name: str) -> Workload:
        """
        Build a registered preset.

        Raises:
            UnknownPresetError: If no preset has this name
        """
        factory = self._presets.get(name)
        if factory is None:
            raise UnknownPresetError(name, self.list_presets())
        return factory()

    def list_presets(self) -> list[str]:
        return sorted(self._presets)

    def __contains__(self, name: object) -> bool:
        return name in self._presets


def sales_default() -> Workload:
    """
    SALES-like ad hoc reporting workload.

    Complex queries compile for 10-90 s and execute for 30 s to 10 min. Peak
    compile memory is log-uniform over [512 MB, 3 GB] (median about 1.2 GB):
    only a handful of the 30 clients compile at any moment, and four or five
    of them already exceed the 4 GB of the canonical machine. Grants of
    64-256 MB make execution memory the limit once the gateways hold
    compilation back, so adding clients past 30 only adds queueing.
    Every instance is cache-unique.
    """
    return Workload(
        name="sales_default",
        description="SALES-like ad hoc reporting (compile 10-90 s, execute 30-600 s)",
        think_seconds=(0.0, 5.0),
        classes=(
            QueryClass(
                name="sales_report",
                weight=1.0,
                compile_seconds=(10.0, 90.0),
                peak_compile_bytes=(512 * MB, 3072 * MB),
                exec_seconds=(30.0, 600.0),
                exec_grant_bytes=(64 * MB, 256 * MB),
                working_set_bytes=(64 * MB, 256 * MB),
                growth_shape=GrowthShape.LINEAR,
            ),
        ),
    )


def light_adhoc() -> Workload:
    """Small diagnostic-style queries whose compile memory stays below the first gateway."""
    return Workload(
        name="light_adhoc",
        description="Small queries (peak compile memory 1-4 MB); never engages the gateways",
        think_seconds=(0.0, 5.0),
        classes=(
            QueryClass(
                name="lookup",
                weight=0.7,
                compile_seconds=(1.0, 5.0),
                peak_compile_bytes=(1 * MB, 4 * MB),
                exec_seconds=(2.0, 20.0),
                exec_grant_bytes=(1 * MB, 4 * MB),
                working_set_bytes=(4 * MB, 16 * MB),
            ),
            QueryClass(
                name="summary",
                weight=0.3,
                compile_seconds=(2.0, 8.0),
                peak_compile_bytes=(2 * MB, 4 * MB),
                exec_seconds=(5.0, 40.0),
                exec_grant_bytes=(2 * MB, 8 * MB),
                working_set_bytes=(8 * MB, 32 * MB),
                growth_shape=GrowthShape.FRONT_LOADED,
            ),
        ),
    )


def mixed_adhoc() -> Workload:
    """Mostly mid-sized compiles with a heavy tail, exercising all three growth shapes."""
    return Workload(
        name="mixed_adhoc",
        description="Mixed ad hoc queries across all gateway tiers",
        think_seconds=(0.0, 10.0),
        classes=(
            QueryClass(
                name="small",
                weight=0.5,
                compile_seconds=(2.0, 10.0),
                peak_compile_bytes=(2 * MB, 16 * MB),
                exec_seconds=(5.0, 60.0),
                exec_grant_bytes=(8 * MB, 32 * MB),
                working_set_bytes=(16 * MB, 64 * MB),
                growth_shape=GrowthShape.FRONT_LOADED,
            ),
            QueryClass(
                name="medium",
                weight=0.35,
                compile_seconds=(10.0, 40.0),
                peak_compile_bytes=(32 * MB, 256 * MB),
                exec_seconds=(30.0, 300.0),
                exec_grant_bytes=(32 * MB, 96 * MB),
                working_set_bytes=(64 * MB, 192 * MB),
            ),
            QueryClass(
                name="large",
                weight=0.15,
                compile_seconds=(40.0, 120.0),
                peak_compile_bytes=(256 * MB, 1024 * MB),
                exec_seconds=(60.0, 600.0),
                exec_grant_bytes=(64 * MB, 256 * MB),
                working_set_bytes=(128 * MB, 512 * MB),
                growth_shape=GrowthShape.BACK_LOADED,
            ),
        ),
    )


# Global registry instance
_registry = PresetRegistry()
_registry.register("sales_default", sales_default)
_registry.register("light_adhoc", light_adhoc)
_registry.register("mixed_adhoc", mixed_adhoc)


def register_preset(name: str, factory: PresetFactory) -> None:
    """
    Register a custom workload preset (user-facing API).

    Example:
        >>> from simdb.workload import QueryClass, Workload, register_preset
        >>> register_preset("tiny", lambda: Workload("tiny", (QueryClass(...),)))
    """
    _registry.register(name, factory)


def get_preset(name: str) -> Workload:
    return _registry.get(name)


def list_presets() -> list[str]:
    return _registry.list_presets()


def has_preset(name: str) -> bool:
    return name in _registry
