"""
Scenario configuration.

A scenario file is a JSON (or YAML) document validated by ScenarioConfig.
Unknown keys are rejected at every level. Byte-valued fields take integers or
strings with a B/KB/MB/GB suffix (powers of 1024); times are seconds.

Example:
    >>> config = load_scenario(Path("sales30.json"), ["throttling=off"])
    >>> config.workload.clients
    30
"""

from __future__ import annotations

import copy
import json
import math
import re
from decimal import Decimal
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any

import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from simdb_governor import GB, KB, MB, BrokerConfig, GatewayPolicy

from simdb.exceptions import ConfigLoadError, WorkloadValidationError
from simdb.workload.classes import ClientModel, GrowthShape, QueryClass, Workload
from simdb.workload.presets import get_preset, has_preset, list_presets

if TYPE_CHECKING:
    from collections.abc import Iterable

    from pydantic import ValidationError

DEFAULT_PRESET = "sales_default"
COMPONENTS = ("buffer_pool", "compilation", "execution", "plan_cache")

_BYTE_UNITS = {"B": 1, "KB": KB, "MB": MB, "GB": GB}
_BYTES_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([KMG]?B)?\s*$", re.IGNORECASE)


def parse_bytes(value: Any) -> Any:
    """Turn ``512MB``/``4 GB``/``1.5KB``/``1024`` into a byte count (floored).

    Values of other types are passed through for pydantic to reject.
    """
    if isinstance(value, bool):
        raise ValueError("expected a byte size, got a boolean")
    if isinstance(value, float) and math.isfinite(value):
        return math.floor(value)
    if isinstance(value, str):
        match = _BYTES_RE.match(value)
        if match is None:
            raise ValueError(f"invalid byte size '{value}' (expected e.g. 4096, 512MB, 4GB)")
        number, unit = match.groups()
        return int(Decimal(number) * _BYTE_UNITS[(unit or "B").upper()])
    return value


def parse_switch(value: Any) -> Any:
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in {"on", "true", "yes"}:
            return True
        if lowered in {"off", "false", "no"}:
            return False
    return value


Bytes = Annotated[int, BeforeValidator(parse_bytes), Field(ge=0)]
PositiveBytes = Annotated[int, BeforeValidator(parse_bytes), Field(gt=0)]
Switch = Annotated[bool, BeforeValidator(parse_switch)]
Seconds = Annotated[float, Field(ge=0)]
PositiveSeconds = Annotated[float, Field(gt=0)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BrokerSettings(_Section):
    """Memory broker cadence and prediction settings."""

    tick_seconds: PositiveSeconds = 1.0
    window: int = Field(16, ge=2)
    horizon_seconds: Seconds = 1.0
    slack_fraction: float = Field(0.05, ge=0, lt=1)
    low_water: float = Field(0.9, gt=0, lt=1)


class GatewaySettings(_Section):
    """Gateway thresholds, fractions and timeouts."""

    t1_bytes: Bytes = 5 * MB
    small_fraction: float = Field(0.5, gt=0, lt=1)
    medium_fraction: float = Field(0.35, gt=0, lt=1)
    timeouts: tuple[PositiveSeconds, PositiveSeconds, PositiveSeconds] = (60.0, 180.0, 600.0)
    best_plan_min_progress: float = Field(0.25, ge=0, le=1)
    finalize_seconds: Seconds = 2.0
    dynamic_thresholds: bool = True
    static_t2_bytes: Bytes | None = None
    static_t3_bytes: Bytes | None = None

    @model_validator(mode="after")
    def _check_policy(self) -> GatewaySettings:
        if self.small_fraction + self.medium_fraction >= 1:
            raise ValueError("small_fraction + medium_fraction must be < 1")
        first, second, third = self.timeouts
        if not first < second < third:
            raise ValueError(f"timeouts must be strictly increasing, got {list(self.timeouts)}")
        if not self.dynamic_thresholds:
            if self.static_t2_bytes is None or self.static_t3_bytes is None:
                raise ValueError("static_t2_bytes and static_t3_bytes are required when "
                                 "dynamic_thresholds is false")
            if not self.t1_bytes < self.static_t2_bytes < self.static_t3_bytes:
                raise ValueError("static thresholds must satisfy t1 < t2 < t3")
        return self

    def to_policy(self, cpu_count: int) -> GatewayPolicy:
        return GatewayPolicy(
            cpu_count=cpu_count,
            t1_bytes=self.t1_bytes,
            small_fraction=self.small_fraction,
            medium_fraction=self.medium_fraction,
            timeouts=self.timeouts,
            best_plan_min_progress=self.best_plan_min_progress,
            dynamic_thresholds=self.dynamic_thresholds,
            static_t2_bytes=self.static_t2_bytes,
            static_t3_bytes=self.static_t3_bytes,
        )


class FloorSettings(_Section):
    """Per-component memory floors."""

    buffer_pool: Bytes = 256 * MB
    compilation: Bytes = 512 * MB
    execution: Bytes = 0
    plan_cache: Bytes = 0

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in COMPONENTS}


class EngineSettings(_Section):
    """Simulator timing, subcomponent and metrics settings."""

    step_seconds: PositiveSeconds = 1.0
    io_penalty_k: float = Field(2.0, ge=0)
    floors: FloorSettings = Field(default_factory=FloorSettings)
    retry_delay_seconds: Seconds = 5.0
    grant_backoff_initial_seconds: PositiveSeconds = 1.0
    grant_backoff_max_seconds: PositiveSeconds = 60.0
    grant_timeout_seconds: Seconds = 120.0
    plan_bytes: Bytes = 1 * MB
    plan_cache_hit_rate: float = Field(0.0, ge=0, le=1)
    plan_cache_working_bytes: Bytes = 64 * MB
    warmup_seconds: Seconds = 600.0
    duration_seconds: PositiveSeconds = 3600.0
    slice_seconds: PositiveSeconds = 30.0

    @model_validator(mode="after")
    def _check_timing(self) -> EngineSettings:
        if self.duration_seconds <= self.warmup_seconds:
            raise ValueError(
                f"duration_seconds ({self.duration_seconds}) must exceed "
                f"warmup_seconds ({self.warmup_seconds})"
            )
        if self.grant_backoff_max_seconds < self.grant_backoff_initial_seconds:
            raise ValueError("grant_backoff_max_seconds must be >= grant_backoff_initial_seconds")
        return self


class QueryClassSettings(_Section):
    """Inline query class definition."""

    name: str
    weight: float = Field(gt=0, le=1)
    compile_seconds: tuple[PositiveSeconds, PositiveSeconds]
    peak_compile_bytes: tuple[PositiveBytes, PositiveBytes]
    exec_seconds: tuple[PositiveSeconds, PositiveSeconds]
    exec_grant_bytes: tuple[Bytes, Bytes]
    working_set_bytes: tuple[Bytes, Bytes]
    growth_shape: GrowthShape = GrowthShape.LINEAR

    def to_query_class(self) -> QueryClass:
        return QueryClass(
            name=self.name,
            weight=self.weight,
            compile_seconds=self.compile_seconds,
            peak_compile_bytes=self.peak_compile_bytes,
            exec_seconds=self.exec_seconds,
            exec_grant_bytes=self.exec_grant_bytes,
            working_set_bytes=self.working_set_bytes,
            growth_shape=self.growth_shape,
        )


class WorkloadSettings(_Section):
    """Workload: a registered preset or inline classes, plus the client population.

    Leaving both ``preset`` and ``classes`` out selects ``sales_default``.
    A think-time range left out is taken from the preset.
    """

    preset: str | None = None
    classes: list[QueryClassSettings] | None = None
    clients: int = Field(30, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    think_seconds: tuple[Seconds, Seconds] | None = None
    retry_on_failure: bool = True

    @model_validator(mode="after")
    def _resolve(self) -> WorkloadSettings:
        if self.classes is not None and self.preset is not None:
            raise ValueError("give either preset or classes, not both")
        if self.classes is None:
            name = self.preset or DEFAULT_PRESET
            if not has_preset(name):
                raise ValueError(
                    f"unknown workload preset '{name}' (available: {', '.join(list_presets())})"
                )
            self.preset = name
        try:
            workload = self.build_workload()
            if self.think_seconds is None:
                self.think_seconds = workload.think_seconds
            self.client_model()
        except WorkloadValidationError as e:
            raise ValueError(f"{e.subject}: {e.reason}") from e
        return self

    def build_workload(self) -> Workload:
        if self.classes is None:
            return get_preset(self.preset or DEFAULT_PRESET)
        return Workload(
            name="custom",
            classes=tuple(c.to_query_class() for c in self.classes),
            think_seconds=self.think_seconds or (0.0, 5.0),
        )

    def client_model(self) -> ClientModel:
        return ClientModel(
            client_count=self.clients,
            think_seconds=self.think_seconds or (0.0, 5.0),
            retry_on_failure=self.retry_on_failure,
        )


class ScenarioConfig(_Section):
    """
    Complete scenario: machine, broker, gateways, engine, workload, throttling switch.

    Defaults describe the canonical scenario: a 4 GB, 8-CPU server running
    the sales_default workload with 30 clients for one simulated hour after a
    ten-minute warm-up.
    """

    physical_bytes: PositiveBytes = 4 * GB
    cpu_count: int = Field(8, ge=1)
    throttling: Switch = True
    broker: BrokerSettings = Field(default_factory=BrokerSettings)
    gateways: GatewaySettings = Field(default_factory=GatewaySettings)
    engine: EngineSettings = Field(default_factory=EngineSettings)
    workload: WorkloadSettings = Field(default_factory=WorkloadSettings)

    @model_validator(mode="after")
    def _check_floors(self) -> ScenarioConfig:
        floors = sum(self.engine.floors.as_dict().values())
        if floors >= self.physical_bytes:
            raise ValueError(
                f"component floors ({floors} bytes) must be below physical_bytes "
                f"({self.physical_bytes})"
            )
        return self

    def broker_config(self) -> BrokerConfig:
        return BrokerConfig(
            physical_bytes=self.physical_bytes,
            slack_fraction=self.broker.slack_fraction,
            window=self.broker.window,
            horizon=self.broker.horizon_seconds,
            low_water=self.broker.low_water,
        )

    def gateway_policy(self) -> GatewayPolicy:
        return self.gateways.to_policy(self.cpu_count)

    def resolved(self) -> dict[str, Any]:
        """Fully resolved configuration as plain JSON data."""
        return self.model_dump(mode="json")


def read_document(path: Path) -> dict[str, Any]:
    """
    Read a scenario file into a raw mapping.

    ``.yaml``/``.yml`` files are parsed as YAML, everything else as JSON.

    Raises:
        ConfigLoadError: Unreadable file, syntax error (with line and column),
            or a top level that is not a mapping
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigLoadError(str(path), f"cannot read file ({e.strerror or e})") from e

    if path.suffix.lower() in {".yaml", ".yml"}:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ConfigLoadError(
                str(path),
                f"invalid YAML: {getattr(e, 'problem', None) or e}",
                line=mark.line + 1 if mark is not None else None,
                column=mark.column + 1 if mark is not None else None,
            ) from e
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigLoadError(str(path), f"invalid JSON: {e.msg}", e.lineno, e.colno) from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigLoadError(str(path), "top level must be a mapping of settings")
    return data


def apply_overrides(document: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """
    Apply ``KEY=VALUE`` overrides to a raw document.

    KEY is a dotted path (``engine.warmup_seconds``); missing sections are
    created. VALUE is parsed as YAML, so ``off``, ``30``, ``0.1`` and
    ``[60, 120, 300]`` get their natural types and ``512MB`` stays a string.

    Returns:
        A new document; the input is not modified

    Raises:
        ConfigLoadError: Malformed override or a path through a non-section
    """
    result = copy.deepcopy(document)
    for item in overrides:
        key, separator, raw = item.partition("=")
        key = key.strip()
        if not separator or not key:
            raise ConfigLoadError("--override", f"expected KEY=VALUE, got '{item}'")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw

        parts = key.split(".")
        node = result
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigLoadError("--override", f"'{part}' in '{key}' is not a section")
            node = child
        node[parts[-1]] = value
    return result


def build_config(document: dict[str, Any]) -> ScenarioConfig:
    """Validate a raw document (raises pydantic.ValidationError)."""
    return ScenarioConfig.model_validate(document)


def load_scenario(path: Path | None = None, overrides: Iterable[str] = ()) -> ScenarioConfig:
    """Read, override and validate a scenario; no path means the canonical defaults."""
    document = read_document(path) if path is not None else {}
    return build_config(apply_overrides(document, overrides))


def validation_messages(error: ValidationError) -> list[str]:
    """One ``field.path: message`` line per validation failure."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "(root)"
        lines.append(f"{location}: {item['msg']}")
    return lines
