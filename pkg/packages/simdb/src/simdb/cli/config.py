"""User preferences for the simdb CLI."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

import yaml

PREFERENCES_FILE = ".simdb.yaml"
DEFAULT_OUT_DIR = "simdb-out"


class Config:
    """Preferences for the simdb CLI.

    Priority (highest to lowest):
    1. Command-line arguments
    2. Environment variables (SIMDB_OUT)
    3. User preferences (~/.simdb.yaml)
    4. Project preferences (.simdb.yaml in current directory)
    5. Defaults

    Preferences only supply CLI defaults (output directory, seed, quiet);
    scenario settings live in scenario files.
    """

    def __init__(self, data: dict[str, Any] | None = None):
        self.data = data or {}

    @classmethod
    def load(cls) -> Config:
        """Load preferences from files and environment."""
        data: dict[str, Any] = {}

        for path in (Path.cwd() / PREFERENCES_FILE, Path.home() / PREFERENCES_FILE):
            if path.exists():
                loaded = cls._load_yaml_file(path)
                if loaded:
                    data.update(loaded)

        if "SIMDB_OUT" in os.environ:
            data["out"] = os.environ["SIMDB_OUT"]

        return cls(data)

    @staticmethod
    def _load_yaml_file(path: Path) -> dict[str, Any] | None:
        try:
            with path.open() as f:
                data = yaml.safe_load(f)
                return data if isinstance(data, dict) else {}
        except (OSError, yaml.YAMLError):
            # Broken preference files are ignored
            return None

    def get(self, key: str, default: Any = None) -> Any:
        return self.data.get(key, default)

    def get_out_dir(self) -> Path:
        """Output directory (default: ./simdb-out)."""
        return Path(self.get("out", DEFAULT_OUT_DIR))

    def get_seed(self) -> int | None:
        """Seed replacing the scenario's workload seed, if configured."""
        seed = self.get("seed")
        return int(seed) if seed is not None else None

    def get_quiet(self) -> bool:
        return bool(self.get("quiet", False))

    def to_dict(self) -> dict[str, Any]:
        return self.data.copy()


def load_config() -> Config:
    """Load preferences from all sources."""
    return Config.load()
