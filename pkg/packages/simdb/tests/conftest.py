"""Pytest configuration and shared fixtures."""

import json
from pathlib import Path
from typing import Any

import pytest
from click.testing import CliRunner
from simdb.config import ScenarioConfig, build_config


def small_document(**engine: Any) -> dict[str, Any]:
    """A 1 GB, 2-CPU scenario with a handful of mixed_adhoc clients and no warm-up."""
    return {
        "physical_bytes": "1GB",
        "cpu_count": 2,
        "engine": {
            "warmup_seconds": 0,
            "duration_seconds": 300,
            "slice_seconds": 30,
            "floors": {"buffer_pool": "64MB", "compilation": "128MB"},
            **engine,
        },
        "workload": {"preset": "mixed_adhoc", "clients": 4, "seed": 11},
    }


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Short, small scenario that runs in well under a second."""
    return build_config(small_document())


@pytest.fixture
def pressure_config() -> ScenarioConfig:
    """1 GB machine, 64 MB pool floor, 256 MB compilation floor, one client."""
    return build_config(
        {
            "physical_bytes": "1GB",
            "cpu_count": 1,
            "engine": {
                "warmup_seconds": 0,
                "duration_seconds": 60,
                "floors": {"buffer_pool": "64MB", "compilation": "256MB"},
            },
            "workload": {"clients": 1},
        }
    )


@pytest.fixture
def scenario_file(tmp_path: Path) -> Path:
    """JSON scenario file for the small scenario."""
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_document(duration_seconds=120)))
    return path


@pytest.fixture
def runner(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> CliRunner:
    """CLI runner isolated from user preference files and SIMDB_OUT."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv("SIMDB_OUT", raising=False)
    return CliRunner()
