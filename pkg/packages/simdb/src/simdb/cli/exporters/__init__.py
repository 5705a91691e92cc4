"""Report exporters for the simdb CLI.

- CSV: per-slice, per-sample and per-event tables
- JSON: summary, compare and sweep documents
"""

from __future__ import annotations

from typing import Any

from .base import BaseExporter
from .csv_exporter import CSVExporter
from .json_exporter import JSONExporter

__all__ = [
    "BaseExporter",
    "CSVExporter",
    "JSONExporter",
    "get_exporter",
]


def get_exporter(format: str, **kwargs: Any) -> BaseExporter:
    """Get exporter instance for specified format.

    Args:
        format: Export format name ("json", "csv")
        **kwargs: Format-specific options (passed to exporter __init__)

    Raises:
        ValueError: If format is not supported

    Example:
        >>> exporter = get_exporter("csv", columns=["time_s", "free"])
        >>> exporter.render([{"time_s": "0.000", "free": 10}])
        'time_s,free\\n0.000,10\\n'
    """
    exporters: dict[str, type[BaseExporter]] = {
        "json": JSONExporter,
        "csv": CSVExporter,
    }
    if format not in exporters:
        raise ValueError(
            f"Unsupported export format: {format}. Supported formats: {', '.join(exporters)}"
        )
    return exporters[format](**kwargs)
