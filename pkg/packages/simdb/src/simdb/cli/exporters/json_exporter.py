"""JSON exporter for summary, compare and sweep documents."""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any

from .base import BaseExporter


class JSONExporter(BaseExporter):
    """Export a document as JSON with sorted keys.

    Example output:
    {
      "format_version": 1,
      "throughput_ratio": 1.31
    }
    """

    def __init__(self, pretty: bool = True):
        """Initialize JSON exporter.

        Args:
            pretty: Indent with two spaces; compact single-line output otherwise
        """
        self.pretty = pretty

    def render(self, data: dict[str, Any]) -> str:
        indent = 2 if self.pretty else None
        return json.dumps(data, indent=indent, sort_keys=True, default=self._json_serializer) + "\n"

    def get_file_extension(self) -> str:
        return ".json"

    @staticmethod
    def _json_serializer(obj: Any) -> Any:
        """Serialize enums and paths that may appear in report documents."""
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Path):
            return str(obj)
        raise TypeError(f"Object of type {type(obj)} is not JSON serializable")
