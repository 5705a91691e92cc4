"""CSV exporter for slice, sample and trace tables."""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from typing import Any

from .base import BaseExporter


class CSVExporter(BaseExporter):
    """Export rows as CSV with a fixed column order.

    Example output:
    slice_start_s,completed,completed_degraded,failed_oom,failed_timeout
    600.000,12,1,3,0
    """

    def __init__(self, columns: Sequence[str], delimiter: str = ","):
        """Initialize CSV exporter.

        Args:
            columns: Column names, in output order; the header is always written
            delimiter: Field separator
        """
        self.columns = list(columns)
        self.delimiter = delimiter

    def render(self, data: list[dict[str, Any]]) -> str:
        output = io.StringIO()
        writer = csv.DictWriter(
            output,
            fieldnames=self.columns,
            delimiter=self.delimiter,
            lineterminator="\n",
            extrasaction="raise",
        )
        writer.writeheader()
        writer.writerows(data)
        return output.getvalue()

    def get_file_extension(self) -> str:
        return ".csv"
