"""Base exporter interface."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any


class BaseExporter(ABC):
    """Abstract base class for report exporters.

    Exporters turn report data into text; writing files is the handler's job.
    Output must be byte-identical for identical input.
    """

    @abstractmethod
    def render(self, data: Any) -> str:
        """Render report data as text.

        Args:
            data: Rows (list of dicts) for tabular formats, a document for JSON

        Returns:
            Formatted text, ending with a newline
        """

    @abstractmethod
    def get_file_extension(self) -> str:
        """Get recommended file extension for this format (e.g. ".csv")."""
