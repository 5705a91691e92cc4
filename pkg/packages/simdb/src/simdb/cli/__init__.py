"""Command-line interface for simdb."""

from .main import cli

__all__ = ["cli"]
