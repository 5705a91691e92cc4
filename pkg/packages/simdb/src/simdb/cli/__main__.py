"""Allow running the CLI with ``python -m simdb.cli``."""

from .main import cli

if __name__ == "__main__":
    cli()
