"""Command-line entry point: ``smrep <command> ...``."""

from smrep.cli.commands import build_parser, main, run

__all__ = ["build_parser", "main", "run"]
