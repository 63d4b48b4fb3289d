"""Command-line entry point."""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .commands import register_oracle_commands, register_run_commands, register_verify_commands


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcflab", description="Numerical laboratory for mean curvature flow"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_run_commands(subparsers)
    register_verify_commands(subparsers)
    register_oracle_commands(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run the mcflab CLI."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    return args.handler(args)
