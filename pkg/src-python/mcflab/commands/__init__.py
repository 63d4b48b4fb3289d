"""Command handlers for the mcflab CLI."""

from .oracle_commands import register_oracle_commands
from .run_commands import register_run_commands
from .verify_commands import register_verify_commands

__all__ = [
    'register_oracle_commands',
    'register_run_commands',
    'register_verify_commands',
]
