"""
CLI Module

This module provides the batch command-line front end.
"""

from .app import main
from .command import CommandType, OutputFormat, RunConfig

__all__ = ["main", "CommandType", "OutputFormat", "RunConfig"]
