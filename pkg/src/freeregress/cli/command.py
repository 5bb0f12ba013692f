"""
Command module for representing one batch run of the CLI.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from ..config import DEFAULT_SEED
from ..randmat.matrices import MIN_DIMENSION


class CommandType(Enum):
    """Subcommands of the front end."""
    DENSITY = "density"
    MOMENTS = "moments"
    CONVOLVE = "convolve"
    SOLVE = "solve"
    VERIFY = "verify"
    SIMULATE = "simulate"


class OutputFormat(Enum):
    """Report encodings."""
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


VERIFY_TARGETS = ("prop31", "prop32", "lemma33", "thm1", "thm2")

# Commands whose output is a table of (x, value) pairs
CSV_COMMANDS = (CommandType.DENSITY,)


@dataclass
class RunConfig:
    """
    Everything one run needs: what to compute, with which parameters, and
    where the report goes.

    Attributes:
        command: The subcommand
        parameters: Law or theorem parameters, keyed by name
        order: Truncation order or highest moment, when the command takes one
        dimension: Matrix dimension for simulate
        trials: Trial count for simulate
        seed: Monte Carlo seed
        output_format: Report encoding
        output_path: File to write, or None for stdout
        target: verify target
    """

    command: CommandType
    parameters: Dict[str, Any] = field(default_factory=dict)
    order: Optional[int] = None
    dimension: Optional[int] = None
    trials: Optional[int] = None
    seed: int = DEFAULT_SEED
    output_format: OutputFormat = OutputFormat.JSON
    output_path: Optional[Path] = None
    target: Optional[str] = None

    def __post_init__(self):
        """Validate the run before anything is computed."""
        self.command = CommandType(self.command)
        self.output_format = OutputFormat(self.output_format)
        if self.output_format == OutputFormat.CSV and self.command not in CSV_COMMANDS:
            raise ValueError(f"CSV output is only available for density tables, not {self.command.value}")
        if self.order is not None and self.order < 1:
            raise ValueError(f"Order must be at least 1, got {self.order}")
        if self.dimension is not None and self.dimension < MIN_DIMENSION:
            raise ValueError(f"Dimension must be at least {MIN_DIMENSION}, got {self.dimension}")
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"Need at least one trial, got {self.trials}")
        if self.command == CommandType.VERIFY and self.target not in VERIFY_TARGETS:
            raise ValueError(f"Unknown verify target {self.target!r}; expected one of {', '.join(VERIFY_TARGETS)}")
        if self.output_path is not None:
            self.output_path = Path(self.output_path)

    @property
    def name(self) -> str:
        if self.target:
            return f"{self.command.value} {self.target}"
        return self.command.value

    def __str__(self) -> str:
        """Return string representation of the run."""
        base = f"{self.name} ({self.output_format.value})"
        if self.parameters:
            params = " ".join(f"{k}={v}" for k, v in self.parameters.items())
            base += f" with parameters: {params}"
        return base
