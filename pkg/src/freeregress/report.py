"""
Verification Reports

Structured residuals for every checked identity, in a fixed order, with the
pass rule of each check.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)


@dataclass
class IdentityCheck:
    """
    One checked identity.

    Attributes:
        name: Identity name, stable across runs
        residuals: Series coefficients or a single scalar residual
        tolerance: Pass threshold
        expect_zero: False for negative controls, which pass when the residual
            reaches the tolerance instead
        note: Free-form remark carried into the report
    """

    name: str
    residuals: Sequence[float]
    tolerance: float
    expect_zero: bool = True
    note: Optional[str] = None

    def __post_init__(self):
        """Store residuals as plain floats."""
        self.residuals = tuple(float(abs(r)) for r in self.residuals)
        if not self.residuals:
            raise ValueError(f"Identity {self.name} has no residuals")

    @property
    def residual_max(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        value = self.residual_max
        if math.isnan(value):
            return False
        if self.expect_zero:
            return value <= self.tolerance
        return value >= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        entry = {"name": self.name, "residual_max": self.residual_max, "pass": self.passed}
        if self.note:
            entry["note"] = self.note
        return entry


@dataclass
class IdentityReport:
    """Ordered identity checks plus the parameters they ran with."""

    command: str
    params: Dict[str, Any]
    identities: List[IdentityCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    result: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def add(
        self,
        name: str,
        residuals: Iterable[float],
        tolerance: float,
        expect_zero: bool = True,
        note: Optional[str] = None,
    ) -> IdentityCheck:
        """Append a check; names must be unique within a report."""
        if any(check.name == name for check in self.identities):
            raise ValueError(f"Duplicate identity name: {name}")
        check = IdentityCheck(name, tuple(residuals), tolerance, expect_zero, note)
        self.identities.append(check)
        logger.debug(f"{self.command}: {name} residual {check.residual_max:.3e}")
        return check

    def add_scalar(self, name: str, residual: float, tolerance: float, **kwargs) -> IdentityCheck:
        return self.add(name, (residual,), tolerance, **kwargs)

    def extend(self, other: "IdentityReport", prefix: str = "") -> None:
        for check in other.identities:
            self.add(prefix + check.name, check.residuals, check.tolerance, check.expect_zero, check.note)
        self.notes.extend(other.notes)

    def __getitem__(self, name: str) -> IdentityCheck:
        for check in self.identities:
            if check.name == name:
                return check
        raise KeyError(name)

    def names(self) -> List[str]:
        return [check.name for check in self.identities]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.identities)

    def failures(self) -> List[IdentityCheck]:
        return [check for check in self.identities if not check.passed]

    def to_dict(self, wall_time_ms: float = 0.0) -> Dict[str, Any]:
        """The canonical JSON shape of a report."""
        data = {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "identities": [check.to_dict() for check in self.identities],
            "wall_time_ms": wall_time_ms,
        }
        if self.result:
            data["result"] = self.result
        if self.notes:
            data["notes"] = list(self.notes)
        return data
