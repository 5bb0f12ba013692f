"""
Truncated Power Series

Finite-order formal power series over exact rationals (fractions.Fraction) or
float64. These carry every generating function of the package: moment series,
r- and S-transforms, and the auxiliary functions of the regression proofs.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import SERIES_CONFIG
from ..errors import (
    DivisionByZeroConstantTerm,
    NonzeroConstantInnerTerm,
    NotInvertible,
    OrderTooLow,
    ScalarKindMismatch,
)

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]


class ScalarKind(Enum):
    """The two scalar fields a series can live over."""
    RATIONAL = "rational"
    FLOAT = "float"


def scalar_kind(value) -> Optional[ScalarKind]:
    """
    Classify a scalar.

    Returns:
        ScalarKind.RATIONAL for Fraction, ScalarKind.FLOAT for floats and
        None for plain integers, which fit either kind
    """
    if isinstance(value, bool):
        raise TypeError("Booleans are not scalars")
    if isinstance(value, Integral):
        return None
    if isinstance(value, Rational):
        return ScalarKind.RATIONAL
    if isinstance(value, (Real, np.floating)):
        return ScalarKind.FLOAT
    raise TypeError(f"Unsupported scalar type: {type(value).__name__}")


def infer_kind(values: Iterable, kind: Optional[ScalarKind] = None) -> ScalarKind:
    """
    Infer the common scalar kind of a collection, rejecting mixtures.

    Args:
        values: Scalars to inspect
        kind: Kind requested by the caller, if any

    Returns:
        The common kind; integers alone default to rational
    """
    found = kind
    for value in values:
        current = scalar_kind(value)
        if current is None:
            continue
        if found is None:
            found = current
        elif found != current:
            raise ScalarKindMismatch(
                f"Cannot mix {found.value} and {current.value} scalars"
            )
    return found or ScalarKind.RATIONAL


def coerce_scalar(value, kind: ScalarKind) -> Scalar:
    """Convert an integer or same-kind scalar to the requested kind."""
    current = scalar_kind(value)
    if current is not None and current != kind:
        raise ScalarKindMismatch(
            f"Expected a {kind.value} scalar, got {current.value}"
        )
    if kind == ScalarKind.RATIONAL:
        return Fraction(value)
    result = float(value)
    if not math.isfinite(result):
        raise ValueError(f"Float coefficients must be finite, got {result}")
    return result


@dataclass(frozen=True)
class TruncatedSeries:
    """
    Power series c_0 + c_1 z + ... + c_N z^N known up to z^N inclusive.

    Attributes:
        coeffs: Coefficients c_0..c_N, all of one scalar kind
        kind: Scalar field of the coefficients
    """

    coeffs: Tuple[Scalar, ...]
    kind: ScalarKind

    def __post_init__(self):
        """Validate length and scalar kind of the coefficients."""
        if len(self.coeffs) == 0:
            raise ValueError("A truncated series needs at least one coefficient")
        object.__setattr__(
            self, "coeffs", tuple(coerce_scalar(c, self.kind) for c in self.coeffs)
        )

    # Construction

    @classmethod
    def from_coeffs(
        cls,
        coeffs: Sequence,
        order: Optional[int] = None,
        kind: Optional[ScalarKind] = None,
    ) -> "TruncatedSeries":
        """
        Build a series from coefficients, padding or truncating to an order.

        Args:
            coeffs: Leading coefficients c_0, c_1, ...
            order: Truncation degree; defaults to len(coeffs) - 1
            kind: Scalar kind; inferred from the coefficients if omitted

        Returns:
            The truncated series
        """
        coeffs = list(coeffs)
        kind = infer_kind(coeffs, kind)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError(f"Order must be nonnegative, got {order}")
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs), kind)

    @classmethod
    def zero(cls, order: int, kind: ScalarKind = ScalarKind.RATIONAL) -> "TruncatedSeries":
        return cls.from_coeffs([0], order, kind)

    @classmethod
    def one(cls, order: int, kind: ScalarKind = ScalarKind.RATIONAL) -> "TruncatedSeries":
        return cls.from_coeffs([1], order, kind)

    @classmethod
    def variable(cls, order: int, kind: ScalarKind = ScalarKind.RATIONAL) -> "TruncatedSeries":
        """The series z."""
        return cls.from_coeffs([0, 1], order, kind)

    @classmethod
    def constant(cls, value, order: int, kind: Optional[ScalarKind] = None) -> "TruncatedSeries":
        return cls.from_coeffs([value], order, kind)

    @classmethod
    def geometric(
        cls,
        scale,
        ratio,
        order: int,
        kind: Optional[ScalarKind] = None,
    ) -> "TruncatedSeries":
        """The expansion of scale / (1 - ratio z)."""
        kind = infer_kind([scale, ratio], kind)
        scale = coerce_scalar(scale, kind)
        ratio = coerce_scalar(ratio, kind)
        coeffs = []
        term = scale
        for _ in range(order + 1):
            coeffs.append(term)
            term = term * ratio
        return cls(tuple(coeffs), kind)

    # Basic access

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, index: int) -> Scalar:
        if index < 0 or index > self.order:
            raise IndexError(f"Coefficient {index} outside order {self.order}")
        return self.coeffs[index]

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        """Drop terms above z^order."""
        if order > self.order:
            raise OrderTooLow(f"Cannot extend order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1], self.kind)

    def as_float(self) -> "TruncatedSeries":
        """Explicit, lossy conversion to the float kind."""
        return TruncatedSeries(tuple(float(c) for c in self.coeffs), ScalarKind.FLOAT)

    def max_abs(self) -> float:
        return float(max(abs(c) for c in self.coeffs))

    def evaluate(self, x):
        """Evaluate the polynomial part at x by Horner's rule."""
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    # Arithmetic

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.kind != self.kind:
                raise ScalarKindMismatch(
                    f"Cannot combine {self.kind.value} and {other.kind.value} series"
                )
            return other
        return TruncatedSeries.constant(coerce_scalar(other, self.kind), self.order, self.kind)

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        order = min(self.order, other.order)
        return TruncatedSeries(
            tuple(self.coeffs[k] + other.coeffs[k] for k in range(order + 1)), self.kind
        )

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.kind)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            factor = coerce_scalar(other, self.kind)
            return TruncatedSeries(tuple(c * factor for c in self.coeffs), self.kind)
        other = self._coerce(other)
        order = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return TruncatedSeries(
            tuple(sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(order + 1)),
            self.kind,
        )

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; needs a nonzero constant term."""
        b = self.coeffs
        if b[0] == 0:
            raise DivisionByZeroConstantTerm("Divisor has zero constant term")
        inv = [coerce_scalar(1, self.kind) / b[0]]
        for n in range(1, self.order + 1):
            acc = sum(b[k] * inv[n - k] for k in range(1, n + 1))
            inv.append(-acc / b[0])
        return TruncatedSeries(tuple(inv), self.kind)

    def __truediv__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            divisor = coerce_scalar(other, self.kind)
            if divisor == 0:
                raise DivisionByZeroConstantTerm("Division by the zero scalar")
            return TruncatedSeries(tuple(c / divisor for c in self.coeffs), self.kind)
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "TruncatedSeries":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if not isinstance(exponent, Integral) or exponent < 0:
            raise ValueError("Only nonnegative integer powers are supported")
        result = TruncatedSeries.one(self.order, self.kind)
        for _ in range(exponent):
            result = result * self
        return result

    # Order-changing operations

    def shift_up(self) -> "TruncatedSeries":
        """Multiply by z; the result is known to one more order."""
        return TruncatedSeries((coerce_scalar(0, self.kind),) + self.coeffs, self.kind)

    def div_z(self) -> "TruncatedSeries":
        """Divide by z; the constant term must vanish."""
        if self.coeffs[0] != 0:
            raise DivisionByZeroConstantTerm("Cannot divide by z: constant term is nonzero")
        if self.order == 0:
            raise OrderTooLow("Dividing an order-0 series by z leaves nothing")
        return TruncatedSeries(self.coeffs[1:], self.kind)

    # Composition

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        return compose(self, inner)

    def comp_inverse(self) -> "TruncatedSeries":
        return comp_inverse(self)

    def __str__(self) -> str:
        terms = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if power == 0:
                terms.append(f"{c}")
            elif power == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{power}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(z^{self.order + 1})"


def default_order() -> int:
    return SERIES_CONFIG["default_order"]


def arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    """
    Combine two series with one of add, sub, mul or div.

    Args:
        a: Left operand
        b: Right operand
        op: One of "add", "sub", "mul", "div"

    Returns:
        The result to the smaller of the two orders
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown series operation: {op}")


def compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """
    Compute f(g(z)) by nested (Horner) evaluation.

    Args:
        f: Outer series
        g: Inner series, vanishing at zero

    Returns:
        f∘g truncated at the shared order
    """
    if g.coeffs[0] != 0:
        raise NonzeroConstantInnerTerm(
            f"Inner series must vanish at zero, constant term is {g.coeffs[0]}"
        )
    if f.kind != g.kind:
        raise ScalarKindMismatch(
            f"Cannot compose {f.kind.value} with {g.kind.value} series"
        )
    order = min(f.order, g.order)
    inner = g.truncate(order)
    result = TruncatedSeries.constant(f.coeffs[order], order, f.kind)
    for k in range(order - 1, -1, -1):
        result = result * inner + f.coeffs[k]
    return result


def comp_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """
    Compositional inverse by undetermined coefficients, one degree at a time.

    Args:
        f: Series with f(0) = 0 and f'(0) != 0

    Returns:
        g with f(g(z)) = g(f(z)) = z to the order of f
    """
    if f.order < 1:
        raise NotInvertible("Need at least the linear term to invert")
    if f.coeffs[0] != 0:
        raise NotInvertible(f"Series must vanish at zero, constant term is {f.coeffs[0]}")
    lead = f.coeffs[1]
    if lead == 0:
        raise NotInvertible("Linear coefficient is zero")

    zero = coerce_scalar(0, f.kind)
    g = [zero, coerce_scalar(1, f.kind) / lead] + [zero] * (f.order - 1)
    for k in range(2, f.order + 1):
        trial = compose(
            f.truncate(k), TruncatedSeries(tuple(g[: k + 1]), f.kind)
        )
        g[k] = g[k] - trial.coeffs[k] / lead

    return TruncatedSeries(tuple(g), f.kind)
