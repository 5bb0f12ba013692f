"""
Transform Calculus

r-, S- and Cauchy-transform manipulation at the level of truncated series,
with free additive and multiplicative convolution on top.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

from ..errors import OrderTooLow, ZeroMean
from .freemoments import CumulantSequence, cumulants_from_moments
from .series import Scalar, TruncatedSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RTransform:
    """r(z) = sum_n R_{n+1} z^n; the constant term is the mean."""

    series: TruncatedSeries

    @property
    def order(self) -> int:
        return self.series.order

    def cumulants(self) -> CumulantSequence:
        return CumulantSequence(self.series.coeffs)


@dataclass(frozen=True)
class STransform:
    """Expansion of S at the origin, defined by R(z S(z)) = z with R(z) = z r(z)."""

    series: TruncatedSeries

    @property
    def order(self) -> int:
        return self.series.order


@dataclass(frozen=True)
class MomentSeries:
    """M(z) = sum_n phi(X^n) z^n with constant term 1."""

    series: TruncatedSeries

    def __post_init__(self):
        """Check the constant term."""
        if self.series[0] != 1:
            raise ValueError(f"A moment series starts with 1, got {self.series[0]}")

    @classmethod
    def from_moments(cls, m: Sequence[Scalar]) -> "MomentSeries":
        """Series 1 + m_1 z + m_2 z^2 + ... from m_1..m_N."""
        return cls(TruncatedSeries.from_coeffs([1] + list(m)))

    @property
    def order(self) -> int:
        return self.series.order

    def moments(self) -> Tuple[Scalar, ...]:
        """m_1..m_N."""
        return self.series.coeffs[1:]


def r_from_cumulants(k: CumulantSequence) -> RTransform:
    """
    The r-transform of a cumulant sequence.

    Args:
        k: kappa_1..kappa_N

    Returns:
        r with coefficient n equal to kappa_{n+1}, order N - 1
    """
    return RTransform(TruncatedSeries.from_coeffs(k.values))


def r_from_moments(m: MomentSeries, method: str = "recursion") -> RTransform:
    return r_from_cumulants(cumulants_from_moments(m.moments(), method=method))


def free_add(a: RTransform, b: RTransform) -> RTransform:
    """r-transform of the free additive convolution: r_a + r_b."""
    return RTransform(a.series + b.series)


def s_from_r(a: RTransform) -> STransform:
    """
    The S-transform from an r-transform.

    Args:
        a: r-transform with nonzero mean

    Returns:
        S of order a.order, from the compositional inverse of z r(z)
    """
    if a.series[0] == 0:
        raise ZeroMean("The S-transform needs a nonzero first cumulant")
    big_r = a.series.shift_up()
    return STransform(big_r.comp_inverse().div_z())


def s_from_moments(m: MomentSeries) -> STransform:
    """
    The S-transform from moments: S(z) = chi(z)(1 + z)/z with chi the
    compositional inverse of M(z) - 1.
    """
    if m.order < 1:
        raise OrderTooLow("Need at least the first moment")
    if m.series[1] == 0:
        raise ZeroMean("The S-transform needs a nonzero first moment")
    psi = m.series - 1
    chi = psi.comp_inverse()
    one_plus_z = 1 + TruncatedSeries.variable(chi.order, chi.kind)
    return STransform((chi * one_plus_z).div_z())


def moments_from_s(s: STransform, N: int) -> MomentSeries:
    """
    Moment series from an S-transform, through M(z/(1+z) S(z)) - 1 = z.

    Args:
        s: S-transform known at least to order N - 1
        N: Highest moment wanted

    Returns:
        1 + m_1 z + ... + m_N z^N
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if s.order < N - 1:
        raise OrderTooLow(f"S-transform of order {s.order} gives moments only to {s.order + 1}")
    shifted = s.series.truncate(N - 1).shift_up()
    chi = shifted / (1 + TruncatedSeries.variable(N, shifted.kind))
    return MomentSeries(1 + chi.comp_inverse())


def free_mult(a: STransform, b: STransform, N: int) -> MomentSeries:
    """
    Moments of the free multiplicative convolution of two laws.

    Args:
        a: S-transform of the first law
        b: S-transform of the second law
        N: Highest moment wanted

    Returns:
        Moment series of the product, from S_a * S_b
    """
    product = STransform(a.series * b.series)
    logger.debug(f"Free multiplicative convolution to order {N}")
    return moments_from_s(product, N)


def verify_cauchy_relation(m: MomentSeries, r: RTransform, N: int) -> Tuple[Scalar, ...]:
    """
    Residuals of G(r(z) + 1/z) = z rewritten in the power-series ring.

    With g(z) = sum_n m_n z^(n+1) and u(z) = z / (1 + z r(z)) the relation reads
    g(u(z)) = z. The residual at index k is the coefficient of z^(k+1) in
    g(u(z)) - z.

    Args:
        m: Moment series, order at least N
        r: r-transform, order at least N
        N: Highest residual index

    Returns:
        Residuals for z^1..z^(N+1)
    """
    if m.order < N or r.order < N:
        raise OrderTooLow(f"Need moment and r series of order {N}")
    kind = m.series.kind
    z = TruncatedSeries.variable(N + 1, kind)
    u = z / (1 + r.series.truncate(N).shift_up())
    g = m.series.truncate(N).shift_up()
    return (g.compose(u) - z).div_z().coeffs
