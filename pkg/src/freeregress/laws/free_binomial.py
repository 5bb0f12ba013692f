"""
Free Binomial Law

The law beta(sigma, theta) on [0, 1]: possible atoms at 0 and 1 and a continuous
part on (x_-, x_+). With s = sigma + theta its mean is sigma / s and its Cauchy
transform G solves z(1 - z) G^2 - ((s - 2) z + 1 - sigma) G + (s - 1) = 0.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ..algebra.freemoments import FunctionSpec, measure_moment
from ..algebra.series import Scalar
from ..algebra.transforms import MomentSeries, STransform, s_from_moments
from ..config import VERIFY_CONFIG
from ..errors import BranchAmbiguity, InvalidLawParameters, QuadratureMismatch, SupportTouchesOne
from .base import ArrayLike, FreeLaw, ResolventFunctionals, check_parameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FreeBinomialLaw(FreeLaw):
    """
    Free binomial law beta(sigma, theta).

    Admissible parameters satisfy s/(s - 1) > 0 and sigma theta/(s - 1) > 0 with
    s = sigma + theta; only the branch s > 1 has a nonnegative density, which
    leaves sigma > 0 and theta > 0.
    """

    sigma: Scalar
    theta: Scalar
    name = "binomial"

    def __post_init__(self):
        """Validate the parameter region."""
        check_parameter("sigma", self.sigma)
        check_parameter("theta", self.theta)
        if self.sigma + self.theta <= 1:
            raise InvalidLawParameters(
                f"sigma + theta must exceed 1, got {self.sigma + self.theta}"
            )
        if self.sigma <= 0 or self.theta <= 0:
            raise InvalidLawParameters(
                f"sigma and theta must be positive, got ({self.sigma}, {self.theta})"
            )
        if isinstance(self.sigma, float) or isinstance(self.theta, float):
            object.__setattr__(self, "sigma", float(self.sigma))
            object.__setattr__(self, "theta", float(self.theta))

    def params(self) -> dict:
        return {"sigma": float(self.sigma), "theta": float(self.theta)}

    def __str__(self) -> str:
        return f"beta({self.sigma}, {self.theta})"

    @property
    def total(self) -> Scalar:
        return self.sigma + self.theta

    @property
    def continuous_support(self) -> Tuple[float, float]:
        sigma, theta = float(self.sigma), float(self.theta)
        s = sigma + theta
        left = math.sqrt(sigma * (s - 1))
        right = math.sqrt(theta)
        return (left - right) ** 2 / s ** 2, (left + right) ** 2 / s ** 2

    @property
    def x_plus(self) -> float:
        return self.continuous_support[1]

    @property
    def atoms(self) -> Tuple[Tuple[Scalar, Scalar], ...]:
        found = []
        if 0 < self.sigma < 1:
            found.append((0, 1 - self.sigma))
        if 0 < self.theta < 1:
            found.append((1, 1 - self.theta))
        return tuple(found)

    def density(self, x: ArrayLike) -> ArrayLike:
        lo, hi = self.continuous_support
        s = float(self.total)
        x = np.asarray(x, dtype=float)
        inside = (lo < x) & (x < hi)
        safe = np.where(inside, x, 0.5)
        radicand = np.clip((safe - lo) * (hi - safe), 0.0, None)
        return np.where(inside, s * np.sqrt(radicand) / (2 * math.pi * safe * (1 - safe)), 0.0)

    def series_moments(self, n_max: int) -> Tuple[Scalar, ...]:
        """
        Moments from the quadratic of the moment series M(w) = sum m_n w^n:
        s m_n = sum_{k<n} m_k m_{n-1-k} - sum_{0<k<n} m_k m_{n-k} - (1 - sigma) m_{n-1}.
        """
        sigma, s = self.sigma, self.total
        if not isinstance(s, float):
            sigma, s = Fraction(sigma), Fraction(s)
        m: List[Scalar] = [1]
        for n in range(1, n_max + 1):
            forward = sum(m[k] * m[n - 1 - k] for k in range(n))
            overlap = sum(m[k] * m[n - k] for k in range(1, n))
            m.append((forward - overlap - (1 - sigma) * m[n - 1]) / s)
        return tuple(m[1:])

    def s_transform(self, order: int) -> STransform:
        return s_from_moments(MomentSeries.from_moments(self.series_moments(order + 1)))

    def cauchy(self, z: complex) -> complex:
        """
        (P - s sqrt(z - x_-) sqrt(z - x_+)) / (2 z (1 - z)) with P = (s - 2) z + 1 - sigma.

        The product of principal roots has its cut on [x_-, x_+] and behaves like
        z at infinity, so G(z) ~ 1/z there.
        """
        self.check_off_support(z)
        if z == 0 or z == 1:
            raise BranchAmbiguity(f"G is evaluated at the pole candidate {z}")
        sigma, s = float(self.sigma), float(self.total)
        lo, hi = self.continuous_support
        p = (s - 2) * z + 1 - sigma
        root = cmath.sqrt(z - lo) * cmath.sqrt(z - hi)
        return (p - s * root) / (2 * z * (1 - z))

    def closed_form_resolvents(self) -> Tuple[Scalar, Scalar]:
        """F = 1 + sigma/(theta - 1) and H = (F^2 + (s - 2) F)/(theta - 1), for theta > 1."""
        sigma, theta = self.sigma, self.theta
        if not isinstance(theta, float):
            sigma, theta = Fraction(sigma), Fraction(theta)
        F = 1 + sigma / (theta - 1)
        H = (F ** 2 + (sigma + theta - 2) * F) / (theta - 1)
        return F, H

    def resolvent_functionals(
        self,
        delta_guard: Optional[float] = None,
        node_count: Optional[int] = None,
        method: str = "quadrature",
    ) -> ResolventFunctionals:
        """
        F = phi((I - U)^-1) and H = phi((I - U)^-2).

        Args:
            delta_guard: Required gap between x_+ and 1
            node_count: Quadrature nodes
            method: "quadrature" (checked against the closed forms) or "closed_form"

        Returns:
            The two functionals
        """
        guard = VERIFY_CONFIG["delta_guard"] if delta_guard is None else delta_guard
        if self.theta <= 1 or self.x_plus >= 1 - guard:
            raise SupportTouchesOne(
                f"{self} reaches 1 (theta={self.theta}, x_+={self.x_plus:.12g})"
            )
        F_closed, H_closed = self.closed_form_resolvents()
        if method == "closed_form":
            return ResolventFunctionals(F_closed, H_closed, F_closed, H_closed)
        if method != "quadrature":
            raise ValueError(f"Unknown method: {method}")

        mu = self.discretize(node_count)
        F = float(measure_moment(mu, FunctionSpec.resolvent_one_minus(1)))
        H = float(measure_moment(mu, FunctionSpec.resolvent_one_minus(2)))
        tolerance = VERIFY_CONFIG["tolerance_thm2"]
        for label, numeric, closed in (("F", F, F_closed), ("H", H, H_closed)):
            if abs(numeric - float(closed)) > tolerance * max(1.0, abs(float(closed))):
                logger.error(f"Error checking {label} of {self}: {numeric} against {float(closed)}")
                raise QuadratureMismatch(
                    f"{label} of {self}: quadrature {numeric} against closed form {float(closed)}"
                )
        return ResolventFunctionals(F, H, F_closed, H_closed)


def two_point_power(p: Scalar, n: Scalar) -> FreeBinomialLaw:
    """
    The n-th free additive convolution power of p delta_0 + (1 - p) delta_{1/n}.

    Args:
        p: Mass at zero, 0 < p < 1
        n: Convolution power, n > 1

    Returns:
        beta(n (1 - p), n p)
    """
    if not 0 < p < 1:
        raise InvalidLawParameters(f"p must lie in (0, 1), got {p}")
    if n <= 1:
        raise InvalidLawParameters(f"The convolution power must exceed 1, got {n}")
    return FreeBinomialLaw(n * (1 - p), n * p)
