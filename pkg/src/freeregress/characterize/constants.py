"""
Regression Constants

Forward constants of the two regression characterizations and the inverse
solvers that recover the free Poisson and free binomial parameters from them.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from ..algebra.series import Scalar
from ..errors import InfeasibleConstants, ThetaNotGreaterThanOne

logger = logging.getLogger(__name__)


class Theorem(Enum):
    """Which pair of regressions is assumed constant."""
    T1 = "T1"
    T2 = "T2"

    @classmethod
    def parse(cls, value) -> "Theorem":
        if isinstance(value, Theorem):
            return value
        text = str(value).upper().lstrip("T")
        if text == "1":
            return cls.T1
        if text == "2":
            return cls.T2
        raise ValueError(f"Unknown theorem: {value}")


def exact_scalars(*values) -> Tuple[Scalar, ...]:
    """Promote integers to Fraction unless a float is involved."""
    if any(isinstance(v, float) for v in values):
        return tuple(float(v) for v in values)
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class TheoremParams:
    """
    Parameters of V ~ nu(lam, alpha) and U ~ beta(sigma, theta).

    Attributes:
        lam: Rate of V, equal to sigma + theta
        alpha: Jump size of V
        sigma: First free binomial parameter
        theta: Second free binomial parameter, above one
        c: First regression constant, when known
        d: Second regression constant, when known
        F: phi((I - U)^-1), when known
    """

    lam: Scalar
    alpha: Scalar
    sigma: Scalar
    theta: Scalar
    c: Optional[Scalar] = None
    d: Optional[Scalar] = None
    F: Optional[Scalar] = None

    def __post_init__(self):
        """Check the region both characterizations live in."""
        if self.theta <= 1:
            raise ThetaNotGreaterThanOne(f"theta must exceed 1, got {self.theta}")
        if self.alpha <= 0:
            raise InfeasibleConstants(f"alpha must be positive, got {self.alpha}")
        if self.sigma <= 0:
            raise InfeasibleConstants(f"sigma must be positive, got {self.sigma}")
        gap = abs(self.lam - (self.sigma + self.theta))
        if gap > 1e-12 * max(1.0, abs(float(self.lam))):
            raise InfeasibleConstants(
                f"lambda={self.lam} differs from sigma + theta={self.sigma + self.theta}"
            )

    @classmethod
    def from_laws(cls, sigma: Scalar, theta: Scalar, alpha: Scalar) -> "TheoremParams":
        sigma, theta, alpha = exact_scalars(sigma, theta, alpha)
        return cls(lam=sigma + theta, alpha=alpha, sigma=sigma, theta=theta)

    def as_floats(self) -> dict:
        return {
            "lambda": float(self.lam),
            "alpha": float(self.alpha),
            "sigma": float(self.sigma),
            "theta": float(self.theta),
        }

    def distance(self, other: "TheoremParams") -> float:
        """Largest absolute difference of (lam, alpha, sigma, theta)."""
        pairs = zip(
            (self.lam, self.alpha, self.sigma, self.theta),
            (other.lam, other.alpha, other.sigma, other.theta),
        )
        return max(abs(float(a) - float(b)) for a, b in pairs)


def regression_constants(
    sigma: Scalar,
    theta: Scalar,
    alpha: Scalar,
    theorem="T1",
) -> Tuple[Scalar, Scalar]:
    """
    The constants c and d for V ~ nu(sigma + theta, alpha), U ~ beta(sigma, theta).

    With Y = V^(1/2)(I - U)V^(1/2) free from V^(1/2) U V^(1/2) and Y ~ nu(theta, alpha),
    the regressions equal phi(Y) = theta alpha, phi(Y^-1) = 1/(alpha(theta - 1))
    and phi(Y^-2) = theta/(alpha^2 (theta - 1)^3).

    Args:
        sigma: Free binomial sigma
        theta: Free binomial theta, above one
        alpha: Jump size
        theorem: "T1" for (phi(Y), phi(Y^-1)), "T2" for (phi(Y^-1), phi(Y^-2))

    Returns:
        (c, d)
    """
    theorem = Theorem.parse(theorem)
    if theta <= 1:
        raise ThetaNotGreaterThanOne(f"theta must exceed 1, got {theta}")
    if alpha <= 0:
        raise InfeasibleConstants(f"alpha must be positive, got {alpha}")
    sigma, theta, alpha = exact_scalars(sigma, theta, alpha)

    mean = theta * alpha
    inverse = 1 / (alpha * (theta - 1))
    inverse_square = theta / (alpha ** 2 * (theta - 1) ** 3)
    if theorem == Theorem.T1:
        return mean, inverse
    return inverse, inverse_square


def solve_thm1(c: Scalar, d: Scalar, F: Scalar) -> TheoremParams:
    """
    Parameters from the constants of the first characterization.

    sigma = (F - 1)/(cd - 1), theta = 1 + 1/(cd - 1), alpha = (cd - 1)/d and
    lam = sigma + theta = 1 + F/(cd - 1).

    Args:
        c: Constant of the regression of V^(1/2)(I - U)V^(1/2)
        d: Constant of the regression of its inverse
        F: phi((I - U)^-1)

    Returns:
        The parameters, carrying c, d and F
    """
    c, d, F = exact_scalars(c, d, F)
    cd = c * d
    if cd <= 1:
        raise InfeasibleConstants("cd must exceed 1")
    if F <= 1:
        raise InfeasibleConstants("F must exceed 1")
    if d <= 0:
        raise InfeasibleConstants("d must be positive")

    sigma = (F - 1) / (cd - 1)
    theta = 1 + 1 / (cd - 1)
    alpha = (cd - 1) / d
    lam = 1 + F / (cd - 1)
    logger.info(f"Solved first characterization: lambda={lam}, alpha={alpha}, sigma={sigma}, theta={theta}")
    return TheoremParams(lam=lam, alpha=alpha, sigma=sigma, theta=theta, c=c, d=d, F=F)


def solve_thm2(c: Scalar, d: Scalar, F: Scalar) -> TheoremParams:
    """
    Parameters from the constants of the second characterization.

    sigma = c^2 (F - 1)/(d - c^2), theta = d/(d - c^2), alpha = (d - c^2)/c^3 and
    lam = 1 + c^2 F/(d - c^2), which equals sigma + theta.

    Args:
        c: Constant of the regression of the inverse
        d: Constant of the regression of the inverse square
        F: phi((I - U)^-1)

    Returns:
        The parameters, carrying c, d and F
    """
    c, d, F = exact_scalars(c, d, F)
    if d <= c ** 2:
        raise InfeasibleConstants("d must exceed c^2")
    if F <= 1:
        raise InfeasibleConstants("F must exceed 1")
    if c <= 0:
        raise InfeasibleConstants("c must be positive")

    gap = d - c ** 2
    sigma = c ** 2 * (F - 1) / gap
    theta = d / gap
    alpha = gap / c ** 3
    lam = 1 + c ** 2 * F / gap
    logger.info(f"Solved second characterization: lambda={lam}, alpha={alpha}, sigma={sigma}, theta={theta}")
    return TheoremParams(lam=lam, alpha=alpha, sigma=sigma, theta=theta, c=c, d=d, F=F)


def theta_forms(c: Scalar, d: Scalar) -> Tuple[Fraction, Fraction]:
    """
    theta as 1 + 1/(cd - 1) and as cd/(cd - 1), both in exact arithmetic.

    Floats are converted to the rationals they represent exactly.
    """
    cd = Fraction(c) * Fraction(d)
    if cd == 1:
        raise InfeasibleConstants("cd must exceed 1")
    return 1 + 1 / (cd - 1), cd / (cd - 1)


def x_plus_thm1(c: Scalar, d: Scalar, F: Scalar) -> float:
    """Upper edge of the support of U in terms of the first characterization's constants."""
    cd = float(c) * float(d)
    F = float(F)
    return (math.sqrt(cd * (cd - 1)) + math.sqrt(F * (F - 1))) ** 2 / (F + cd - 1) ** 2


def x_plus_thm2(c: Scalar, d: Scalar, F: Scalar) -> float:
    """Upper edge of the support of U in terms of the second characterization's constants."""
    c, d, F = float(c), float(d), float(F)
    return (
        (math.sqrt(d * (d - c ** 2)) + math.sqrt(c ** 4 * F * (F - 1))) ** 2
        / (d + c ** 2 * (F - 1)) ** 2
    )
