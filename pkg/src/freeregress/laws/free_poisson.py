"""
Free Poisson Law

The Marchenko-Pastur law nu(lambda, alpha) with rate lambda and jump size alpha.
Its free cumulants are R_n = lambda * alpha^n.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from ..algebra.freemoments import CumulantSequence, FunctionSpec, measure_moment, moments_from_cumulants
from ..algebra.series import Scalar, TruncatedSeries
from ..algebra.transforms import RTransform, STransform
from ..config import VERIFY_CONFIG
from ..errors import AtomAtZero, BranchAmbiguity, InvalidLawParameters, QuadratureMismatch
from .base import ArrayLike, FreeLaw, check_parameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FreePoissonLaw(FreeLaw):
    """
    Free Poisson law nu(lam, alpha).

    The continuous part carries the density
    sqrt(4 lam alpha^2 - (x - alpha(1 + lam))^2) / (2 pi alpha x), whose mass is
    min(1, lam); with the atom max(0, 1 - lam) at zero the total is one.
    """

    lam: Scalar
    alpha: Scalar
    name = "poisson"

    def __post_init__(self):
        """Validate rate and jump size."""
        check_parameter("lambda", self.lam)
        check_parameter("alpha", self.alpha)
        if self.lam <= 0:
            raise InvalidLawParameters(f"Rate must be positive, got {self.lam}")
        if self.alpha <= 0:
            raise InvalidLawParameters(f"Jump size must be positive, got {self.alpha}")
        if isinstance(self.lam, float) or isinstance(self.alpha, float):
            object.__setattr__(self, "lam", float(self.lam))
            object.__setattr__(self, "alpha", float(self.alpha))

    def params(self) -> dict:
        return {"lambda": float(self.lam), "alpha": float(self.alpha)}

    def __str__(self) -> str:
        return f"nu({self.lam}, {self.alpha})"

    @property
    def continuous_support(self) -> Tuple[float, float]:
        lam, alpha = float(self.lam), float(self.alpha)
        root = math.sqrt(lam)
        return alpha * (1 - root) ** 2, alpha * (1 + root) ** 2

    @property
    def atoms(self) -> Tuple[Tuple[Scalar, Scalar], ...]:
        if self.lam < 1:
            return ((0, 1 - self.lam),)
        return ()

    @property
    def literal_total_mass(self) -> float:
        """Total mass when the stated density is scaled by lam, as in atom + lam * density."""
        lam = float(self.lam)
        return max(0.0, 1.0 - lam) + lam * min(1.0, lam)

    def density(self, x: ArrayLike) -> ArrayLike:
        lam, alpha = float(self.lam), float(self.alpha)
        lo, hi = self.continuous_support
        x = np.asarray(x, dtype=float)
        inside = (lo < x) & (x < hi)
        safe = np.where(inside, x, 1.0)
        radicand = np.clip(4 * lam * alpha ** 2 - (safe - alpha * (1 + lam)) ** 2, 0.0, None)
        return np.where(inside, np.sqrt(radicand) / (2 * math.pi * alpha * safe), 0.0)

    def cumulants(self, n_max: int) -> CumulantSequence:
        """R_n = lam * alpha^n for n = 1..n_max."""
        return CumulantSequence(tuple(self.lam * self.alpha ** n for n in range(1, n_max + 1)))

    def r_transform(self, order: int) -> RTransform:
        """lam alpha / (1 - alpha z)."""
        return RTransform(TruncatedSeries.geometric(self.lam * self.alpha, self.alpha, order))

    def s_transform(self, order: int) -> STransform:
        """1 / (alpha lam + alpha z)."""
        scale = _reciprocal(self.alpha * self.lam)
        return STransform(TruncatedSeries.geometric(scale, -_reciprocal(self.lam), order))

    def series_moments(self, n_max: int) -> Tuple[Scalar, ...]:
        return moments_from_cumulants(self.cumulants(n_max), method="recursion")

    def cauchy(self, z: complex) -> complex:
        """(z + alpha(1 - lam) - sqrt(z - a) sqrt(z - b)) / (2 alpha z)."""
        self.check_off_support(z)
        if z == 0:
            raise BranchAmbiguity("G has a pole or a removable point at 0")
        lam, alpha = float(self.lam), float(self.alpha)
        lo, hi = self.continuous_support
        root = cmath.sqrt(z - lo) * cmath.sqrt(z - hi)
        return (z + alpha * (1 - lam) - root) / (2 * alpha * z)

    def wishart_columns(self, rows: int) -> int:
        """Columns of X so that (alpha / rows) X X^T has this law in the limit."""
        return max(1, int(round(float(self.lam) * rows)))

    def negative_moments(self, node_count: int = None, cross_check: bool = True) -> Tuple[Scalar, Scalar]:
        """
        phi(X^-1) = 1/(alpha(lam - 1)) and phi(X^-2) = lam/(alpha^2 (lam - 1)^3).

        Unless cross_check is off, both closed forms are checked against
        quadrature before they are returned.
        """
        if self.lam <= 1:
            raise AtomAtZero(
                f"Negative moments of {self} diverge: lambda must exceed 1, got {self.lam}"
            )
        lam, alpha = self.lam, self.alpha
        first = _reciprocal(alpha * (lam - 1))
        second = lam * _reciprocal(alpha ** 2 * (lam - 1) ** 3)
        if not cross_check:
            return first, second

        mu = self.discretize(node_count)
        tolerance = VERIFY_CONFIG["tolerance_thm1"]
        for k, closed in ((1, first), (2, second)):
            numeric = measure_moment(mu, FunctionSpec.power(-k))
            gap = abs(float(closed) - numeric)
            if gap > tolerance * max(1.0, abs(float(closed))):
                logger.error(f"Error checking phi(X^-{k}) of {self}: gap {gap:.3g}")
                raise QuadratureMismatch(
                    f"phi(X^-{k}) of {self}: closed form {float(closed)} against quadrature {numeric}"
                )
        return first, second


def _reciprocal(value: Scalar) -> Scalar:
    if isinstance(value, float):
        return 1.0 / value
    return Fraction(1) / value
