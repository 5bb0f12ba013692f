"""
Law Base Module

Shared machinery of the parametric laws: validation of the continuous part,
Gauss-Legendre discretization, tabulated distribution functions, sampling and
numerical checks through the Cauchy transform.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special
from scipy.integrate import cumulative_trapezoid

from ..algebra.freemoments import FunctionSpec, SpectralMeasure, measure_moment
from ..algebra.series import Scalar, scalar_kind
from ..algebra.transforms import MomentSeries, RTransform, r_from_moments
from ..config import QUADRATURE_CONFIG
from ..errors import BranchAmbiguity, InvalidLawParameters, OutsideSupport

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def check_parameter(name: str, value) -> Scalar:
    """Accept integers, Fractions and finite floats; reject everything else."""
    try:
        scalar_kind(value)
    except TypeError as e:
        raise InvalidLawParameters(f"{name} must be a real number: {e}") from e
    if not math.isfinite(float(value)):
        raise InvalidLawParameters(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class ResolventFunctionals:
    """
    F = phi((I - U)^-1) and H = phi((I - U)^-2).

    Attributes:
        F: First resolvent moment at one
        H: Second resolvent moment at one
        F_closed_form: Value from the law parameters, when known
        H_closed_form: Value from the law parameters, when known
    """

    F: Scalar
    H: Scalar
    F_closed_form: Optional[Scalar] = None
    H_closed_form: Optional[Scalar] = None


class FreeLaw(ABC):
    """A law with finitely many atoms and one interval of continuous support."""

    name: str = "law"

    @property
    @abstractmethod
    def continuous_support(self) -> Tuple[float, float]:
        """Open interval (lo, hi) carrying the continuous part."""

    @property
    @abstractmethod
    def atoms(self) -> Tuple[Tuple[Scalar, Scalar], ...]:
        """(location, mass) pairs with positive mass."""

    @abstractmethod
    def density(self, x: ArrayLike) -> ArrayLike:
        """Density of the continuous part, zero outside its support."""

    @abstractmethod
    def series_moments(self, n_max: int) -> Tuple[Scalar, ...]:
        """m_1..m_n_max from the closed-form generating function."""

    @abstractmethod
    def cauchy(self, z: complex) -> complex:
        """Cauchy transform G(z) = phi((z - X)^-1) off the support."""

    @abstractmethod
    def params(self) -> dict:
        """Parameters by name, for reports."""

    def r_transform(self, order: int) -> RTransform:
        """r-transform to the given order, from the cumulants of the closed-form moments."""
        return r_from_moments(MomentSeries.from_moments(self.series_moments(order + 1)))

    @property
    def continuous_mass(self) -> float:
        return 1.0 - float(sum(mass for _, mass in self.atoms))

    @property
    def mean(self) -> Scalar:
        return self.series_moments(1)[0]

    def density_eval(self, x: float) -> float:
        """
        Density at one point strictly inside the continuous support.

        Args:
            x: Evaluation point

        Returns:
            The density value
        """
        lo, hi = self.continuous_support
        if not lo < x < hi:
            raise OutsideSupport(f"{x} is outside the continuous support ({lo}, {hi})")
        return float(self.density(np.asarray([x], dtype=float))[0])

    def discretize(self, node_count: Optional[int] = None) -> SpectralMeasure:
        """Atoms exactly plus the continuous part on Gauss-Legendre nodes."""
        node_count = QUADRATURE_CONFIG["nodes"] if node_count is None else node_count
        if node_count < QUADRATURE_CONFIG["min_nodes"]:
            raise ValueError(
                f"Need at least {QUADRATURE_CONFIG['min_nodes']} nodes, got {node_count}"
            )
        return _discretize(self, node_count)

    def exact_moment(self, spec: FunctionSpec) -> Optional[Scalar]:
        """phi(f(X)) from the closed-form moments when f is a nonnegative integer power, else None."""
        if spec.resolvent_order or spec.half_exponent < 0 or spec.half_exponent % 2:
            return None
        k = spec.half_exponent // 2
        return 1 if k == 0 else self.series_moments(k)[-1]

    def quadrature_moments(self, n_max: int, node_count: Optional[int] = None) -> Tuple[float, ...]:
        mu = self.discretize(node_count)
        return tuple(float(measure_moment(mu, FunctionSpec.power(k))) for k in range(1, n_max + 1))

    def cdf(self, x: ArrayLike) -> ArrayLike:
        """Distribution function, atoms included, right continuous."""
        grid, table = _cdf_table(self)
        xs = np.asarray(x, dtype=float)
        result = np.interp(xs, grid, table, left=0.0, right=table[-1])
        for location, mass in self.atoms:
            result = result + float(mass) * (xs >= float(location))
        return result if result.ndim else float(result)

    def quantile(self, q: ArrayLike) -> ArrayLike:
        """Generalized inverse of cdf, monotone and piecewise linear between grid points."""
        xs, table = _full_table(self)
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
        idx = np.clip(np.searchsorted(table, q, side="left"), 1, len(table) - 1)
        f0, f1 = table[idx - 1], table[idx]
        x0, x1 = xs[idx - 1], xs[idx]
        span = f1 - f0
        frac = np.where(span > 0, (q - f0) / np.where(span > 0, span, 1.0), 0.0)
        result = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
        return result if result.ndim else float(result)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
        """
        Draw from the law: an atom with its probability, else an inverse-CDF draw
        from the tabulated continuous part.

        Args:
            rng: Caller-owned generator
            size: Number of draws; a single float when omitted

        Returns:
            The draws
        """
        shape = () if size is None else (size,)
        pick = rng.random(shape)
        uniform = rng.random(shape)

        grid, table = _cdf_table(self)
        continuous = np.interp(uniform * table[-1], table, grid)

        result = continuous
        threshold = 0.0
        for location, mass in self.atoms:
            lower = threshold
            threshold += float(mass)
            result = np.where((pick >= lower) & (pick < threshold), float(location), result)
        return result if size is not None else float(result)

    def stieltjes_density(self, x: ArrayLike, epsilon: Optional[float] = None) -> ArrayLike:
        """-(1/pi) Im G(x + i epsilon), which tends to the density as epsilon -> 0."""
        epsilon = QUADRATURE_CONFIG["stieltjes_epsilon"] if epsilon is None else epsilon
        values = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([-self.cauchy(complex(v, epsilon)).imag / math.pi for v in values])
        return out if np.ndim(x) else float(out[0])

    def check_off_support(self, z: complex) -> None:
        """Reject points on the cut or at an atom, where G has no single value."""
        lo, hi = self.continuous_support
        if z.imag == 0 and lo <= z.real <= hi:
            raise BranchAmbiguity(f"z={z} lies on the cut [{lo}, {hi}]")

    def density_table(self, points: int = 200) -> Tuple[np.ndarray, np.ndarray]:
        """Density on an increasing grid strictly inside the support, for export."""
        lo, hi = self.continuous_support
        step = (hi - lo) / (points + 1)
        xs = lo + step * np.arange(1, points + 1)
        return xs, self.density(xs)


def _sine_nodes(law: FreeLaw, node_count: int) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = law.continuous_support
    center, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
    roots, weights = special.roots_legendre(node_count)
    t = 0.5 * math.pi * roots
    xs = center + radius * np.sin(t)
    ws = law.density(xs) * radius * np.cos(t) * 0.5 * math.pi * weights
    return xs, ws


@lru_cache(maxsize=64)
def _discretize(law: FreeLaw, node_count: int) -> SpectralMeasure:
    xs, ws = _sine_nodes(law, node_count)
    raw = float(ws.sum())
    target = law.continuous_mass
    if target > 0:
        logger.debug(f"{law}: continuous mass {raw:.15f} against {target:.15f}")
        ws = ws * (target / raw)
    return SpectralMeasure(
        atoms=law.atoms,
        node_locations=xs,
        node_weights=ws,
        continuous_support=law.continuous_support,
    )


@lru_cache(maxsize=64)
def _cdf_table(law: FreeLaw) -> Tuple[np.ndarray, np.ndarray]:
    points = QUADRATURE_CONFIG["cdf_points"]
    lo, hi = law.continuous_support
    center, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = np.linspace(-0.5 * math.pi, 0.5 * math.pi, points)
    grid = center + radius * np.sin(t)
    integrand = law.density(grid) * radius * np.cos(t)
    table = cumulative_trapezoid(integrand, t, initial=0.0)
    table = table * (law.continuous_mass / table[-1])
    return grid, table


@lru_cache(maxsize=64)
def _full_table(law: FreeLaw) -> Tuple[np.ndarray, np.ndarray]:
    grid, table = _cdf_table(law)
    lo, hi = law.continuous_support
    xs, fs = [], []
    level = 0.0
    for location, mass in sorted(law.atoms):
        if float(location) <= lo:
            xs += [float(location), float(location)]
            fs += [level, level + float(mass)]
            level += float(mass)
    xs.extend(grid.tolist())
    fs.extend((table + level).tolist())
    level += float(table[-1])
    for location, mass in sorted(law.atoms):
        if float(location) >= hi:
            xs += [float(location), float(location)]
            fs += [level, level + float(mass)]
            level += float(mass)
    return np.asarray(xs), np.asarray(fs)


def atom_mass_by_residue(law: FreeLaw, point: float, points: int = 512) -> float:
    """
    Mass of an atom from a contour integral of the Cauchy transform.

    The circle around the point stays at half the distance to the continuous
    support, where the trapezoid rule converges geometrically.

    Args:
        law: The law
        point: Candidate atom location
        points: Quadrature points on the circle

    Returns:
        (1 / 2 pi i) times the contour integral of G around the point
    """
    lo, hi = law.continuous_support
    distance = max(lo - point, point - hi)
    if distance <= 0:
        raise BranchAmbiguity(f"{point} is not separated from the support ({lo}, {hi})")
    radius = 0.5 * distance
    angles = 2.0 * math.pi * np.arange(points) / points
    circle = point + radius * np.exp(1j * angles)
    values = np.array([law.cauchy(complex(z)) for z in circle])
    # dz = i r e^{it} dt, so the i cancels against the 2 pi i
    integral = np.mean(values * radius * np.exp(1j * angles))
    return float(integral.real)
