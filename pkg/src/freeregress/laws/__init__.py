"""
Laws Module

This module provides the free Poisson and free binomial laws and functional
entry points over them.
"""

import logging
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from ..algebra.freemoments import SpectralMeasure
from ..algebra.series import Scalar
from ..errors import InvalidLawParameters
from .base import FreeLaw, ResolventFunctionals, atom_mass_by_residue
from .free_binomial import FreeBinomialLaw, two_point_power
from .free_poisson import FreePoissonLaw

logger = logging.getLogger(__name__)

LAW_TYPES = {
    "poisson": FreePoissonLaw,
    "binomial": FreeBinomialLaw,
}


def density_eval(law: FreeLaw, x: float) -> float:
    return law.density_eval(x)


def law_moments(law: FreeLaw, n_max: int, method: str = "series") -> Tuple[Scalar, ...]:
    """
    Moments m_1..m_n_max of a law.

    Args:
        law: The law
        n_max: Highest moment
        method: "series" (closed-form generating function) or "quadrature"

    Returns:
        The moments
    """
    if method == "series":
        return law.series_moments(n_max)
    if method == "quadrature":
        return law.quadrature_moments(n_max)
    raise ValueError(f"Unknown moment method: {method}")


def negative_moments(law: FreePoissonLaw) -> Tuple[Scalar, Scalar]:
    """(phi(Y^-1), phi(Y^-2)) of a free Poisson law with rate above one."""
    if not isinstance(law, FreePoissonLaw):
        raise InvalidLawParameters("Negative moments are available for free Poisson laws")
    return law.negative_moments()


def binomial_cauchy(sigma: Scalar, theta: Scalar, z: complex) -> complex:
    return FreeBinomialLaw(sigma, theta).cauchy(z)


def resolvent_functionals(
    law: FreeBinomialLaw,
    delta_guard: Optional[float] = None,
) -> ResolventFunctionals:
    return law.resolvent_functionals(delta_guard)


def discretize(law: FreeLaw, node_count: Optional[int] = None) -> SpectralMeasure:
    return law.discretize(node_count)


def sample(law: FreeLaw, rng: np.random.Generator, size: Optional[int] = None):
    return law.sample(rng, size)


def parse_law_spec(spec: str) -> FreeLaw:
    """
    Build a law from text such as "poisson:3,1" or "binomial:1/2,2".

    Args:
        spec: Family name, a colon, and comma-separated parameters

    Returns:
        The law; parameters written as integers or fractions stay exact
    """
    try:
        family, raw = spec.split(":", 1)
        values = [parse_number(part) for part in raw.split(",")]
    except ValueError as e:
        raise InvalidLawParameters(f"Cannot parse law specification {spec!r}: {e}") from e

    family = family.strip().lower()
    if family not in LAW_TYPES:
        raise InvalidLawParameters(
            f"Unknown law family {family!r}; expected one of {', '.join(LAW_TYPES)}"
        )
    if len(values) != 2:
        raise InvalidLawParameters(f"{family} takes two parameters, got {len(values)}")
    return LAW_TYPES[family](*values)


def parse_number(text: str) -> Scalar:
    text = text.strip()
    if any(c in text for c in ".eE") and "/" not in text:
        return float(text)
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value
