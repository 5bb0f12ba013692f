"""
Random Matrices

This module builds finite-dimensional models of free pairs: symmetric matrices
whose spectra follow a law and whose eigenvectors come from an independent Haar
orthogonal matrix. Functions of a matrix are taken through its eigendecomposition.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.stats import ortho_group

from ..config import EIGEN_CONFIG, MONTE_CARLO_CONFIG
from ..errors import IllConditioned, NoConvergence
from ..laws import FreeLaw, FreePoissonLaw

logger = logging.getLogger(__name__)

MIN_DIMENSION = 16
SPECTRUM_KINDS = ("iid", "quantile", "wishart")


@dataclass
class SymMatrix:
    """
    A dense real symmetric matrix, optionally with its eigendecomposition.

    Attributes:
        entries: n x n array, symmetrized on construction
        eigenvalues: Ascending eigenvalues, when known
        eigenvectors: Orthogonal matrix whose columns match eigenvalues
    """

    entries: np.ndarray
    eigenvalues: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None

    def __post_init__(self):
        """Check the shape and enforce exact symmetry."""
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Expected a square matrix, got shape {entries.shape}")
        self.entries = 0.5 * (entries + entries.T)

    @classmethod
    def from_spectrum(cls, values: np.ndarray, basis: np.ndarray) -> "SymMatrix":
        """Q diag(values) Q^T with the eigendecomposition kept."""
        values = np.asarray(values, dtype=float)
        order = np.argsort(values, kind="stable")
        values, basis = values[order], basis[:, order]
        return cls((basis * values) @ basis.T, values, basis)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def decompose(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.eigenvalues is None or self.eigenvectors is None:
            self.eigenvalues, self.eigenvectors = sym_eigh(self)
        return self.eigenvalues, self.eigenvectors

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> "SymMatrix":
        """f(M) by functional calculus on the spectrum."""
        values, vectors = self.decompose()
        return SymMatrix.from_spectrum(f(values), vectors)

    def min_eigenvalue(self) -> float:
        return float(self.decompose()[0][0])

    def max_eigenvalue(self) -> float:
        return float(self.decompose()[0][-1])

    def sqrt(self) -> "SymMatrix":
        if self.min_eigenvalue() < 0:
            raise IllConditioned(f"Square root of a matrix with eigenvalue {self.min_eigenvalue():.3g}")
        return self.apply(np.sqrt)

    def inverse_power(self, power: float = 1.0, floor: Optional[float] = None) -> "SymMatrix":
        """M^(-power) for a positive definite M."""
        floor = MONTE_CARLO_CONFIG["min_eigenvalue"] if floor is None else floor
        if self.min_eigenvalue() < floor:
            raise IllConditioned(
                f"Smallest eigenvalue {self.min_eigenvalue():.3g} is below {floor:g}"
            )
        return self.apply(lambda values: np.power(values, -power))

    def resolvent_one_minus(self, floor: Optional[float] = None) -> "SymMatrix":
        """(I - M)^-1 when every eigenvalue sits below 1 by at least the floor."""
        floor = MONTE_CARLO_CONFIG["min_eigenvalue"] if floor is None else floor
        gap = 1.0 - self.max_eigenvalue()
        if gap < floor:
            raise IllConditioned(f"I - M has smallest eigenvalue {gap:.3g}, below {floor:g}")
        return self.apply(lambda values: 1.0 / (1.0 - values))

    def normalized_trace(self) -> float:
        return float(np.trace(self.entries)) / self.dimension


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    An n x n orthogonal matrix drawn from the Haar measure.

    Args:
        n: Dimension, at least 2
        rng: Caller-owned generator

    Returns:
        Q with Q^T Q = I
    """
    if n < 2:
        raise ValueError(f"Haar orthogonal matrices need n >= 2, got {n}")
    return ortho_group.rvs(dim=n, random_state=rng)


def quantile_spectrum(law: FreeLaw, n: int) -> np.ndarray:
    """The n midpoint quantiles of the law, ascending."""
    return np.asarray(law.quantile((np.arange(n) + 0.5) / n), dtype=float)


def sample_matrix(
    law: FreeLaw,
    n: int,
    rng: np.random.Generator,
    spectrum: str = "iid",
) -> SymMatrix:
    """
    A symmetric matrix whose empirical spectral law approximates the law.

    Args:
        law: Target law
        n: Dimension, at least 16
        rng: Caller-owned generator
        spectrum: "iid" draws the eigenvalues from the law, "quantile" places them
            at the midpoint quantiles, "wishart" uses (alpha/n) G G^T with a
            Gaussian n x round(lambda n) matrix G (free Poisson laws only)

    Returns:
        The matrix; the rotated constructions keep their eigendecomposition
    """
    if n < MIN_DIMENSION:
        raise ValueError(f"Matrix models need n >= {MIN_DIMENSION}, got {n}")
    if spectrum not in SPECTRUM_KINDS:
        raise ValueError(f"Unknown spectrum kind {spectrum!r}; expected one of {', '.join(SPECTRUM_KINDS)}")

    if spectrum == "wishart":
        if not isinstance(law, FreePoissonLaw):
            raise ValueError(f"The Wishart construction needs a free Poisson law, got {law}")
        columns = law.wishart_columns(n)
        gaussian = rng.standard_normal((n, columns))
        return SymMatrix(float(law.alpha) / n * (gaussian @ gaussian.T))

    if spectrum == "iid":
        values = np.asarray(law.sample(rng, n), dtype=float)
    else:
        values = quantile_spectrum(law, n)
    return SymMatrix.from_spectrum(values, haar_orthogonal(n, rng))


def sym_eigh(
    m: SymMatrix,
    method: str = "lapack",
    tolerance: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenvalues in ascending order and matching orthonormal eigenvectors.

    Args:
        m: Symmetric matrix
        method: "lapack" (numpy.linalg.eigh) or "jacobi" (cyclic Jacobi rotations)
        tolerance: Jacobi stops once the off-diagonal Frobenius norm is at most
            tolerance times the Frobenius norm of m
        max_sweeps: Jacobi sweep cap

    Returns:
        (eigenvalues, eigenvectors)
    """
    if method == "lapack":
        try:
            return np.linalg.eigh(m.entries)
        except np.linalg.LinAlgError as e:
            logger.error(f"Error diagonalizing a {m.dimension} x {m.dimension} matrix: {e}")
            raise NoConvergence(f"Eigendecomposition did not converge: {e}") from e
    if method == "jacobi":
        tolerance = EIGEN_CONFIG["tolerance"] if tolerance is None else tolerance
        max_sweeps = EIGEN_CONFIG["max_sweeps"] if max_sweeps is None else max_sweeps
        values, vectors = _cyclic_jacobi(m.entries, tolerance, max_sweeps)
        order = np.argsort(values, kind="stable")
        return values[order], vectors[:, order]
    raise ValueError(f"Unknown eigenvalue method: {method}")


def sym_eig(m: SymMatrix, method: str = "jacobi", **kwargs) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending."""
    return sym_eigh(m, method, **kwargs)[0]


def _cyclic_jacobi(entries: np.ndarray, tolerance: float, max_sweeps: int) -> Tuple[np.ndarray, np.ndarray]:
    a = np.array(entries, dtype=float)
    n = a.shape[0]
    vectors = np.eye(n)
    threshold = tolerance * np.linalg.norm(a)
    if threshold == 0.0:
        return np.diag(a).copy(), vectors

    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            logger.debug(f"Jacobi converged after {sweep} sweeps")
            return np.diag(a).copy(), vectors
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * col_p - s * col_q, s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * row_p - s * row_q, s * row_p + c * row_q
                vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
                vectors[:, p], vectors[:, q] = c * vec_p - s * vec_q, s * vec_p + c * vec_q

    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-norm {off:.3g})")
