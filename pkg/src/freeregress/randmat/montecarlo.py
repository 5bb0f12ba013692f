"""
Monte Carlo Checks

This module estimates the regression identities on random matrix models of
free pairs and compares empirical spectra with their limiting laws.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..algebra.freemoments import SpectralMeasure, Word, free_word_moment, u_element, v_element
from ..characterize.constants import Theorem, TheoremParams, regression_constants
from ..config import MONTE_CARLO_CONFIG
from ..errors import FreeProbabilityError
from ..laws import FreeBinomialLaw, FreeLaw, FreePoissonLaw
from .matrices import SymMatrix, haar_orthogonal, quantile_spectrum, sample_matrix, sym_eig

logger = logging.getLogger(__name__)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial, fixed by (seed, trial)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


@dataclass
class McEstimate:
    """One identity at one power of X, aggregated over trials."""

    name: str
    power: int
    estimate: float
    stderr: float
    allowance: float

    @property
    def gate(self) -> float:
        if np.isnan(self.stderr):
            return self.allowance
        return max(3.0 * self.stderr, self.allowance)

    @property
    def passed(self) -> bool:
        return bool(abs(self.estimate) <= self.gate)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": f"{self.name}_n{self.power}",
            "estimate": self.estimate,
            "stderr": self.stderr,
            "allowance": self.allowance,
            "gate": self.gate,
            "pass": self.passed,
        }


@dataclass
class McReport:
    """Per-identity estimates of a Monte Carlo run, with its seed and trial count."""

    command: str
    params: Dict[str, Any]
    seed: int
    trials: int
    estimates: List[McEstimate] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.estimates)

    def __getitem__(self, key: str) -> McEstimate:
        for estimate in self.estimates:
            if f"{estimate.name}_n{estimate.power}" == key:
                return estimate
        raise KeyError(key)

    def to_dict(self, wall_time_ms: float = 0.0) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "identities": [e.to_dict() for e in self.estimates],
            "wall_time_ms": wall_time_ms,
        }
        if self.notes:
            data["notes"] = list(self.notes)
        return data


def binomial_spectrum(spectrum: str) -> str:
    """The Wishart construction is for V only; U then gets an iid spectrum."""
    return "iid" if spectrum == "wishart" else spectrum


IDENTITY_NAMES = {
    Theorem.T1: ("regression_mean", "regression_inverse"),
    Theorem.T2: ("regression_inverse", "regression_inverse_square"),
}


def _trial_residuals(
    law_u: FreeBinomialLaw,
    law_v: FreePoissonLaw,
    n: int,
    constants: Sequence[float],
    theorem: Theorem,
    max_moment: int,
    rng: np.random.Generator,
    spectrum: str,
) -> np.ndarray:
    """
    Residuals tr(Z X^k)/n - const * tr(X^k)/n for the two regressions of one theorem.

    Returns:
        Array of shape (3, max_moment + 1): two residual rows and the tr(X^k)/n row
    """
    V = sample_matrix(law_v, n, rng, spectrum)
    U = sample_matrix(law_u, n, rng, binomial_spectrum(spectrum))
    v_half = V.sqrt().entries
    v_inv_half = V.inverse_power(0.5).entries
    resolvent = U.resolvent_one_minus().entries

    X = v_half @ U.entries @ v_half
    Y = V.entries - X
    Y_inv = v_inv_half @ resolvent @ v_inv_half
    if theorem == Theorem.T1:
        left = (Y, Y_inv)
    else:
        left = (Y_inv, Y_inv @ Y_inv)

    out = np.empty((3, max_moment + 1))
    power = np.eye(n)
    for k in range(max_moment + 1):
        moment = np.trace(power) / n
        for row, (Z, const) in enumerate(zip(left, constants)):
            # tr(Z P) without forming the product
            out[row, k] = np.sum(Z * power.T) / n - const * moment
        out[2, k] = moment
        power = power @ X
    return out


def mc_regression_check(
    params: TheoremParams,
    n: Optional[int] = None,
    trials: Optional[int] = None,
    theorem="T1",
    n_max_moment: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
    constants: Optional[Sequence[float]] = None,
    spectrum: str = "iid",
    workers: Optional[int] = None,
) -> McReport:
    """
    Estimate the trace versions of both regressions of one characterization.

    Each trial draws V and U as independently Haar-rotated matrices and records
    tr(Z X^k)/n - c tr(X^k)/n for k = 0..n_max_moment. An estimate passes when
    its mean over trials is within max(3 stderr, allowance * scale / n), the
    scale being |c| times the mean of tr(X^k)/n.

    Args:
        params: Laws of U and V; theta must exceed 1
        n: Matrix dimension
        trials: Number of independent trials
        theorem: "T1" or "T2"
        n_max_moment: Highest power of X, at most 6
        rng: Caller-owned generator; when given without a seed, the base seed
            is drawn from it
        seed: Base seed; trial t uses the stream (seed, t)
        constants: Replacement (c, d), for negative controls
        spectrum: Spectrum construction passed to sample_matrix
        workers: Thread count; the result does not depend on it

    Returns:
        The report
    """
    theorem = Theorem.parse(theorem)
    n = MONTE_CARLO_CONFIG["dim"] if n is None else n
    trials = MONTE_CARLO_CONFIG["trials"] if trials is None else trials
    n_max_moment = MONTE_CARLO_CONFIG["max_moment"] if n_max_moment is None else n_max_moment
    if seed is None:
        seed = MONTE_CARLO_CONFIG["seed"] if rng is None else int(rng.integers(2 ** 32))
    workers = MONTE_CARLO_CONFIG["workers"] if workers is None else workers
    if not 0 <= n_max_moment <= 6:
        raise ValueError(f"n_max_moment must lie in 0..6, got {n_max_moment}")
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")

    if constants is None:
        constants = tuple(float(v) for v in regression_constants(params.sigma, params.theta, params.alpha, theorem))
    law_u = FreeBinomialLaw(params.sigma, params.theta)
    law_v = FreePoissonLaw(params.lam, params.alpha)
    logger.info(f"Monte Carlo {theorem.value}: n={n}, trials={trials}, seed={seed}, constants={constants}")

    def run(trial: int) -> np.ndarray:
        return _trial_residuals(
            law_u, law_v, n, constants, theorem, n_max_moment, trial_rng(seed, trial), spectrum
        )

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, range(trials)))
        else:
            results = [run(trial) for trial in range(trials)]
    except FreeProbabilityError as e:
        logger.error(f"Error in Monte Carlo trial: {e}")
        raise

    stacked = np.stack(results)
    allowance = MONTE_CARLO_CONFIG["finite_size_allowance"]
    report = McReport(
        command=f"simulate {theorem.value}",
        params={
            **params.as_floats(),
            "n": n,
            "theorem": theorem.value,
            "c": float(constants[0]),
            "d": float(constants[1]),
            "spectrum": spectrum,
            "allowance": allowance,
        },
        seed=seed,
        trials=trials,
    )
    moments = stacked[:, 2, :].mean(axis=0)
    for row, name in enumerate(IDENTITY_NAMES[theorem]):
        for k in range(n_max_moment + 1):
            samples = stacked[:, row, k]
            stderr = float(np.std(samples, ddof=1) / np.sqrt(trials)) if trials >= 2 else float("nan")
            scale = abs(float(constants[row])) * abs(float(moments[k]))
            report.estimates.append(
                McEstimate(name, k, float(samples.mean()), stderr, allowance * scale / n)
            )
    report.notes.append(
        f"finite-size allowance {allowance:g} * scale / n is a calibration, not a limit statement"
    )
    return report


def esd_distance(eigs: Sequence[float], law: FreeLaw, atom_tolerance: float = 1e-9) -> float:
    """
    Kolmogorov distance between an empirical spectrum and a law.

    Eigenvalues within atom_tolerance of an atom are moved onto it; both one-sided
    limits are compared at every distinct eigenvalue.

    Args:
        eigs: Eigenvalues, at least one
        law: Reference law
        atom_tolerance: Snapping distance to atoms

    Returns:
        sup_x |F_emp(x) - F(x)|
    """
    values = np.sort(np.asarray(eigs, dtype=float).ravel())
    if values.size == 0:
        raise ValueError("esd_distance needs at least one eigenvalue")
    atom_mass = {}
    for location, mass in law.atoms:
        location = float(location)
        values = np.where(np.abs(values - location) <= atom_tolerance, location, values)
        atom_mass[location] = float(mass)
    values = np.sort(values)

    points = np.unique(values)
    size = values.size
    right_emp = np.searchsorted(values, points, side="right") / size
    left_emp = np.searchsorted(values, points, side="left") / size
    right_law = np.asarray(law.cdf(points), dtype=float)
    jumps = np.array([atom_mass.get(float(p), 0.0) for p in points])
    left_law = right_law - jumps
    return float(max(np.max(np.abs(right_emp - right_law)), np.max(np.abs(left_emp - left_law))))


def spectrum_check(
    sigma: float,
    theta: float,
    alpha: float,
    n: int,
    seed: Optional[int] = None,
    spectrum: str = "iid",
) -> float:
    """esd_distance of V^(1/2) U V^(1/2) to nu(sigma, alpha) for one draw."""
    seed = MONTE_CARLO_CONFIG["seed"] if seed is None else seed
    rng = trial_rng(seed, 0)
    V = sample_matrix(FreePoissonLaw(sigma + theta, alpha), n, rng, spectrum)
    U = sample_matrix(FreeBinomialLaw(sigma, theta), n, rng, binomial_spectrum(spectrum))
    v_half = V.sqrt().entries
    X = SymMatrix(v_half @ U.entries @ v_half)
    return esd_distance(sym_eig(X, method="lapack"), FreePoissonLaw(sigma, alpha))


def freeness_gap(
    law_u: FreeLaw,
    law_v: FreeLaw,
    n: int,
    trials: int = 8,
    seed: Optional[int] = None,
    symmetrize: bool = False,
) -> float:
    """
    Mean of tr((UV)^2)/n over trials minus the free-product value phi(UVUV).

    U and V carry the midpoint quantiles of their laws and V is rotated by a
    Haar orthogonal Q. The free value is taken for those two spectra, so the
    gap comes from the rotation alone; its expectation is
    var(U) var(V) (n - 2) / ((n - 1)(n + 2)).

    Args:
        law_u: Law of U
        law_v: Law of V
        n: Matrix dimension
        trials: Independent rotations
        seed: Base seed; trial t uses the stream (seed, t)
        symmetrize: Average each trial over all relabelings of both spectra.
            The mean is unchanged and the trial then depends on Q only
            through sum_ij Q_ij^4, which removes most of the trial noise.

    Returns:
        The gap
    """
    seed = MONTE_CARLO_CONFIG["seed"] if seed is None else seed
    a = quantile_spectrum(law_u, n)
    b = quantile_spectrum(law_v, n)
    a1, a2 = a.mean(), np.mean(a ** 2)
    b1, b2 = b.mean(), np.mean(b ** 2)
    # Mean of a_i a_k over i != k
    a_off = (n * a1 ** 2 - a2) / (n - 1)
    b_off = (n * b1 ** 2 - b2) / (n - 1)

    samples = []
    for trial in range(trials):
        Q = haar_orthogonal(n, trial_rng(seed, trial))
        if symmetrize:
            q = np.sum(Q ** 4)
            samples.append(b_off * a2 + (b2 - b_off) * (a_off + (a2 - a_off) * q / n))
        else:
            V = (Q * b) @ Q.T
            samples.append(a @ (V * V) @ a / n)

    word = Word.of(u_element(), v_element(), u_element(), v_element())
    mass = 1.0 / n
    limit = free_word_moment(
        word,
        SpectralMeasure.from_atoms([(float(x), mass) for x in a]),
        SpectralMeasure.from_atoms([(float(x), mass) for x in b]),
    )
    logger.debug(f"Freeness gap at n={n} over {trials} trials against {float(limit):.6g}")
    return float(np.mean(samples) - float(limit))
