"""
Tests for the randmat module.
"""

from fractions import Fraction

import numpy as np
import pytest

from freeregress.characterize import TheoremParams, regression_constants
from freeregress.errors import IllConditioned, NoConvergence
from freeregress.laws import FreeBinomialLaw, FreePoissonLaw
from freeregress.randmat import (
    SymMatrix,
    esd_distance,
    freeness_gap,
    haar_orthogonal,
    mc_regression_check,
    quantile_spectrum,
    sample_matrix,
    spectrum_check,
    sym_eig,
    sym_eigh,
    trial_rng,
)


@pytest.fixture
def rng():
    """A seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def symmetric(rng):
    """A random 20 x 20 symmetric matrix."""
    a = rng.standard_normal((20, 20))
    return SymMatrix(a + a.T)


def test_haar_matrix_is_orthogonal(rng):
    """Test Q^T Q = I."""
    q = haar_orthogonal(32, rng)
    assert np.allclose(q.T @ q, np.eye(32), atol=1e-12)
    with pytest.raises(ValueError, match="n >= 2"):
        haar_orthogonal(1, rng)


def test_jacobi_matches_lapack(symmetric):
    """Test that cyclic Jacobi and LAPACK give the same spectrum and a valid basis."""
    values, vectors = sym_eigh(symmetric, method="jacobi")
    reference = sym_eig(symmetric, method="lapack")
    assert np.allclose(values, reference, atol=1e-9)
    assert np.all(np.diff(values) >= 0)
    assert np.allclose(vectors.T @ vectors, np.eye(20), atol=1e-10)
    assert np.allclose((vectors * values) @ vectors.T, symmetric.entries, atol=1e-9)


def test_jacobi_is_the_default(symmetric):
    """Test that sym_eig runs Jacobi unless told otherwise."""
    assert np.allclose(sym_eig(symmetric), sym_eig(symmetric, method="lapack"), atol=1e-9)
    with pytest.raises(NoConvergence, match="did not converge"):
        sym_eig(symmetric, max_sweeps=0)


def test_eigen_edge_cases(symmetric):
    """Test the zero matrix and an unknown method."""
    values = sym_eig(SymMatrix(np.zeros((4, 4))))
    assert np.array_equal(values, np.zeros(4))
    with pytest.raises(ValueError, match="Unknown eigenvalue method"):
        sym_eigh(symmetric, method="qr")


def test_sym_matrix_validation():
    """Test that only square matrices are accepted and that entries are symmetrized."""
    with pytest.raises(ValueError, match="square matrix"):
        SymMatrix(np.zeros((2, 3)))
    m = SymMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert np.array_equal(m.entries, np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_functional_calculus(rng):
    """Test square roots, inverse powers and the resolvent at one."""
    q = haar_orthogonal(16, rng)
    m = SymMatrix.from_spectrum(np.linspace(0.1, 0.9, 16), q)
    root = m.sqrt().entries
    assert np.allclose(root @ root, m.entries, atol=1e-12)
    assert np.allclose(m.inverse_power(1.0).entries @ m.entries, np.eye(16), atol=1e-10)
    resolvent = m.resolvent_one_minus().entries
    assert np.allclose(resolvent @ (np.eye(16) - m.entries), np.eye(16), atol=1e-10)
    assert m.normalized_trace() == pytest.approx(0.5)


def test_ill_conditioned_functions(rng):
    """Test that singular inverses and resolvents are refused."""
    q = haar_orthogonal(16, rng)
    singular = SymMatrix.from_spectrum(np.r_[0.0, np.ones(15)], q)
    with pytest.raises(IllConditioned, match="Smallest eigenvalue"):
        singular.inverse_power(0.5)
    with pytest.raises(IllConditioned, match="I - M"):
        singular.resolvent_one_minus()
    with pytest.raises(IllConditioned):
        SymMatrix.from_spectrum(np.r_[-1.0, np.ones(15)], q).sqrt()


def test_wishart_model(rng):
    """Test that (alpha/n) G G^T has the mean of nu(2, 1)."""
    m = sample_matrix(FreePoissonLaw(2, 1), 512, rng, "wishart")
    assert m.normalized_trace() == pytest.approx(2.0, abs=0.1)
    assert m.min_eigenvalue() > 0


def test_rotated_spectra(rng):
    """Test the iid atom frequency and the quantile mean."""
    iid = sample_matrix(FreePoissonLaw(Fraction(1, 2), 1), 512, rng, "iid")
    zeros = int(np.sum(iid.eigenvalues == 0.0))
    assert abs(zeros - 256) <= 48
    quantile = sample_matrix(FreePoissonLaw(2, 1), 256, rng, "quantile")
    assert quantile.normalized_trace() == pytest.approx(2.0, abs=0.02)


def test_sample_matrix_errors(rng):
    """Test the dimension floor and the spectrum kinds."""
    with pytest.raises(ValueError, match="n >= 16"):
        sample_matrix(FreePoissonLaw(2, 1), 8, rng)
    with pytest.raises(ValueError, match="Unknown spectrum kind"):
        sample_matrix(FreePoissonLaw(2, 1), 16, rng, "gue")
    with pytest.raises(ValueError, match="free Poisson law"):
        sample_matrix(FreeBinomialLaw(1, 2), 16, rng, "wishart")


def test_trial_streams():
    """Test that each (seed, trial) pair fixes its own stream."""
    first = trial_rng(7, 3).standard_normal(5)
    assert np.array_equal(first, trial_rng(7, 3).standard_normal(5))
    assert not np.array_equal(first, trial_rng(7, 4).standard_normal(5))
    assert not np.array_equal(first, trial_rng(8, 3).standard_normal(5))


def test_esd_distance_at_an_atom():
    """Test a single eigenvalue at the atom of nu(1/2, 1)."""
    law = FreePoissonLaw(Fraction(1, 2), 1)
    assert esd_distance([0.0], law) == pytest.approx(0.5)
    assert esd_distance([1e-12], law) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="at least one eigenvalue"):
        esd_distance([], law)


def test_esd_distance_of_samples():
    """Test that iid draws from the law are close in Kolmogorov distance."""
    law = FreePoissonLaw(Fraction(1, 2), 1)
    draws = law.sample(np.random.default_rng(1), 10000)
    assert esd_distance(draws, law) <= 0.02


def test_spectrum_of_compressed_product():
    """Test that V^(1/2) U V^(1/2) has approximately the law nu(sigma, alpha)."""
    assert spectrum_check(1, 2, 1, n=200, seed=3, spectrum="quantile") <= 0.08


def test_freeness_gap():
    """Test tr((UV)^2)/n against phi(UVUV) = 2 for beta(1, 2) and nu(3, 1)."""
    gap = freeness_gap(FreeBinomialLaw(1, 2), FreePoissonLaw(3, 1), n=200, trials=4, seed=5)
    assert abs(gap) <= 0.1


@pytest.fixture(scope="module")
def mc_params():
    """V ~ nu(3, 1) and U ~ beta(1, 2)."""
    return TheoremParams.from_laws(1, 2, 1)


def test_monte_carlo_first_characterization(mc_params):
    """Test that the trace regressions hold within their gates."""
    report = mc_regression_check(mc_params, n=128, trials=16, theorem="T1", n_max_moment=3, seed=11)
    assert report.all_passed, [e.to_dict() for e in report.estimates if not e.passed]
    assert len(report.estimates) == 8
    assert report["regression_mean_n0"].allowance > 0


def test_monte_carlo_negative_control(mc_params):
    """Test that a wrong constant is detected."""
    c, d = regression_constants(1, 2, 1, "T1")
    report = mc_regression_check(
        mc_params, n=128, trials=16, n_max_moment=1, seed=11, constants=(float(c) + 0.5, float(d))
    )
    assert not report["regression_mean_n0"].passed
    assert report["regression_mean_n0"].estimate == pytest.approx(-0.5, abs=0.15)


def test_monte_carlo_is_reproducible(mc_params):
    """Test that the report depends on the seed only, not on the worker count."""
    kwargs = dict(n=32, trials=4, theorem="T2", n_max_moment=2, seed=99)
    first = mc_regression_check(mc_params, workers=1, **kwargs)
    second = mc_regression_check(mc_params, workers=2, **kwargs)
    assert first.to_dict() == second.to_dict()
    assert [e.name for e in first.estimates][:3] == ["regression_inverse"] * 3


def test_monte_carlo_arguments(mc_params):
    """Test the bounds on the moment order and the trial count."""
    with pytest.raises(ValueError, match="0..6"):
        mc_regression_check(mc_params, n=16, trials=2, n_max_moment=7)
    with pytest.raises(ValueError, match="at least one trial"):
        mc_regression_check(mc_params, n=16, trials=0)


def test_small_spectra():
    """Test sym_eig on a diagonal matrix, a swap matrix and trace invariance."""
    assert np.allclose(sym_eig(SymMatrix(np.diag([3.0, -1.0, 2.0]))), [-1.0, 2.0, 3.0])
    assert np.allclose(sym_eig(SymMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))), [-1.0, 1.0], atol=1e-12)
    a = np.random.default_rng(8).standard_normal((8, 8))
    m = SymMatrix(a + a.T)
    values = sym_eig(m)
    assert values.sum() == pytest.approx(np.trace(m.entries), abs=1e-10)
    assert np.sum(values ** 2) == pytest.approx(np.sum(m.entries ** 2), abs=1e-9)


def test_haar_determinant_and_binomial_spectrum(rng):
    """Test det Q = +-1 and that free binomial matrices have spectrum in [0, 1]."""
    assert abs(abs(np.linalg.det(haar_orthogonal(4, rng))) - 1.0) <= 1e-10
    m = sample_matrix(FreeBinomialLaw(Fraction(1, 2), Fraction(3, 4)), 64, rng)
    assert m.min_eigenvalue() >= -1e-10 and m.max_eigenvalue() <= 1.0 + 1e-10


def test_freeness_gap_decays_like_one_over_n():
    """Test that the symmetrized gap falls with slope -1 in n on a log-log scale."""
    law_u, law_v = FreeBinomialLaw(1, 2), FreePoissonLaw(3, 1)
    sizes = np.array([64, 128, 256, 512])
    gaps = np.array([freeness_gap(law_u, law_v, int(n), trials=16, seed=5, symmetrize=True) for n in sizes])
    assert np.all(gaps > 0)
    slope = np.polyfit(np.log(sizes), np.log(gaps), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)
    # var(beta(1, 2)) = 2/27 and var(nu(3, 1)) = 3
    expected = (2 / 27) * 3 * (sizes - 2) / ((sizes - 1) * (sizes + 2))
    assert gaps == pytest.approx(expected, rel=0.1)


def test_freeness_gap_estimators_agree():
    """Test that the plain and symmetrized trace estimates share their mean."""
    law_u, law_v = FreeBinomialLaw(1, 2), FreePoissonLaw(3, 1)
    plain = freeness_gap(law_u, law_v, 64, trials=32, seed=9)
    symmetrized = freeness_gap(law_u, law_v, 64, trials=32, seed=9, symmetrize=True)
    assert plain == pytest.approx(symmetrized, abs=0.02)


def test_quantile_spectrum():
    """Test that midpoint quantiles are increasing and carry the mean of the law."""
    values = quantile_spectrum(FreePoissonLaw(3, 1), 256)
    assert np.all(np.diff(values) > 0)
    assert values.mean() == pytest.approx(3.0, abs=0.02)


def test_monte_carlo_with_caller_generator(mc_params):
    """Test that a caller-owned generator fixes the base seed of the trials."""
    kwargs = dict(n=16, trials=2, theorem="T1", n_max_moment=1)
    first = mc_regression_check(mc_params, rng=np.random.default_rng(3), **kwargs)
    second = mc_regression_check(mc_params, rng=np.random.default_rng(3), **kwargs)
    assert first.seed == second.seed == int(np.random.default_rng(3).integers(2 ** 32))
    assert [e.estimate for e in first.estimates] == [e.estimate for e in second.estimates]
    assert mc_regression_check(mc_params, rng=np.random.default_rng(3), seed=4, **kwargs).seed == 4
