"""
Tests for the characterize module.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeregress.characterize import (
    Theorem,
    TheoremParams,
    TraceSeries,
    regression_constants,
    solve_thm1,
    solve_thm2,
    theta_forms,
    verify_identities_thm1,
    verify_identities_thm2,
    verify_lemma33,
    verify_prop31,
    verify_prop32,
    x_plus_thm1,
    x_plus_thm2,
)
from freeregress.errors import (
    AtomAtZero,
    InfeasibleConstants,
    InvalidLawParameters,
    ThetaNotGreaterThanOne,
)
from freeregress.laws import FreeBinomialLaw

positive = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=8)
above_one = st.fractions(min_value=Fraction(9, 8), max_value=5, max_denominator=8)


@pytest.fixture(scope="module")
def base_params():
    """V ~ nu(3, 1) and U ~ beta(1, 2)."""
    return TheoremParams.from_laws(1, 2, 1)


def test_regression_constants():
    """Test c = theta alpha, d = 1/(alpha(theta - 1)) and the inverse-square constant."""
    assert regression_constants(1, 2, 1, Theorem.T1) == (2, 1)
    assert regression_constants(1, 2, 1, "T2") == (1, 2)
    assert regression_constants(1, 3, 2, "T1") == (6, Fraction(1, 4))
    assert regression_constants(1, 3, 2, "T2") == (Fraction(1, 4), Fraction(3, 32))


def test_regression_constants_need_theta_above_one():
    """Test that theta <= 1 has no negative moments."""
    with pytest.raises(ThetaNotGreaterThanOne):
        regression_constants(1, 1, 1)


def test_theorem_parse():
    """Test the accepted spellings of the theorem selector."""
    assert Theorem.parse("1") == Theorem.T1
    assert Theorem.parse("t2") == Theorem.T2
    assert Theorem.parse(Theorem.T2) == Theorem.T2
    with pytest.raises(ValueError, match="Unknown theorem"):
        Theorem.parse("T3")


def test_solvers_recover_the_example():
    """Test that both solvers return nu(3, 1) and beta(1, 2) from their constants."""
    for solved in (solve_thm1(2, 1, 2), solve_thm2(1, 2, 2)):
        assert (solved.lam, solved.alpha, solved.sigma, solved.theta) == (3, 1, 1, 2)
    assert solve_thm1(2, 1, 2).F == 2


def test_upper_support_edge():
    """Test x_+ = 8/9 from both sets of constants."""
    assert x_plus_thm1(2, 1, 2) == pytest.approx(8 / 9)
    assert x_plus_thm2(1, 2, 2) == pytest.approx(8 / 9)
    assert x_plus_thm1(2, 1, 2) == pytest.approx(FreeBinomialLaw(1, 2).x_plus)


@pytest.mark.parametrize(
    "solver, constants, message",
    [
        (solve_thm1, (1, 1, 2), "cd must exceed 1"),
        (solve_thm1, (2, 1, 1), "F must exceed 1"),
        (solve_thm1, (-2, -1, 2), "d must be positive"),
        (solve_thm2, (1, 1, 2), "d must exceed c"),
        (solve_thm2, (1, 2, Fraction(1, 2)), "F must exceed 1"),
        (solve_thm2, (-1, 2, 2), "c must be positive"),
    ],
)
def test_infeasible_constants(solver, constants, message):
    """Test that constants outside the feasible region are rejected."""
    with pytest.raises(InfeasibleConstants, match=message):
        solver(*constants)


@settings(max_examples=40, deadline=None)
@given(positive, above_one, positive)
def test_solvers_invert_the_constants(sigma, theta, alpha):
    """Test that solving from the forward constants returns the parameters exactly."""
    F, _ = FreeBinomialLaw(sigma, theta).closed_form_resolvents()
    for theorem, solver in ((Theorem.T1, solve_thm1), (Theorem.T2, solve_thm2)):
        c, d = regression_constants(sigma, theta, alpha, theorem)
        solved = solver(c, d, F)
        assert (solved.sigma, solved.theta, solved.alpha) == (sigma, theta, alpha)
        assert solved.lam == sigma + theta


def test_theta_forms():
    """Test that both expressions of theta agree exactly."""
    assert theta_forms(2, 1) == (2, 2)
    first, second = theta_forms(0.75, 2.0)
    assert first == second == 3
    with pytest.raises(InfeasibleConstants):
        theta_forms(1, 1)


def test_theorem_params_validation():
    """Test the parameter region of both characterizations."""
    with pytest.raises(ThetaNotGreaterThanOne, match="theta must exceed 1"):
        TheoremParams.from_laws(1, 1, 1)
    with pytest.raises(InfeasibleConstants, match="differs from sigma"):
        TheoremParams(lam=4, alpha=1, sigma=1, theta=2)
    with pytest.raises(InfeasibleConstants, match="alpha must be positive"):
        TheoremParams.from_laws(1, 2, 0)


def test_trace_series_scalars(base_params):
    """Test F, H and phi(V^-1) from the free product engine."""
    ts = TraceSeries(base_params, 4)
    assert ts.F == pytest.approx(2.0, rel=1e-8)
    assert ts.H == pytest.approx(6.0, rel=1e-7)
    assert ts.C1 == pytest.approx(0.5, rel=1e-8)
    assert ts.A[1] == pytest.approx(1.0)


def test_prop31_splitting():
    """Test that nu(3, 1) splits into free nu(1, 1) and nu(2, 1)."""
    report = verify_prop31(1, 2, 1, degree=4)
    assert report.all_passed, [check.to_dict() for check in report.failures()]
    assert report.names()[:3] == ["x_moments_words", "x_moments_transform", "y_moments"]


def test_prop31_rejects_inadmissible_binomial():
    """Test that sigma + theta must exceed one."""
    with pytest.raises(InvalidLawParameters):
        verify_prop31(Fraction(1, 4), Fraction(1, 2), 1, degree=3)


def test_prop32_constant_regressions():
    """Test the three constant regressions at (sigma, theta, alpha) = (1, 3, 2)."""
    report = verify_prop32(1, 3, 2, degree=4)
    assert report.all_passed, [check.to_dict() for check in report.failures()]
    assert report.result == {"mean": 6.0, "inverse": 0.25, "inverse_square": 0.09375}


def test_lemma33_inverse_cumulants():
    """Test C = (1, -1, 0, ...) for nu(2, 1)."""
    report = verify_lemma33(2, 1, N=8)
    assert report.all_passed, [check.to_dict() for check in report.failures()]
    assert report.result["C_exact"] == ["1", "-1", "0", "0", "0", "0", "0", "0"]


def test_lemma33_needs_rate_above_one():
    """Test that phi(V^-1) must exist."""
    with pytest.raises(AtomAtZero, match="lambda must exceed 1"):
        verify_lemma33(1, 1, N=4)


def test_first_characterization(base_params):
    """Test every identity of the first characterization to order 6."""
    report = verify_identities_thm1(base_params, order=6)
    assert report.all_passed, [check.to_dict() for check in report.failures()]
    assert report["negative_control"].expect_zero is False
    assert report.result["recovered"] == pytest.approx(base_params.as_floats(), rel=1e-6)


def test_second_characterization(base_params):
    """Test every identity of the second characterization to order 5."""
    report = verify_identities_thm2(base_params, order=5)
    assert report.all_passed, [check.to_dict() for check in report.failures()]
    assert report.params["c"] == 1.0 and report.params["d"] == 2.0


def test_characterization_without_controls(base_params):
    """Test that the controls can be left out."""
    report = verify_identities_thm1(base_params, order=4, include_controls=False)
    assert "negative_control" not in report.names()
    assert "gamma_tail" not in report.names()


GRID = [(1, 2, 1), (2, 3, 1), (Fraction(1, 2), 3, 2)]


@pytest.mark.parametrize("sigma, theta, alpha", GRID)
def test_first_characterization_to_order_ten(sigma, theta, alpha):
    """Test that every identity of the first characterization holds to order 10."""
    report = verify_identities_thm1(TheoremParams.from_laws(sigma, theta, alpha), order=10)
    assert report.all_passed, [check.to_dict() for check in report.failures()]


@pytest.mark.parametrize("sigma, theta, alpha", GRID)
def test_second_characterization_to_order_eight(sigma, theta, alpha):
    """Test that every identity of the second characterization holds to order 8."""
    report = verify_identities_thm2(TheoremParams.from_laws(sigma, theta, alpha), order=8)
    assert report.all_passed, [check.to_dict() for check in report.failures()]


def test_lemma33_reports_coarse_quadrature():
    """Test that a quadrature too coarse for phi(V^-1) fails an identity instead of raising."""
    report = verify_lemma33(3, 1, N=4, node_count=16)
    assert not report.all_passed
    assert "c1_closed_form" in [check.name for check in report.failures()]
    assert report.result["C_exact"][0] == "1/2"
