"""
Tests for the laws module.
"""

from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from freeregress.algebra.freemoments import FunctionSpec
from freeregress.errors import (
    AtomAtZero,
    BranchAmbiguity,
    InvalidLawParameters,
    OutsideSupport,
    SupportTouchesOne,
)
from freeregress.laws import (
    FreeBinomialLaw,
    FreePoissonLaw,
    atom_mass_by_residue,
    law_moments,
    negative_moments,
    parse_law_spec,
    parse_number,
    two_point_power,
)


@pytest.fixture
def poisson():
    """nu(2, 1)."""
    return FreePoissonLaw(2, 1)


@pytest.fixture
def binomial():
    """beta(1, 2), whose support is [0, 8/9]."""
    return FreeBinomialLaw(1, 2)


def test_free_poisson_moments(poisson):
    """Test the exact moments of nu(2, 1) and their quadrature counterparts."""
    assert poisson.series_moments(4) == (2, 6, 22, 90)
    assert law_moments(poisson, 4, method="quadrature") == pytest.approx((2, 6, 22, 90), rel=1e-7)


def test_free_binomial_moments(binomial):
    """Test m1 = sigma/s and m2 = 5/27 for beta(1, 2)."""
    assert binomial.series_moments(2) == (Fraction(1, 3), Fraction(5, 27))
    assert binomial.mean == Fraction(1, 3)
    assert law_moments(binomial, 2, method="quadrature") == pytest.approx((1 / 3, 5 / 27), rel=1e-7)


def test_unknown_moment_method(poisson):
    """Test that the moment method is validated."""
    with pytest.raises(ValueError, match="Unknown moment method"):
        law_moments(poisson, 2, method="bogus")


def test_supports(poisson, binomial):
    """Test the support endpoints of both families."""
    lo, hi = poisson.continuous_support
    assert lo == pytest.approx((1 - np.sqrt(2)) ** 2)
    assert hi == pytest.approx((1 + np.sqrt(2)) ** 2)
    assert binomial.continuous_support == pytest.approx((0.0, 8 / 9))
    assert binomial.x_plus == pytest.approx(8 / 9)


@pytest.mark.parametrize(
    "law",
    [
        FreePoissonLaw(2, 1),
        FreePoissonLaw(Fraction(1, 2), 3),
        FreeBinomialLaw(Fraction(1, 2), 2),
        FreeBinomialLaw(3, Fraction(1, 2)),
    ],
)
def test_total_mass_is_one(law):
    """Test that atoms plus the integral of the density give one."""
    lo, hi = law.continuous_support
    continuous, _ = integrate.quad(lambda x: float(law.density(x)), lo, hi, limit=200)
    atoms = sum(float(mass) for _, mass in law.atoms)
    assert continuous == pytest.approx(law.continuous_mass, abs=1e-6)
    assert continuous + atoms == pytest.approx(1.0, abs=1e-6)


def test_atoms():
    """Test the atoms at 0 and 1."""
    assert FreePoissonLaw(Fraction(1, 4), 1).atoms == ((0, Fraction(3, 4)),)
    assert FreePoissonLaw(2, 1).atoms == ()
    assert FreeBinomialLaw(Fraction(1, 2), Fraction(3, 4)).atoms == (
        (0, Fraction(1, 2)),
        (1, Fraction(1, 4)),
    )


def test_atom_mass_from_cauchy_transform():
    """Test that the residue of G at 0 is the atom of nu(1/2, 1)."""
    law = FreePoissonLaw(Fraction(1, 2), 1)
    assert atom_mass_by_residue(law, 0.0) == pytest.approx(0.5, abs=1e-8)


def test_invalid_parameters():
    """Test that parameters outside the admissible region are rejected."""
    with pytest.raises(InvalidLawParameters, match="Rate must be positive"):
        FreePoissonLaw(0, 1)
    with pytest.raises(InvalidLawParameters, match="Jump size must be positive"):
        FreePoissonLaw(1, -1)
    with pytest.raises(InvalidLawParameters, match="must exceed 1"):
        FreeBinomialLaw(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(InvalidLawParameters, match="must be positive"):
        FreeBinomialLaw(-1, 3)
    with pytest.raises(InvalidLawParameters, match="finite"):
        FreePoissonLaw(float("inf"), 1)


def test_density_outside_support(poisson):
    """Test that pointwise density evaluation refuses points off the support."""
    with pytest.raises(OutsideSupport):
        poisson.density_eval(10.0)
    assert poisson.density_eval(2.0) > 0
    assert float(poisson.density(10.0)) == 0.0


def test_density_matches_stieltjes_inversion(poisson, binomial):
    """Test -Im G(x + i eps)/pi against the closed-form density."""
    for law, x in ((poisson, 2.0), (binomial, 0.4)):
        assert law.stieltjes_density(x) == pytest.approx(law.density_eval(x), rel=1e-4)


def test_cauchy_transform_at_infinity(poisson, binomial):
    """Test that z G(z) tends to one."""
    for law in (poisson, binomial):
        z = complex(1e6, 0)
        assert (z * law.cauchy(z)).real == pytest.approx(1.0, abs=1e-5)


def test_cauchy_transform_matches_moment_expansion(poisson):
    """Test G(z) = sum m_n / z^(n+1) outside the support."""
    z = 20.0
    moments = (1,) + poisson.series_moments(40)
    expansion = sum(float(m) / z ** (n + 1) for n, m in enumerate(moments))
    assert poisson.cauchy(complex(z)).real == pytest.approx(expansion, rel=1e-10)


def test_cauchy_on_the_cut(poisson):
    """Test that G is not evaluated on its branch cut."""
    with pytest.raises(BranchAmbiguity, match="cut"):
        poisson.cauchy(complex(2.0, 0.0))


def test_negative_moments():
    """Test phi(Y^-1) and phi(Y^-2) for free Poisson laws with rate above one."""
    assert negative_moments(FreePoissonLaw(3, 2)) == (Fraction(1, 4), Fraction(3, 32))
    assert negative_moments(FreePoissonLaw(2, 1)) == (1, 2)


def test_negative_moments_need_rate_above_one():
    """Test that the negative moments diverge for lam <= 1."""
    with pytest.raises(AtomAtZero, match="lambda must exceed 1"):
        negative_moments(FreePoissonLaw(1, 1))
    with pytest.raises(InvalidLawParameters):
        negative_moments(FreeBinomialLaw(1, 2))


def test_resolvent_functionals(binomial):
    """Test F = 2 and H = 6 for beta(1, 2) by quadrature and in closed form."""
    assert binomial.closed_form_resolvents() == (2, 6)
    functionals = binomial.resolvent_functionals()
    assert functionals.F == pytest.approx(2.0, rel=1e-6)
    assert functionals.H == pytest.approx(6.0, rel=1e-6)
    assert functionals.F_closed_form == 2


def test_resolvents_need_support_away_from_one():
    """Test that theta <= 1 puts support or an atom at one."""
    with pytest.raises(SupportTouchesOne):
        FreeBinomialLaw(2, 1).resolvent_functionals()


def test_two_point_power():
    """Test that the n-th power of p delta_0 + (1 - p) delta_{1/n} is beta(n(1 - p), n p)."""
    assert two_point_power(Fraction(1, 2), 4) == FreeBinomialLaw(2, 2)
    with pytest.raises(InvalidLawParameters, match="p must lie"):
        two_point_power(0, 4)
    with pytest.raises(InvalidLawParameters, match="exceed 1"):
        two_point_power(Fraction(1, 2), 1)


def test_parse_law_spec():
    """Test law specifications with exact and float parameters."""
    assert parse_law_spec("poisson:3,1") == FreePoissonLaw(3, 1)
    assert parse_law_spec("Binomial:1/2, 2") == FreeBinomialLaw(Fraction(1, 2), 2)
    law = parse_law_spec("poisson:2.5,1")
    assert isinstance(law.lam, float) and isinstance(law.alpha, float)


@pytest.mark.parametrize(
    "spec, message",
    [
        ("gamma:1,2", "Unknown law family"),
        ("poisson:1", "two parameters"),
        ("poisson", "Cannot parse"),
        ("poisson:a,b", "Cannot parse"),
    ],
)
def test_parse_law_spec_errors(spec, message):
    """Test that malformed specifications are reported."""
    with pytest.raises(InvalidLawParameters, match=message):
        parse_law_spec(spec)


def test_parse_number():
    """Test that integers and fractions stay exact while decimals become floats."""
    assert parse_number("3") == 3 and isinstance(parse_number("3"), int)
    assert parse_number("1/2") == Fraction(1, 2)
    assert isinstance(parse_number("0.5"), float)
    assert parse_number("1e-3") == pytest.approx(0.001)


def test_cdf(poisson):
    """Test the distribution function at the ends of the support and at an atom."""
    lo, hi = poisson.continuous_support
    assert poisson.cdf(lo - 1) == 0.0
    assert poisson.cdf(hi + 1) == pytest.approx(1.0)
    values = poisson.cdf(np.linspace(lo, hi, 50))
    assert np.all(np.diff(values) >= 0)
    assert FreePoissonLaw(Fraction(1, 2), 1).cdf(0.0) == pytest.approx(0.5)


def test_sampling_mean(poisson):
    """Test the sample mean and the atom frequency of draws."""
    rng = np.random.default_rng(0)
    draws = poisson.sample(rng, 20000)
    assert draws.mean() == pytest.approx(2.0, abs=0.05)
    atom_draws = FreePoissonLaw(Fraction(1, 2), 1).sample(rng, 20000)
    assert np.mean(atom_draws == 0.0) == pytest.approx(0.5, abs=0.02)
    assert isinstance(poisson.sample(rng), float)


def test_exact_moment_hook(poisson):
    """Test that integer powers come from the closed form and other functions do not."""
    assert poisson.exact_moment(FunctionSpec.power(2)) == 6
    assert poisson.exact_moment(FunctionSpec.identity()) == 1
    assert poisson.exact_moment(FunctionSpec.power(-1)) is None
    assert poisson.exact_moment(FunctionSpec.half_power(1)) is None
    assert poisson.exact_moment(FunctionSpec.resolvent_one_minus(1)) is None


def test_density_table(binomial):
    """Test that the exported grid is increasing and strictly inside the support."""
    xs, ys = binomial.density_table(points=50)
    assert len(xs) == 50
    assert np.all(np.diff(xs) > 0)
    assert xs[0] > 0 and xs[-1] < 8 / 9
    assert np.all(ys > 0)
