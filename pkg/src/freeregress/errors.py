"""
Error Types

Exceptions raised by the free probability engines, laws and verifiers.
"""


class FreeProbabilityError(ValueError):
    """Base class for every domain error raised by freeregress."""


# Series arithmetic
class ScalarKindMismatch(FreeProbabilityError):
    """Rational and float scalars were mixed implicitly."""


class DivisionByZeroConstantTerm(FreeProbabilityError):
    """Series division by a divisor whose constant term is zero."""


class NonzeroConstantInnerTerm(FreeProbabilityError):
    """Composition with an inner series that does not vanish at zero."""


class NotInvertible(FreeProbabilityError):
    """Compositional inverse requested for a series that has none."""


class OrderTooLow(FreeProbabilityError):
    """A series is shorter than the computation needs."""


# Partitions
class SizeLimitExceeded(FreeProbabilityError):
    """Input size above a configured ceiling."""


class NotAPartition(FreeProbabilityError):
    """Blocks overlap, are empty, or miss elements of the ground set."""


# Moment engine
class SingularIntegrand(FreeProbabilityError):
    """The integrand has a pole on (or too close to) the support."""


class OracleFailure(FreeProbabilityError):
    """A user supplied moment oracle failed."""


class VerificationMismatch(FreeProbabilityError):
    """Two independent computations of the same quantity disagree."""


class SeriesMismatch(VerificationMismatch):
    """Two routes to the same series disagree."""


# Transforms
class ZeroMean(FreeProbabilityError):
    """S-transform requested for a variable with vanishing mean."""


# Laws
class InvalidLawParameters(FreeProbabilityError):
    """Law parameters outside the admissible region."""


class OutsideSupport(FreeProbabilityError):
    """Density evaluated outside the open continuous support."""


class AtomAtZero(FreeProbabilityError):
    """Negative moments requested for a law with mass at zero."""


class BranchAmbiguity(FreeProbabilityError):
    """Cauchy transform evaluated on its cut or at a pole."""


class SupportTouchesOne(FreeProbabilityError):
    """Resolvent at one requested while the support reaches one."""


class QuadratureMismatch(VerificationMismatch):
    """A closed form and its quadrature cross-check disagree."""


# Characterizations
class ThetaNotGreaterThanOne(FreeProbabilityError):
    """Regression constants need theta > 1."""


class InfeasibleConstants(FreeProbabilityError):
    """Regression constants outside the region the solvers accept."""


# Random matrices
class IllConditioned(FreeProbabilityError):
    """A matrix that must be inverted is numerically singular."""


class NoConvergence(FreeProbabilityError):
    """An iteration hit its cap before meeting its tolerance."""
