"""
Free Moments Engine

This module provides the combinatorial core: single-variable moment/cumulant
conversion, multilinear free cumulants through a moment oracle, traces of words
in two free algebras given by spectral measures, and the cumulants of the
inverse element R_n(V^-1, V, ..., V).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import combinations
from numbers import Integral
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import PARTITION_CONFIG, QUADRATURE_CONFIG
from ..errors import (
    FreeProbabilityError,
    OracleFailure,
    OrderTooLow,
    SeriesMismatch,
    SingularIntegrand,
    SizeLimitExceeded,
)
from .ncpart import enumerate_nc
from .series import Scalar, ScalarKind, TruncatedSeries, coerce_scalar, infer_kind

logger = logging.getLogger(__name__)


class Side(Enum):
    """The two free subalgebras."""
    U = "U"
    V = "V"


@dataclass(frozen=True)
class FunctionSpec:
    """
    The function x^(half_exponent/2) * (1 - x)^(-resolvent_order).

    The family is closed under multiplication, which is what word normalization
    needs when adjacent factors of one side merge.
    """

    half_exponent: int = 0
    resolvent_order: int = 0

    def __post_init__(self):
        """Validate the exponents."""
        if not isinstance(self.half_exponent, Integral):
            raise ValueError("half_exponent must be an integer")
        if not isinstance(self.resolvent_order, Integral) or self.resolvent_order < 0:
            raise ValueError("resolvent_order must be a nonnegative integer")

    @classmethod
    def power(cls, k: int) -> "FunctionSpec":
        """x^k for an integer k, possibly negative."""
        return cls(half_exponent=2 * k)

    @classmethod
    def half_power(cls, k: int) -> "FunctionSpec":
        """x^(k/2) for an odd integer k."""
        if k % 2 == 0:
            raise ValueError(f"half_power expects an odd integer, got {k}")
        return cls(half_exponent=k)

    @classmethod
    def resolvent_one_minus(cls, p: int = 1) -> "FunctionSpec":
        """(1 - x)^(-p) for a positive integer p."""
        if p < 1:
            raise ValueError(f"Resolvent order must be positive, got {p}")
        return cls(resolvent_order=p)

    @classmethod
    def identity(cls) -> "FunctionSpec":
        return cls()

    def __mul__(self, other: "FunctionSpec") -> "FunctionSpec":
        return FunctionSpec(
            self.half_exponent + other.half_exponent,
            self.resolvent_order + other.resolvent_order,
        )

    @property
    def is_identity(self) -> bool:
        return self.half_exponent == 0 and self.resolvent_order == 0

    @property
    def singular_at_zero(self) -> bool:
        return self.half_exponent < 0

    @property
    def singular_at_one(self) -> bool:
        return self.resolvent_order > 0

    def value_at(self, x: Scalar) -> Scalar:
        """Evaluate at one point, exactly when x is rational and the exponent whole."""
        if x == 0 and self.singular_at_zero:
            raise SingularIntegrand(f"{self} has a pole at 0")
        if x == 1 and self.singular_at_one:
            raise SingularIntegrand(f"{self} has a pole at 1")
        if isinstance(x, Integral):
            x = Fraction(x)

        if self.half_exponent % 2 == 0:
            value = x ** (self.half_exponent // 2) if self.half_exponent else 1
        else:
            if x < 0:
                raise SingularIntegrand(f"{self} needs a nonnegative argument, got {x}")
            value = math.sqrt(x) ** self.half_exponent
        if self.resolvent_order:
            value = value * (1 - x) ** (-self.resolvent_order)
        return value

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on quadrature nodes."""
        if self.half_exponent % 2 == 0:
            result = np.power(xs, self.half_exponent // 2)
        else:
            result = np.power(np.sqrt(xs), self.half_exponent)
        if self.resolvent_order:
            result = result * np.power(1.0 - xs, -self.resolvent_order)
        return result

    def __str__(self) -> str:
        parts = []
        if self.half_exponent:
            if self.half_exponent % 2 == 0:
                parts.append(f"x^{self.half_exponent // 2}")
            else:
                parts.append(f"x^({self.half_exponent}/2)")
        if self.resolvent_order:
            parts.append(f"(1-x)^-{self.resolvent_order}")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class AlgebraElement:
    """A function of U or of V."""

    side: Side
    spec: FunctionSpec

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        if other.side != self.side:
            raise ValueError("Only elements of one side multiply into one element")
        return AlgebraElement(self.side, self.spec * other.spec)

    def __str__(self) -> str:
        return f"{self.side.value}[{self.spec}]"


def u_element(spec: Optional[FunctionSpec] = None) -> AlgebraElement:
    return AlgebraElement(Side.U, spec or FunctionSpec.power(1))


def v_element(spec: Optional[FunctionSpec] = None) -> AlgebraElement:
    return AlgebraElement(Side.V, spec or FunctionSpec.power(1))


@dataclass(frozen=True)
class Word:
    """
    An alternating product of U-side and V-side elements.

    Words are kept in normal form: identity factors dropped, adjacent factors of
    one side merged, and (since every word is traced) the last factor folded into
    the first when both sit on the same side.
    """

    factors: Tuple[AlgebraElement, ...] = ()

    def __post_init__(self):
        """Bring the factors to normal form."""
        object.__setattr__(self, "factors", _normalize(tuple(self.factors)))

    @classmethod
    def of(cls, *elements: AlgebraElement) -> "Word":
        return cls(tuple(elements))

    def __len__(self) -> int:
        return len(self.factors)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.factors + other.factors)

    def __mul__(self, times: int) -> "Word":
        return Word(self.factors * times)

    def degree(self) -> int:
        """Number of factors on the busier side."""
        counts = {side: 0 for side in Side}
        for factor in self.factors:
            counts[factor.side] += 1
        return max(counts.values())

    def __str__(self) -> str:
        return " ".join(str(f) for f in self.factors) or "1"


def _normalize(factors: Tuple[AlgebraElement, ...]) -> Tuple[AlgebraElement, ...]:
    stack: List[AlgebraElement] = []
    for factor in factors:
        if factor.spec.is_identity:
            continue
        if stack and stack[-1].side == factor.side:
            merged = stack.pop() * factor
            if not merged.spec.is_identity:
                stack.append(merged)
        else:
            stack.append(factor)

    while len(stack) >= 2 and stack[0].side == stack[-1].side:
        merged = stack[-1] * stack[0]
        stack = stack[1:-1]
        if merged.spec.is_identity:
            # the fold can expose a new same-side pair at the seam
            stack = list(_normalize(tuple(stack)))
        else:
            stack = [merged] + stack
            if len(stack) >= 2 and stack[1].side == merged.side:
                stack = list(_normalize(tuple(stack)))
    return tuple(stack)


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """
    A compactly supported probability measure: exact atoms plus weighted nodes.

    Attributes:
        atoms: (location, mass) pairs
        node_locations: Quadrature nodes of the continuous part
        node_weights: Nonnegative weights (density times quadrature weight)
        continuous_support: Closure of the continuous part's support
    """

    atoms: Tuple[Tuple[Scalar, Scalar], ...] = ()
    node_locations: Optional[np.ndarray] = None
    node_weights: Optional[np.ndarray] = None
    continuous_support: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        """Validate masses and supports."""
        atoms = tuple((loc, mass) for loc, mass in self.atoms if mass != 0)
        for loc, mass in atoms:
            if mass < 0:
                raise ValueError(f"Atom at {loc} has negative mass {mass}")
        object.__setattr__(self, "atoms", atoms)

        if (self.node_locations is None) != (self.node_weights is None):
            raise ValueError("Node locations and weights come together")
        if self.node_locations is not None:
            xs = np.asarray(self.node_locations, dtype=float)
            ws = np.asarray(self.node_weights, dtype=float)
            if xs.shape != ws.shape or xs.ndim != 1:
                raise ValueError("Node locations and weights must be 1-d of equal length")
            if np.any(ws < 0) or not np.all(np.isfinite(ws)):
                raise ValueError("Node weights must be finite and nonnegative")
            keep = ws > 0
            xs, ws = xs[keep], ws[keep]
            object.__setattr__(self, "node_locations", xs)
            object.__setattr__(self, "node_weights", ws)
            if self.continuous_support is None and xs.size:
                object.__setattr__(self, "continuous_support", (float(xs.min()), float(xs.max())))
            if self.continuous_support is not None:
                lo, hi = self.continuous_support
                if xs.size and (xs.min() < lo or xs.max() > hi):
                    raise ValueError("Nodes fall outside the declared continuous support")

        total = self.total_mass
        if self.has_nodes or any(isinstance(v, float) for pair in atoms for v in pair):
            if abs(total - 1) > QUADRATURE_CONFIG["mass_tolerance"]:
                raise ValueError(f"Total mass {total} differs from 1")
        elif total != 1:
            raise ValueError(f"Total mass {total} differs from 1")

    @classmethod
    def point_mass(cls, location: Scalar) -> "SpectralMeasure":
        return cls(atoms=((location, 1),))

    @classmethod
    def from_atoms(cls, pairs: Sequence[Tuple[Scalar, Scalar]]) -> "SpectralMeasure":
        return cls(atoms=tuple((loc, mass) for loc, mass in pairs))

    @property
    def has_nodes(self) -> bool:
        return self.node_locations is not None and self.node_locations.size > 0

    @property
    def total_mass(self) -> Scalar:
        total = sum(mass for _, mass in self.atoms)
        if self.has_nodes:
            total = total + float(self.node_weights.sum())
        return total

    @property
    def support(self) -> Tuple[float, float]:
        """Smallest interval holding all atoms and the continuous part."""
        points = [float(loc) for loc, _ in self.atoms]
        if self.continuous_support is not None:
            points.extend(self.continuous_support)
        return min(points), max(points)


def _check_poles(mu: SpectralMeasure, spec: FunctionSpec, separation: float) -> None:
    lo, hi = mu.continuous_support
    margin = separation * max(hi - lo, np.finfo(float).tiny)
    if spec.singular_at_zero and lo - margin <= 0 <= hi + margin:
        raise SingularIntegrand(
            f"{spec} has a pole at 0 within {margin:.3g} of the support [{lo}, {hi}]"
        )
    if spec.singular_at_one and lo - margin <= 1 <= hi + margin:
        raise SingularIntegrand(
            f"{spec} has a pole at 1 within {margin:.3g} of the support [{lo}, {hi}]"
        )
    if spec.half_exponent % 2 and lo < 0:
        raise SingularIntegrand(f"{spec} needs a nonnegative support, got [{lo}, {hi}]")


def measure_moment(
    mu: SpectralMeasure,
    f: FunctionSpec,
    pole_separation: Optional[float] = None,
) -> Scalar:
    """
    Integrate f against mu: atoms summed exactly plus quadrature over the nodes.

    Args:
        mu: The measure
        f: The integrand
        pole_separation: Required distance from a pole, as a fraction of the
            continuous support width

    Returns:
        The integral; a Fraction when mu is rational and atomic and f polynomial
    """
    separation = QUADRATURE_CONFIG["pole_separation"] if pole_separation is None else pole_separation
    total = 0
    for location, mass in mu.atoms:
        total = total + mass * f.value_at(location)
    if mu.has_nodes:
        _check_poles(mu, f, separation)
        total = total + float(np.dot(mu.node_weights, f.values(mu.node_locations)))
    return total


@dataclass(frozen=True)
class CumulantSequence:
    """Free cumulants kappa_1..kappa_N of one variable."""

    values: Tuple[Scalar, ...]

    def __post_init__(self):
        """Validate length and scalar kind."""
        if len(self.values) < 1:
            raise ValueError("A cumulant sequence needs at least kappa_1")
        infer_kind(self.values)
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def kappa(self, n: int) -> Scalar:
        """The n-th cumulant, 1-based."""
        return self.values[n - 1]


class JointCumulants:
    """
    Multilinear free cumulants of tuples of handles, from a moment oracle.

    Each instance memoizes the oracle and the cumulants it has computed, so a
    family of related cumulants shares work. Instances are not thread safe.

    Args:
        oracle: Maps a tuple of handles to the trace of their ordered product
        method: "boundary" groups the partitions by the block of the first
            element; "nc" subtracts the literal sum over NC(n)
    """

    def __init__(self, oracle: Callable[[Tuple], Scalar], method: str = "boundary"):
        if method not in ("boundary", "nc"):
            raise ValueError(f"Unknown cumulant method: {method}")
        self._oracle = oracle
        self._method = method
        self._moments: Dict[Tuple, Scalar] = {}
        self._cumulants: Dict[Tuple, Scalar] = {}

    def moment(self, key: Tuple) -> Scalar:
        if not key:
            return 1
        if key not in self._moments:
            self._moments[key] = self._oracle(key)
        return self._moments[key]

    def cumulant(self, key: Tuple) -> Scalar:
        key = tuple(key)
        if not key:
            raise ValueError("Cumulants need at least one argument")
        if key in self._cumulants:
            return self._cumulants[key]

        n = len(key)
        value = self.moment(key)
        if n > 1:
            if self._method == "nc":
                value = value - self._nc_remainder(key)
            else:
                value = value - self._boundary_remainder(key)
        self._cumulants[key] = value
        return value

    def _boundary_remainder(self, key: Tuple) -> Scalar:
        n = len(key)
        total = 0
        for size in range(0, n - 1):
            for partners in combinations(range(1, n), size):
                members = (0,) + partners
                term = self.cumulant(tuple(key[i] for i in members))
                if term == 0:
                    continue
                bounds = members + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    if b - a > 1:
                        term = term * self.moment(key[a + 1:b])
                total = total + term
        return total

    def _nc_remainder(self, key: Tuple) -> Scalar:
        total = 0
        for partition in enumerate_nc(len(key)):
            if len(partition) == 1:
                continue
            term = 1
            for block in partition.blocks:
                term = term * self.cumulant(tuple(key[i - 1] for i in block))
                if term == 0:
                    break
            total = total + term
        return total


def joint_cumulant(
    elements: Sequence[Hashable],
    moments: Callable[[Tuple], Scalar],
    method: str = "boundary",
) -> Scalar:
    """
    The free cumulant R_n(a_1, ..., a_n).

    kappa(a_1..a_n) = phi(a_1..a_n) - sum over NC(n) minus the one-block
    partition of the products of cumulants over blocks, applied recursively.

    Args:
        elements: Abstract handles a_1..a_n
        moments: Oracle giving phi of any ordered sub-product, as a tuple of handles
        method: "boundary" (default) or "nc"

    Returns:
        The joint cumulant
    """
    def guarded(key: Tuple) -> Scalar:
        try:
            return moments(key)
        except FreeProbabilityError:
            raise
        except Exception as e:
            logger.error(f"Error evaluating moment oracle on {key}: {e}")
            raise OracleFailure(f"Moment oracle failed on {key}: {e}") from e

    return JointCumulants(guarded, method).cumulant(tuple(elements))


def _check_ceiling(n: int) -> None:
    if n > PARTITION_CONFIG["ceiling"]:
        raise SizeLimitExceeded(
            f"Order {n} exceeds the partition ceiling {PARTITION_CONFIG['ceiling']}"
        )


def _boundary_pass(first: Sequence[Scalar], solve_for_moments: bool) -> List[Scalar]:
    """
    Walk the boundary recursion m_n = sum_s kappa_s [z^(n-s)] M(z)^s.

    With solve_for_moments the input holds cumulants and moments come out;
    otherwise the input holds moments and cumulants come out.
    """
    n_max = len(first)
    moments: List[Scalar] = [1]
    cumulants: List[Scalar] = []
    powers: List[List[Scalar]] = [[1]]
    if not solve_for_moments:
        moments = [1] + list(first)

    for n in range(1, n_max + 1):
        for s in range(1, n + 1):
            if s == len(powers):
                powers.append([])
            j = n - s
            previous = powers[s - 1]
            value = 0
            for i in range(min(j, len(previous) - 1) + 1):
                value = value + previous[i] * moments[j - i]
            powers[s].append(value)

        if solve_for_moments:
            kappas = first
            m_n = 0
            for s in range(1, n + 1):
                m_n = m_n + kappas[s - 1] * powers[s][n - s]
            moments.append(m_n)
        else:
            rest = 0
            for s in range(1, n):
                rest = rest + cumulants[s - 1] * powers[s][n - s]
            cumulants.append(moments[n] - rest)

    return moments[1:] if solve_for_moments else cumulants


def _nc_pass(first: Sequence[Scalar], solve_for_moments: bool) -> List[Scalar]:
    n_max = len(first)
    cumulants = list(first) if solve_for_moments else []
    moments = [] if solve_for_moments else list(first)
    for n in range(1, n_max + 1):
        total = 0
        for partition in enumerate_nc(n):
            if not solve_for_moments and len(partition) == 1:
                continue
            term = 1
            for size in partition.block_sizes():
                term = term * cumulants[size - 1]
            total = total + term
        if solve_for_moments:
            moments.append(total)
        else:
            cumulants.append(moments[n - 1] - total)
    return moments if solve_for_moments else cumulants


def cumulants_from_moments(
    m: Sequence[Scalar],
    method: str = "recursion",
) -> CumulantSequence:
    """
    Free cumulants from moments m_1..m_N.

    Args:
        m: Moments m_1..m_N
        method: "recursion" (boundary grouping) or "nc" (literal NC(n) sum)

    Returns:
        kappa_1..kappa_N with m_n = sum over NC(n) of products of kappa
    """
    if len(m) < 1:
        raise ValueError("Need at least the first moment")
    infer_kind(m)
    _check_ceiling(len(m))
    if method == "nc":
        return CumulantSequence(tuple(_nc_pass(m, solve_for_moments=False)))
    if method == "recursion":
        return CumulantSequence(tuple(_boundary_pass(m, solve_for_moments=False)))
    raise ValueError(f"Unknown method: {method}")


def moments_from_cumulants(
    k: CumulantSequence,
    method: str = "nc",
) -> Tuple[Scalar, ...]:
    """
    Moments m_1..m_N from free cumulants.

    Args:
        k: Cumulants kappa_1..kappa_N
        method: "nc" (sum over NC(n)) or "recursion" (boundary recursion);
            both give the same numbers

    Returns:
        m_1..m_N
    """
    values = k.values if isinstance(k, CumulantSequence) else tuple(k)
    _check_ceiling(len(values))
    if method == "nc":
        return tuple(_nc_pass(values, solve_for_moments=True))
    if method == "recursion":
        return tuple(_boundary_pass(values, solve_for_moments=True))
    raise ValueError(f"Unknown method: {method}")


class FreeProductEngine:
    """
    Traces of words in two free algebras with given spectral measures.

    Mixed cumulants vanish, so phi(word) sums products of same-side block
    cumulants over non-crossing partitions. The default evaluation groups the
    partitions by the block of the first letter: that block's cumulant times the
    traces of the gaps between its letters, all memoized per engine.

    Args:
        mu_u: Spectral measure of U
        mu_v: Spectral measure of V
        word_ceiling: Largest admissible number of factors on one side
        method: "boundary" (default) or "nc" for the literal partition sum
        exact_moments: Per side, a hook returning phi(f(X)) in closed form or
            None to fall back to the spectral measure
    """

    def __init__(
        self,
        mu_u: SpectralMeasure,
        mu_v: SpectralMeasure,
        word_ceiling: Optional[int] = None,
        method: str = "boundary",
        exact_moments: Optional[Dict[Side, Callable[[FunctionSpec], Optional[Scalar]]]] = None,
    ):
        if method not in ("boundary", "nc"):
            raise ValueError(f"Unknown word method: {method}")
        self.measures = {Side.U: mu_u, Side.V: mu_v}
        self.exact_moments = dict(exact_moments or {})
        self.word_ceiling = QUADRATURE_CONFIG["word_ceiling"] if word_ceiling is None else word_ceiling
        self.method = method
        self._element_moments: Dict[Tuple[Side, FunctionSpec], Scalar] = {}
        self._cumulants = {
            side: JointCumulants(self._product_oracle(side)) for side in Side
        }
        self._words: Dict[Tuple[AlgebraElement, ...], Scalar] = {}

    def _product_oracle(self, side: Side) -> Callable[[Tuple[FunctionSpec, ...]], Scalar]:
        def oracle(specs: Tuple[FunctionSpec, ...]) -> Scalar:
            return self.element_moment(side, reduce(lambda a, b: a * b, specs))
        return oracle

    def element_moment(self, side: Side, spec: FunctionSpec) -> Scalar:
        """phi(f(X)) for X the variable of one side."""
        key = (side, spec)
        if key not in self._element_moments:
            hook = self.exact_moments.get(side)
            value = hook(spec) if hook is not None else None
            if value is None:
                value = measure_moment(self.measures[side], spec)
            self._element_moments[key] = value
        return self._element_moments[key]

    def block_cumulant(self, side: Side, specs: Tuple[FunctionSpec, ...]) -> Scalar:
        """Joint cumulant of commuting elements f_1(X), ..., f_k(X)."""
        return self._cumulants[side].cumulant(tuple(specs))

    def moment(self, word: Word) -> Scalar:
        """
        Trace of a word.

        Args:
            word: Any word; it is normalized on construction

        Returns:
            phi(word)
        """
        letters = word.factors
        if letters in self._words:
            return self._words[letters]

        if len(letters) == 0:
            value = 1
        elif len(letters) == 1:
            value = self.element_moment(letters[0].side, letters[0].spec)
        else:
            if word.degree() > self.word_ceiling:
                raise SizeLimitExceeded(
                    f"Word of degree {word.degree()} exceeds the ceiling {self.word_ceiling}"
                )
            if self.method == "nc":
                value = self._nc_sum(letters)
            else:
                value = self._boundary_sum(letters)

        self._words[letters] = value
        return value

    def _boundary_sum(self, letters: Tuple[AlgebraElement, ...]) -> Scalar:
        m = len(letters)
        side = letters[0].side
        partners_pool = [i for i in range(1, m) if letters[i].side == side]
        total = 0
        for size in range(len(partners_pool) + 1):
            for partners in combinations(partners_pool, size):
                members = (0,) + partners
                term = self.block_cumulant(side, tuple(letters[i].spec for i in members))
                if term == 0:
                    continue
                bounds = members + (m,)
                for a, b in zip(bounds, bounds[1:]):
                    if b - a > 1:
                        term = term * self.moment(Word(letters[a + 1:b]))
                        if term == 0:
                            break
                total = total + term
        return total

    def _nc_sum(self, letters: Tuple[AlgebraElement, ...]) -> Scalar:
        total = 0
        for partition in enumerate_nc(len(letters)):
            term = 1
            for block in partition.blocks:
                sides = {letters[i - 1].side for i in block}
                if len(sides) > 1:
                    term = 0
                    break
                term = term * self.block_cumulant(
                    sides.pop(), tuple(letters[i - 1].spec for i in block)
                )
                if term == 0:
                    break
            total = total + term
        return total

    def series(self, build: Callable[[int], Word], order: int) -> TruncatedSeries:
        """
        Generating series sum_n phi(build(n)) z^n up to z^order.

        Args:
            build: Word for each power of z
            order: Truncation degree

        Returns:
            The series; rational when every trace came out exact
        """
        values = [self.moment(build(n)) for n in range(order + 1)]
        logger.debug(f"Series of {order + 1} words, {len(self._words)} traces cached")
        return TruncatedSeries.from_coeffs(values, order)


def free_word_moment(
    w: Word,
    mu_U: SpectralMeasure,
    mu_V: SpectralMeasure,
    method: str = "boundary",
) -> Scalar:
    """
    Trace of a word in free U and V with the given distributions.

    Args:
        w: The word
        mu_U: Distribution of U
        mu_V: Distribution of V
        method: "boundary" or "nc"

    Returns:
        phi(w)
    """
    return FreeProductEngine(mu_U, mu_V, method=method).moment(w)


def lemma_series(r_V: TruncatedSeries, C1: Scalar, order: int) -> TruncatedSeries:
    """C(z) = (z + C_1) / (1 + z r(z)) to the given order."""
    if order >= 1 and r_V.order < order - 1:
        raise OrderTooLow(f"r-transform of order {r_V.order} cannot give C to order {order}")
    kind = r_V.kind
    z = TruncatedSeries.variable(order, kind)
    denominator = 1 + r_V.truncate(max(order - 1, 0)).shift_up().truncate(order)
    return (z + coerce_scalar(C1, kind)) / denominator


def inverse_mixed_cumulants(r_V: TruncatedSeries, C1: Scalar, N: int) -> Tuple[Scalar, ...]:
    """
    Cumulants C_n = R_n(V^-1, V, ..., V) from the cumulants of V.

    C_2 = 1 - C_1 R_1 and C_n = -sum_{i<n} C_i R_{n-i} for n >= 3; the result is
    checked against the expansion of (z + C_1) / (1 + z r(z)).

    Args:
        r_V: r-transform of V, coefficient j holding R_{j+1}
        C1: phi(V^-1)
        N: Number of cumulants wanted

    Returns:
        C_1..C_N
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if N >= 2 and r_V.order < N - 2:
        raise OrderTooLow(f"Need R_1..R_{N - 1}, the r-transform has order {r_V.order}")

    C1 = coerce_scalar(C1, r_V.kind)
    values = [C1]
    if N >= 2:
        values.append(1 - C1 * r_V[0])
    for n in range(3, N + 1):
        values.append(-sum(values[i - 1] * r_V[n - i - 1] for i in range(1, n)))

    if N >= 2:
        expansion = lemma_series(r_V, C1, N - 1)
        residual = max(abs(expansion[k] - values[k]) for k in range(N))
        scale = max(1.0, max(abs(float(v)) for v in values))
        exact = r_V.kind == ScalarKind.RATIONAL
        if (exact and residual != 0) or (not exact and residual > 1e-12 * scale):
            raise SeriesMismatch(
                f"Inverse cumulant recursion and series disagree by {float(residual):.3g}"
            )
    return tuple(values)
