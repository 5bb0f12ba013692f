"""
Trace Series

Words in U and V used by the regression identities, and the generating series
of their traces computed by the free product engine.
"""

import logging
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

from ..algebra.freemoments import (
    AlgebraElement,
    FreeProductEngine,
    FunctionSpec,
    Side,
    Word,
    cumulants_from_moments,
    lemma_series,
)
from ..algebra.series import Scalar, ScalarKind, TruncatedSeries
from ..algebra.transforms import r_from_cumulants
from ..laws import FreeBinomialLaw, FreePoissonLaw
from ..report import IdentityReport
from .constants import TheoremParams

logger = logging.getLogger(__name__)


def u_power(k: int) -> AlgebraElement:
    return AlgebraElement(Side.U, FunctionSpec.power(k))


def v_power(k: int) -> AlgebraElement:
    return AlgebraElement(Side.V, FunctionSpec.power(k))


V_HALF = AlgebraElement(Side.V, FunctionSpec.half_power(1))
V_INV_HALF = AlgebraElement(Side.V, FunctionSpec.half_power(-1))
V_INV = v_power(-1)
U = u_power(1)
V = v_power(1)
RESOLVENT = AlgebraElement(Side.U, FunctionSpec.resolvent_one_minus(1))
U_RESOLVENT = AlgebraElement(Side.U, FunctionSpec(half_exponent=2, resolvent_order=1))


def vu(n: int) -> Tuple[AlgebraElement, ...]:
    """The letters of (VU)^n."""
    return (V, U) * n


def x_power(n: int) -> Tuple[AlgebraElement, ...]:
    """The letters of (V^(1/2) U V^(1/2))^n, unmerged."""
    return (V_HALF, U, V_HALF) * n


def word(*parts) -> Word:
    """Concatenate letters and letter tuples into one normalized word."""
    letters = []
    for part in parts:
        if isinstance(part, AlgebraElement):
            letters.append(part)
        else:
            letters.extend(part)
    return Word(tuple(letters))


def relative_residuals(lhs: TruncatedSeries, rhs: TruncatedSeries, start: int = 0) -> Tuple[float, ...]:
    """|lhs_k - rhs_k| / max(1, |lhs_k|, |rhs_k|) for k from start to the shared order."""
    order = min(lhs.order, rhs.order)
    out = []
    for k in range(start, order + 1):
        a, b = float(lhs[k]), float(rhs[k])
        out.append(abs(a - b) / max(1.0, abs(a), abs(b)))
    return tuple(out)


def relative_gap(a: Scalar, b: Scalar) -> float:
    a, b = float(a), float(b)
    return abs(a - b) / max(1.0, abs(a), abs(b))


class TraceSeries:
    """
    Generating series of the traces behind both regression characterizations.

    Args:
        params: Parameters of V ~ nu(lam, alpha) and U ~ beta(sigma, theta)
        order: Truncation order of every series
        node_count: Quadrature nodes per law
        method: Word evaluation method of the engine
        exact_powers: Take integer-power moments of both laws from their
            closed-form series instead of quadrature
    """

    def __init__(
        self,
        params: TheoremParams,
        order: int,
        node_count: Optional[int] = None,
        method: str = "boundary",
        exact_powers: bool = True,
    ):
        self.params = params
        self.order = order
        self.law_u = FreeBinomialLaw(params.sigma, params.theta)
        self.law_v = FreePoissonLaw(params.lam, params.alpha)
        self.engine = FreeProductEngine(
            self.law_u.discretize(node_count),
            self.law_v.discretize(node_count),
            method=method,
            exact_moments=(
                {Side.U: self.law_u.exact_moment, Side.V: self.law_v.exact_moment}
                if exact_powers else None
            ),
        )
        self._cache: Dict[str, TruncatedSeries] = {}

    def series(self, key: str, build: Callable[[int], Word], order: Optional[int] = None) -> TruncatedSeries:
        """Memoized generating series of the traces of build(n)."""
        order = self.order if order is None else order
        cache_key = f"{key}@{order}"
        if cache_key not in self._cache:
            values = [float(self.engine.moment(build(n))) for n in range(order + 1)]
            self._cache[cache_key] = TruncatedSeries.from_coeffs(values, order, ScalarKind.FLOAT)
        return self._cache[cache_key]

    def trace(self, w: Word) -> float:
        return float(self.engine.moment(w))

    # Scalars

    @cached_property
    def F(self) -> float:
        return float(self.engine.element_moment(Side.U, FunctionSpec.resolvent_one_minus(1)))

    @cached_property
    def H(self) -> float:
        return float(self.engine.element_moment(Side.U, FunctionSpec.resolvent_one_minus(2)))

    @cached_property
    def C1(self) -> float:
        return float(self.engine.element_moment(Side.V, FunctionSpec.power(-1)))

    def u_moment(self, k: int) -> float:
        return float(self.engine.element_moment(Side.U, FunctionSpec.power(k)))

    def v_moment(self, k: int) -> float:
        return float(self.engine.element_moment(Side.V, FunctionSpec.power(k)))

    # Series in the variable z

    @property
    def z(self) -> TruncatedSeries:
        return TruncatedSeries.variable(self.order, self.A.kind)

    @property
    def A(self) -> TruncatedSeries:
        """sum phi((VU)^n) z^n."""
        return self.series("A", lambda n: word(vu(n)))

    @property
    def B(self) -> TruncatedSeries:
        """sum phi(V (VU)^n) z^n."""
        return self.series("B", lambda n: word(V, vu(n)))

    @property
    def D(self) -> TruncatedSeries:
        """sum phi(U (VU)^n) z^n."""
        return self.series("D", lambda n: word(U, vu(n)))

    def G(self, i: int, order: Optional[int] = None) -> TruncatedSeries:
        """sum phi(U^i (VU)^n) z^n."""
        return self.series(f"G{i}", lambda n: word(u_power(i), vu(n)), order)

    @property
    def Gamma(self) -> TruncatedSeries:
        """sum phi((I - U)^-1 (VU)^n) z^n."""
        return self.series("Gamma", lambda n: word(RESOLVENT, vu(n)))

    @property
    def Gamma_plus(self) -> TruncatedSeries:
        """sum phi(U (I - U)^-1 (VU)^n) z^n, the sum of G_i over i >= 1."""
        return self.series("Gamma_plus", lambda n: word(U_RESOLVENT, vu(n)))

    def N(self, i: int, j: int) -> TruncatedSeries:
        """sum phi((VU)^n U^i V^-1 U^j) z^n."""
        return self.series(f"N{i},{j}", lambda n: word(vu(n), u_power(i), V_INV, u_power(j)))

    @property
    def N_first_column(self) -> TruncatedSeries:
        """sum over i of N_{i,0}: traces of (VU)^n (I - U)^-1 V^-1."""
        return self.series("N_i0", lambda n: word(vu(n), RESOLVENT, V_INV))

    @property
    def N_all(self) -> TruncatedSeries:
        """sum over i, j >= 0 of N_{i,j}: traces of (VU)^n (I - U)^-1 V^-1 (I - U)^-1."""
        return self.series("N_all", lambda n: word(vu(n), RESOLVENT, V_INV, RESOLVENT))

    @property
    def N_upper(self) -> TruncatedSeries:
        """sum over i >= 0, j >= 1 of N_{i,j}: traces of (VU)^n (I - U)^-1 V^-1 U (I - U)^-1."""
        return self.series("N_upper", lambda n: word(vu(n), RESOLVENT, V_INV, U_RESOLVENT))

    @cached_property
    def r(self) -> TruncatedSeries:
        """r-transform of V from its moments, to the working order."""
        moments = [
            self.engine.element_moment(Side.V, FunctionSpec.power(k)) for k in range(1, self.order + 2)
        ]
        return r_from_cumulants(cumulants_from_moments(moments)).series.as_float()

    @property
    def zD(self) -> TruncatedSeries:
        return self.D.shift_up().truncate(self.order)

    @cached_property
    def r_of_zD(self) -> TruncatedSeries:
        """r(z D(z))."""
        return self.r.truncate(self.order).compose(self.zD)

    @property
    def h(self) -> TruncatedSeries:
        """h(z) = z D(z) r(z D(z))."""
        return self.zD * self.r_of_zD

    @property
    def h_over_zD(self) -> TruncatedSeries:
        """h(z) / (z D(z)) by long division; its order drops by one."""
        return self.h.div_z() / self.D.truncate(self.order - 1)

    @cached_property
    def C_of_zD(self) -> TruncatedSeries:
        """C(z D(z)) with C(z) = (z + C_1)/(1 + z r(z))."""
        return lemma_series(self.r, self.C1, self.order).compose(self.zD)

    def u_moments(self, n_max: int) -> Tuple[float, ...]:
        return tuple(self.u_moment(k) for k in range(1, n_max + 1))


def add_series_check(
    report: IdentityReport,
    name: str,
    lhs: TruncatedSeries,
    rhs: TruncatedSeries,
    tolerance: float,
    start: int = 0,
    **kwargs,
) -> None:
    """Record an identity between two series by its relative coefficient residuals."""
    report.add(name, relative_residuals(lhs, rhs, start), tolerance, **kwargs)


Y_INVERSE = (V_INV_HALF, RESOLVENT, V_INV_HALF)
Y_INVERSE_SQUARE = (V_INV_HALF, RESOLVENT, V_INV, RESOLVENT, V_INV_HALF)


def mean_regression_gaps(ts: TraceSeries, constant: float, count: int) -> List[float]:
    """Gaps of phi(Y X^n) = phi(V X^n) - phi(X^(n+1)) against constant * phi(X^n), n < count."""
    gaps = []
    for n in range(count):
        lhs = ts.trace(word(V_HALF, V_HALF, x_power(n))) - ts.trace(word(x_power(n + 1)))
        gaps.append(relative_gap(lhs, constant * ts.trace(word(x_power(n)))))
    return gaps


def regression_gaps(
    ts: TraceSeries,
    letters: Tuple[AlgebraElement, ...],
    constant: float,
    count: int,
) -> List[float]:
    """Gaps of phi(letters X^n) against constant * phi(X^n), n < count."""
    return [
        relative_gap(ts.trace(word(letters, x_power(n))), constant * ts.trace(word(x_power(n))))
        for n in range(count)
    ]
