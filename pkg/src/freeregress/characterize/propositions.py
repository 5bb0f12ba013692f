"""
Forward Propositions

This module checks the forward statements the characterizations rest on:

- with V ~ nu(sigma + theta, alpha) free from U ~ beta(sigma, theta), the
  pieces X = V^(1/2) U V^(1/2) and Y = V^(1/2)(I - U)V^(1/2) are free with
  X ~ nu(sigma, alpha) and Y ~ nu(theta, alpha);
- the three regressions of Y, Y^-1 and Y^-2 on X are constant;
- the cumulants R_n(V^-1, V, ..., V) follow from the r-transform of V.
"""

import logging
from itertools import product
from typing import Callable, Optional, Tuple

from ..algebra.freemoments import (
    FreeProductEngine,
    FunctionSpec,
    JointCumulants,
    Side,
    inverse_mixed_cumulants,
    joint_cumulant,
    lemma_series,
    measure_moment,
)
from ..algebra.series import Scalar, ScalarKind
from ..algebra.transforms import STransform, free_add, free_mult
from ..config import VERIFY_CONFIG
from ..errors import AtomAtZero, FreeProbabilityError
from ..laws import FreeBinomialLaw, FreePoissonLaw
from ..report import IdentityReport
from .constants import Theorem, TheoremParams, exact_scalars, regression_constants
from .words import (
    U,
    V,
    V_HALF,
    Y_INVERSE,
    Y_INVERSE_SQUARE,
    TraceSeries,
    mean_regression_gaps,
    regression_gaps,
    relative_gap,
    relative_residuals,
    vu,
    word,
    x_power,
)

logger = logging.getLogger(__name__)


def _free_pair(sigma: Scalar, theta: Scalar, alpha: Scalar, node_count: Optional[int]) -> FreeProductEngine:
    law_u = FreeBinomialLaw(sigma, theta)
    law_v = FreePoissonLaw(sigma + theta, alpha)
    return FreeProductEngine(
        law_u.discretize(node_count),
        law_v.discretize(node_count),
        exact_moments={Side.U: law_u.exact_moment, Side.V: law_v.exact_moment},
    )


def _y_expansion(engine: FreeProductEngine, n: int) -> Scalar:
    """phi(Y^n) from phi(prod (V - V^(1/2) U V^(1/2))) over the 2^n choices."""
    total = 0
    for choice in product((False, True), repeat=n):
        letters = []
        for take_u in choice:
            letters.extend((V_HALF, U, V_HALF) if take_u else (V,))
        sign = -1 if sum(choice) % 2 else 1
        total = total + sign * engine.moment(word(tuple(letters)))
    return total


def _xy_oracle(engine: FreeProductEngine) -> Callable[[Tuple[str, ...]], Scalar]:
    """Traces of products of X and Y, with Y expanded as V - X."""
    def oracle(key: Tuple[str, ...]) -> Scalar:
        slots = [("X",) if letter == "X" else ("V", "X") for letter in key]
        total = 0
        for pick in product(*slots):
            letters = []
            sign = 1
            for original, chosen in zip(key, pick):
                if chosen == "X":
                    letters.extend(x_power(1))
                    if original == "Y":
                        sign = -sign
                else:
                    letters.append(V)
            total = total + sign * engine.moment(word(tuple(letters)))
        return total
    return oracle


def verify_prop31(
    sigma: Scalar,
    theta: Scalar,
    alpha: Scalar,
    degree: Optional[int] = None,
    node_count: Optional[int] = None,
) -> IdentityReport:
    """
    Check the splitting of nu(sigma + theta, alpha) by an independent free binomial.

    Args:
        sigma: Free binomial sigma
        theta: Free binomial theta; sigma + theta must exceed 1
        alpha: Jump size
        degree: Highest moment and cumulant order K
        node_count: Quadrature nodes per law

    Returns:
        Report of the moment, mixed-cumulant and convolution checks
    """
    K = VERIFY_CONFIG["degree"] if degree is None else degree
    sigma, theta, alpha = exact_scalars(sigma, theta, alpha)
    report = IdentityReport(
        command="verify prop31",
        params={"sigma": float(sigma), "theta": float(theta), "alpha": float(alpha), "degree": K},
    )
    tolerance = VERIFY_CONFIG["tolerance_prop"]
    logger.info(f"Checking the free binomial splitting at ({sigma}, {theta}, {alpha}) to degree {K}")

    try:
        engine = _free_pair(sigma, theta, alpha, node_count)
        law_x = FreePoissonLaw(sigma, alpha)
        law_y = FreePoissonLaw(theta, alpha)
        law_u = FreeBinomialLaw(sigma, theta)
        law_v = FreePoissonLaw(sigma + theta, alpha)
        expected_x = law_x.series_moments(K)
        expected_y = law_y.series_moments(K)

        words_x = [engine.moment(word(vu(n))) for n in range(1, K + 1)]
        report.add("x_moments_words", [relative_gap(a, b) for a, b in zip(words_x, expected_x)], tolerance)

        s_v = law_v.s_transform(K - 1).series
        s_u = law_u.s_transform(K - 1).series
        if s_v.kind != s_u.kind:
            s_v, s_u = s_v.as_float(), s_u.as_float()
        from_transforms = free_mult(STransform(s_v), STransform(s_u), K).moments()
        report.add(
            "x_moments_transform",
            [relative_gap(a, b) for a, b in zip(from_transforms, expected_x)],
            tolerance,
        )

        words_y = [_y_expansion(engine, n) for n in range(1, K + 1)]
        report.add("y_moments", [relative_gap(a, b) for a, b in zip(words_y, expected_y)], tolerance)
        report.add_scalar("mean_y", relative_gap(words_y[0], theta * alpha), tolerance)

        report.add(
            "mixed_cumulants",
            _mixed_cumulant_residuals(engine, law_v, K),
            VERIFY_CONFIG["tolerance_cumulant"],
        )

        added = free_add(law_x.r_transform(K), law_y.r_transform(K))
        report.add(
            "free_add_reconstruction",
            relative_residuals(added.series, law_v.r_transform(K).series),
            tolerance,
        )
    except FreeProbabilityError as e:
        logger.error(f"Error checking the free binomial splitting: {e}")
        raise

    report.notes.append(
        f"beta(sigma, theta) has mean sigma/(sigma + theta); X follows {law_x} and Y follows {law_y}"
    )
    return report


def _mixed_cumulant_residuals(engine: FreeProductEngine, law_v: FreePoissonLaw, K: int) -> list:
    """|R_k(a_1..a_k)| over X/Y sequences that mix both letters, scaled by phi(V^k)."""
    cumulants = JointCumulants(_xy_oracle(engine))
    scales = [1.0] + [max(1.0, abs(float(m))) for m in law_v.series_moments(K)]
    residuals = []
    for k in range(2, K + 1):
        for key in product("XY", repeat=k):
            if "X" not in key or "Y" not in key:
                continue
            residuals.append(abs(float(cumulants.cumulant(key))) / scales[k])
    return residuals


def verify_prop32(
    sigma: Scalar,
    theta: Scalar,
    alpha: Scalar,
    degree: Optional[int] = None,
    node_count: Optional[int] = None,
) -> IdentityReport:
    """
    Check that Y, Y^-1 and Y^-2 have constant regressions on X.

    Args:
        sigma: Free binomial sigma
        theta: Free binomial theta, above one
        alpha: Jump size
        degree: Highest power of X
        node_count: Quadrature nodes per law

    Returns:
        Report of the three regressions and of the negative moments of Y
    """
    K = VERIFY_CONFIG["degree"] if degree is None else degree
    tolerance = VERIFY_CONFIG["tolerance_prop"]
    params = TheoremParams.from_laws(sigma, theta, alpha)
    mean, inverse = regression_constants(params.sigma, params.theta, params.alpha, Theorem.T1)
    _, inverse_square = regression_constants(params.sigma, params.theta, params.alpha, Theorem.T2)
    report = IdentityReport(
        command="verify prop32",
        params={**params.as_floats(), "degree": K},
    )
    logger.info(f"Checking constant regressions at {params.as_floats()} to degree {K}")

    try:
        ts = TraceSeries(params, K, node_count)
        report.add("regression_mean", mean_regression_gaps(ts, float(mean), K + 1), tolerance)
        report.add("regression_inverse", regression_gaps(ts, Y_INVERSE, float(inverse), K + 1), tolerance)
        report.add(
            "regression_inverse_square",
            regression_gaps(ts, Y_INVERSE_SQUARE, float(inverse_square), K + 1),
            tolerance,
        )

        law_y = FreePoissonLaw(params.theta, params.alpha)
        mu = law_y.discretize(node_count)
        report.add(
            "negative_moments",
            [
                relative_gap(inverse, measure_moment(mu, FunctionSpec.power(-1))),
                relative_gap(inverse_square, measure_moment(mu, FunctionSpec.power(-2))),
            ],
            tolerance,
        )
    except FreeProbabilityError as e:
        logger.error(f"Error checking constant regressions: {e}")
        raise

    report.result = {
        "mean": float(mean),
        "inverse": float(inverse),
        "inverse_square": float(inverse_square),
    }
    return report


def verify_lemma33(
    lam: Scalar,
    alpha: Scalar,
    N: Optional[int] = None,
    node_count: Optional[int] = None,
) -> IdentityReport:
    """
    Check the cumulants C_n = R_n(V^-1, V, ..., V) of V ~ nu(lam, alpha).

    The recursion C_2 = 1 - C_1 R_1, C_n = -sum C_i R_(n-i) is compared with the
    expansion of (z + C_1)/(1 + z r(z)), with joint cumulants from an exact moment
    oracle, and with joint cumulants from quadrature moments.

    Args:
        lam: Rate, above one
        alpha: Jump size
        N: Number of cumulants
        node_count: Quadrature nodes

    Returns:
        Report whose result carries C_1..C_N
    """
    N = VERIFY_CONFIG["order"] if N is None else N
    lam, alpha = exact_scalars(lam, alpha)
    if lam <= 1:
        raise AtomAtZero(f"phi(V^-1) diverges for lambda={lam}; lambda must exceed 1")
    report = IdentityReport(
        command="verify lemma33",
        params={"lambda": float(lam), "alpha": float(alpha), "N": N},
    )
    logger.info(f"Checking inverse mixed cumulants of nu({lam}, {alpha}) to order {N}")

    try:
        law = FreePoissonLaw(lam, alpha)
        r = law.r_transform(max(N - 1, 0)).series
        C1, _ = law.negative_moments(cross_check=False)
        C = inverse_mixed_cumulants(r, C1, N)
        exact = r.kind == ScalarKind.RATIONAL

        expansion = lemma_series(r, C1, max(N - 1, 0))
        report.add(
            "recursion_vs_series",
            [abs(float(expansion[k] - C[k])) for k in range(N)],
            0.0 if exact else 1e-12,
        )

        moments = (1,) + tuple(law.series_moments(N))

        def exact_oracle(key: Tuple[str, ...]) -> Scalar:
            power = key.count("v") - key.count("inv")
            return C1 if power == -1 else moments[power]

        mu = law.discretize(node_count)

        def quadrature_oracle(key: Tuple[str, ...]) -> Scalar:
            power = key.count("v") - key.count("inv")
            return measure_moment(mu, FunctionSpec.power(power))

        scales = [max(1.0, abs(float(m))) for m in moments]
        from_exact, from_quadrature = [], []
        for n in range(1, N + 1):
            key = ("inv",) + ("v",) * (n - 1)
            from_exact.append(abs(float(joint_cumulant(key, exact_oracle) - C[n - 1])))
            gap = float(joint_cumulant(key, quadrature_oracle)) - float(C[n - 1])
            from_quadrature.append(abs(gap) / scales[n - 1])
        report.add("recursion_vs_oracle", from_exact, 1e-10)
        report.add("recursion_vs_quadrature", from_quadrature, VERIFY_CONFIG["tolerance_cumulant"])
        report.add_scalar(
            "c1_closed_form",
            relative_gap(C1, measure_moment(mu, FunctionSpec.power(-1))),
            VERIFY_CONFIG["tolerance_thm1"],
        )
    except FreeProbabilityError as e:
        logger.error(f"Error checking inverse mixed cumulants: {e}")
        raise

    report.result = {"C": [float(value) for value in C]}
    if exact:
        report.result["C_exact"] = [str(value) for value in C]
    return report
