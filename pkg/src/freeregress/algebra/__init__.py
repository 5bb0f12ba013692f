"""
Algebra Module

This module collects truncated series, non-crossing partitions, the free moment engine and the
transform calculus built on them.
"""

from .freemoments import (
    AlgebraElement,
    CumulantSequence,
    FreeProductEngine,
    FunctionSpec,
    JointCumulants,
    Side,
    SpectralMeasure,
    Word,
    cumulants_from_moments,
    free_word_moment,
    inverse_mixed_cumulants,
    joint_cumulant,
    measure_moment,
    moments_from_cumulants,
)
from .ncpart import NonCrossingPartition, catalan, enumerate_nc, is_noncrossing
from .series import ScalarKind, TruncatedSeries, arith, comp_inverse, compose
from .transforms import (
    MomentSeries,
    RTransform,
    STransform,
    free_add,
    free_mult,
    r_from_cumulants,
    s_from_moments,
    s_from_r,
    verify_cauchy_relation,
)
