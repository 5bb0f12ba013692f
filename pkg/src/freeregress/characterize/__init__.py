"""
Characterize Module

This module holds the regression constants, their inverse solvers, and the
identity suites that verify both regression characterizations and the forward
propositions they build on.
"""

from .constants import (
    Theorem,
    TheoremParams,
    regression_constants,
    solve_thm1,
    solve_thm2,
    theta_forms,
    x_plus_thm1,
    x_plus_thm2,
)
from .propositions import verify_lemma33, verify_prop31, verify_prop32
from .theorem1 import verify_identities_thm1
from .theorem2 import verify_identities_thm2
from .words import TraceSeries
