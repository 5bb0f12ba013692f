"""
Randmat Module

This module provides random matrix models of free pairs and the Monte Carlo
checks built on them.
"""

from .matrices import SymMatrix, haar_orthogonal, quantile_spectrum, sample_matrix, sym_eig, sym_eigh
from .montecarlo import (
    McEstimate,
    McReport,
    esd_distance,
    freeness_gap,
    mc_regression_check,
    spectrum_check,
    trial_rng,
)
