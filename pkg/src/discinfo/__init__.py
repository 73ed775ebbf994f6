"""Minimal errors for linear problems with continuous, discontinuous and random information."""

from .information import InformationMap, RadiusReport, kernel_basis, radius_nonadaptive, radius_recombination_check
from .randomized import (
    RandomizedEstimate,
    SphereSampler,
    avg_case_error_closed_form,
    avg_case_error_mc,
    bakhvalov_lower_bound,
    sandwich_report,
)
from .spectral_core import (
    LinearProblem,
    SingularSpectrum,
    apply_optimal_algorithm,
    brute_force_worst_error,
    make_spectrum,
    worst_case_error,
)

__version__ = "0.1.0"
