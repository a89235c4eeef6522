"""Numerical toolkit for the (alpha, beta)-RK resolvent condition.

The condition interpolates between the Ritt and Kreiss resolvent estimates.
The package classifies power growth, localizes spectra, verifies the bound on
matrices and measures norm sequences.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    InfeasibleGeometry,
    InsufficientData,
    OverflowGuard,
    RKError,
    SingularResolvent,
)
from .contour import diff_via_contour, norm_sequence, power_via_contour  # noqa: E402
from .growth import GrowthRegime, classify_differences, classify_powers, is_ritt  # noqa: E402
from .regions import RegionDescriptor, contains, region_for  # noqa: E402
from .rk_condition import LambdaGrid, RKParams, estimate_min_c, rk_bound, torus_bound  # noqa: E402

__all__ = [
    "DomainError", "InfeasibleGeometry", "InsufficientData", "OverflowGuard", "RKError",
    "SingularResolvent", "GrowthRegime", "classify_differences", "classify_powers", "is_ritt",
    "RegionDescriptor", "contains", "region_for", "LambdaGrid", "RKParams", "estimate_min_c",
    "rk_bound", "torus_bound", "norm_sequence", "power_via_contour", "diff_via_contour",
]
