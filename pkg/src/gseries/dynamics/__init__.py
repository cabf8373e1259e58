"""Saddle passages, Dulac series and polycycle return maps."""

from .dulac import (DulacExpansion, SectionsOutsideChart, VerificationReport, default_grid,
                    default_margin, dulac_series, fit_slope, inject_fault, ratio_basis,
                    verify_asymptotics)
from .field import (NotHyperbolic, PlanarAnalyticField, QuadraticDomain,
                    ResonantWithinTolerance, SaddleSpec, SectionPair, analyze_saddle,
                    quadratic_domain_contains)
from .mupoly import MuPoly
from .normal_form import NormalFormResult, SmallDivisor, conjugacy_defect, normal_form
from .poincare import (ChartMismatch, CornerMap, FixedPointReport, PolycycleSpec,
                       count_fixed_points, poincare_map, poincare_series)
from .transition import ChartEscape, IntegrationFailure, TransitionMap, integrate_transition

__all__ = [
    "MuPoly", "PlanarAnalyticField", "SaddleSpec", "SectionPair", "QuadraticDomain",
    "NotHyperbolic", "ResonantWithinTolerance", "analyze_saddle", "quadratic_domain_contains",
    "NormalFormResult", "SmallDivisor", "normal_form", "conjugacy_defect",
    "TransitionMap", "integrate_transition", "ChartEscape", "IntegrationFailure",
    "DulacExpansion", "dulac_series", "inject_fault", "verify_asymptotics",
    "VerificationReport", "SectionsOutsideChart", "default_grid", "default_margin",
    "fit_slope", "ratio_basis",
    "CornerMap", "PolycycleSpec", "poincare_map", "poincare_series", "count_fixed_points",
    "FixedPointReport", "ChartMismatch",
]
