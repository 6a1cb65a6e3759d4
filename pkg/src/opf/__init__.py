"""Quadratic vector fields carrying orthogonal-polynomial invariant curves."""
from .classify import Kind, classify_finite, classify_point
from .compactify import chart_u1, chart_u2, infinity_crit_points
from .darboux import DarbouxProblem, check_invariant_along_flow, solve_cofactor_relation
from .exactpoly import BiPoly, UniPoly, parse_bipoly
from .families import family, poly_of, registry
from .integrals import first_integral_v, first_integral_w
from .portrait import PortraitSpec, render_portrait
from .vfield import (QuadSystem, build_family_system, build_parametric_a, build_parametric_b,
                     invariant_curve, verify_invariant)

__version__ = "0.1.0"

__all__ = [
    "BiPoly", "DarbouxProblem", "Kind", "PortraitSpec", "QuadSystem", "UniPoly",
    "build_family_system", "build_parametric_a", "build_parametric_b", "chart_u1", "chart_u2",
    "check_invariant_along_flow", "classify_finite", "classify_point", "family",
    "first_integral_v", "first_integral_w", "infinity_crit_points", "invariant_curve",
    "parse_bipoly", "poly_of", "registry", "render_portrait", "solve_cofactor_relation",
    "verify_invariant",
]
