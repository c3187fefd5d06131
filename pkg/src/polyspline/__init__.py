"""Exact polytope volumes, polynomial integrals and cube slices via multivariate splines."""

from .errors import PolysplineError
from .exact import RadicalValue, RatMatrix, det, gram_det, maximal_minor_gcd, radical_normalize, solve
from .integrate import (
    Polynomial,
    integrate_monomial_fiber,
    integrate_monomial_hrep,
    integrate_polynomial_hrep,
    lift_exponents,
)
from .polytope import (
    HPolytope,
    VPolytope,
    brion_volume,
    enumerate_vertices,
    euclidean_fiber_volume,
    lasserre_volume,
    relative_volume,
    volume_via_T,
)
from .slices import SliceSpec, box_moment_check, box_spline, central_section_volume, eval_box_spline, good_check, slice_volume
from .tpower import (
    DirectionMatrix,
    ExpSum,
    GenericVector,
    PointClassification,
    classify_point,
    eval_E,
    eval_T_explicit,
    eval_T_recurrence,
    sample_generic_c,
)

__version__ = "0.1.0"
