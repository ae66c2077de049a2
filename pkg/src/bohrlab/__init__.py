"""Numerical laboratory for p-Bohr radii of functions with positive real part on l_q balls."""

from .catalog import (
    BoundRecord,
    das_polydisc,
    h1p_closed_form,
    arith_from_radius,
    arith_sandwich,
    kn_bounds,
    polydisc_arith_bounds,
    radius_sandwich,
)
from .domains import INF, LqBall, OptimizerConfig, Posynomial, monomial_sup, norm_compare, posynomial_sup, s_ratio
from .engine import (
    ArithConfig,
    ArithEstimate,
    BohrParams,
    RadiusInterval,
    arith_bohr_estimate,
    bohr_sum_domain,
    bohr_sum_vector,
    class_sup,
    homogeneous_scale_check,
    radius_solve,
)
from .family import (
    TestBattery,
    TestFunction,
    axis_extremal,
    cayley_linear,
    halfplane_extremal,
    mean_compose,
    power_sum_compose,
    random_battery,
)
from .series import MultiIndex, TruncatedSeries, cayley_of, homogeneous_part, multiply, power

__version__ = "0.1.0"

__all__ = [
    "ArithConfig",
    "ArithEstimate",
    "BohrParams",
    "BoundRecord",
    "INF",
    "LqBall",
    "MultiIndex",
    "OptimizerConfig",
    "Posynomial",
    "RadiusInterval",
    "TestBattery",
    "TestFunction",
    "TruncatedSeries",
    "arith_bohr_estimate",
    "arith_from_radius",
    "arith_sandwich",
    "axis_extremal",
    "bohr_sum_domain",
    "bohr_sum_vector",
    "cayley_linear",
    "cayley_of",
    "class_sup",
    "das_polydisc",
    "h1p_closed_form",
    "halfplane_extremal",
    "homogeneous_part",
    "homogeneous_scale_check",
    "kn_bounds",
    "mean_compose",
    "monomial_sup",
    "multiply",
    "norm_compare",
    "polydisc_arith_bounds",
    "posynomial_sup",
    "power",
    "power_sum_compose",
    "radius_sandwich",
    "radius_solve",
    "random_battery",
    "s_ratio",
]
