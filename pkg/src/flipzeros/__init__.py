"""Zero counting for random polynomials with sign-flip symmetric coefficients."""

from .errors import ConfigError, DomainError, NumericalError
from .newton import NewtonHadamardPolygon, harmonic_v_bound, initial_root_radii, polygon, upper_hull, vertex_count
from .poly import (
    ExpPolynomialView,
    Polynomial,
    H_function,
    bar_transform,
    central_index,
    evaluate,
    exp_eval,
    h_function,
    reverse,
    s_majorant,
)
from .roots import (
    ConvergenceError,
    LipschitzCurve,
    RootSet,
    all_roots,
    count_on_curve,
    count_real,
    positive_axis,
    real_line,
    spiral,
    table_curve,
)
from .sturm import sturm_count
from .theta import (
    FlipModel,
    check_theta,
    enumerate_flips,
    greedy_pairing,
    make_median_model,
    make_symmetric_model,
    sample_flip,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "ExpPolynomialView",
    "FlipModel",
    "H_function",
    "LipschitzCurve",
    "NewtonHadamardPolygon",
    "NumericalError",
    "Polynomial",
    "RootSet",
    "all_roots",
    "bar_transform",
    "central_index",
    "check_theta",
    "count_on_curve",
    "count_real",
    "enumerate_flips",
    "evaluate",
    "exp_eval",
    "greedy_pairing",
    "h_function",
    "harmonic_v_bound",
    "initial_root_radii",
    "make_median_model",
    "make_symmetric_model",
    "polygon",
    "positive_axis",
    "real_line",
    "reverse",
    "s_majorant",
    "sample_flip",
    "spiral",
    "sturm_count",
    "table_curve",
    "upper_hull",
    "vertex_count",
]
