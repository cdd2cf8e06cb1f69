"""Pre-image geometry of general Dirichlet series.

Evaluation of the series and of zeta and Dirichlet L-functions, zero
location by the argument principle, lifting of w-plane paths to pre-image
curves, the strip atlas with merge trees and fundamental domains, and Bohr
lifts of the exponents.
"""

from .atlas import build_atlas, delta_components, probe_symmetric_pair
from .bohr import BohrBasis, bohr_eval, map_zero_to_bohr, prime_log_basis, shift_basis
from .lifting import LiftOptions, LiftedCurve, branch_fan, lift, lift_back, preimage_circle, preimage_real_axis
from .paths import PlanePath
from .series import (
    GeneralDirichletSeries,
    abscissa_abs,
    abscissa_conv,
    convergence_report,
    dirichlet_series,
    eval_partial,
    normalize_leading,
    tail_bound,
    zeta_series,
)
from .targets import (
    AnalyticTarget,
    dirichlet_l,
    dirichlet_l_target,
    dirichlet_polynomial_target,
    riemann_zeta,
    riemann_zeta_deriv,
    target_from_json,
    zeta_multiplier,
    zeta_target,
)
from .zeros import Rect, Zero, count_zeros, find_zeros

__version__ = "0.1.0"

__all__ = [
    "AnalyticTarget",
    "BohrBasis",
    "GeneralDirichletSeries",
    "LiftOptions",
    "LiftedCurve",
    "PlanePath",
    "Rect",
    "Zero",
    "abscissa_abs",
    "abscissa_conv",
    "bohr_eval",
    "branch_fan",
    "build_atlas",
    "convergence_report",
    "count_zeros",
    "delta_components",
    "dirichlet_l",
    "dirichlet_l_target",
    "dirichlet_polynomial_target",
    "dirichlet_series",
    "eval_partial",
    "find_zeros",
    "lift",
    "lift_back",
    "map_zero_to_bohr",
    "normalize_leading",
    "preimage_circle",
    "preimage_real_axis",
    "prime_log_basis",
    "probe_symmetric_pair",
    "riemann_zeta",
    "riemann_zeta_deriv",
    "shift_basis",
    "tail_bound",
    "target_from_json",
    "zeta_multiplier",
    "zeta_series",
    "zeta_target",
]
