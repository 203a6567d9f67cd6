"""FIMA alpha-stable toolkit.

Symmetric alpha-stable sampling, Riemann-Liouville fractional calculus, LFSM
and FIMA path simulation, and the characteristic-function dependence measure.
"""

__version__ = "0.1.0"

from .stable_core import (  # noqa: E402
    MomentSpec, RandomStream, StableLaw, abs_moment, characteristic_function, empirical_cf, sample_sas,
    stable_abs_moment,
)
from .frac_calc import (  # noqa: E402
    FracOrder, Kernel, QuadSpec, QuadratureError, b_alpha_p_norm, exp_kernel, gamma_kernel, indicator,
    indicator_kernel, lp_norm, norm_bound_constants, rl_derivative_minus, rl_integral_minus,
    rl_integral_plus, simple_function,
)
from .path_sim import (  # noqa: E402
    GridSpec, NoisePath, SamplePath, simulate_lfsm, simulate_noise, simulate_noise_ensemble, stable_integral,
)
from .fima import (  # noqa: E402
    FimaModel, PartialSumPlan, fima_direct, fima_via_lfsm, lln_ratio, stationarity_evidence,
)
from .dependence import (  # noqa: E402
    DependenceQuery, DependenceReport, asymptotic_C, build_report, dependence_grid, empirical_r,
    lrd_exponent_fit, phi_psi, r_from_I, theoretical_I, theoretical_K,
)

__all__ = [
    "MomentSpec", "RandomStream", "StableLaw", "abs_moment", "characteristic_function", "empirical_cf",
    "sample_sas", "stable_abs_moment", "FracOrder", "Kernel", "QuadSpec", "QuadratureError", "b_alpha_p_norm",
    "exp_kernel", "gamma_kernel", "indicator", "indicator_kernel", "lp_norm", "norm_bound_constants",
    "rl_derivative_minus", "rl_integral_minus", "rl_integral_plus", "simple_function", "GridSpec", "NoisePath",
    "SamplePath", "simulate_lfsm", "simulate_noise", "simulate_noise_ensemble", "stable_integral", "FimaModel",
    "PartialSumPlan", "fima_direct", "fima_via_lfsm", "lln_ratio", "stationarity_evidence", "DependenceQuery",
    "DependenceReport", "asymptotic_C", "build_report", "dependence_grid", "empirical_r", "lrd_exponent_fit",
    "phi_psi", "r_from_I", "theoretical_I", "theoretical_K",
]
