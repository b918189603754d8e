"""Stochastic verification half of the package.

Closed forms live in formulas, problem data in specs, Monte Carlo
drivers in simulate, accumulation in estimates, reproducible streams in
streams, report records in reports, and the pinned named suites in
suites.  Kernel backends (compiled extension with a pure NumPy
fallback) are chosen in backend.
"""

from .backend import active_backend, active_kernels, available_backends
from .estimates import ComplexEstimate, RunningMoments
from .formulas import (
    area_char_conditional,
    averaged_area_conditional,
    averaged_levy_conditional,
    char_determinant,
    gaussian_average_det,
    gaussian_average_det_block,
    hyperbolic_char,
    levy_char,
    levy_char_conditional,
)
from .reports import CheckReport, spec_digest, write_report
from .simulate import (
    AREA_BLOCK,
    OU_BLOCK,
    TWOD_BLOCK,
    area_endpoint_samples,
    embedded_char,
    mc_char,
    ou_exp_mean,
    ou_reduction_check,
    ou_step_bias,
    paths_from_increments,
    s_hat,
    simulate_bm,
    simulate_ou,
    stochastic_area,
)
from .specs import (
    AreaSpec,
    DiscreteMeasure,
    OUSpec,
    PathEnsembleConfig,
    StepBasis,
    char_prefactor,
    scattering_measure,
)
from .stringkernel import kernel_ratio_report, ou_cross_covariance, string_kernel
from .suites import CheckOutcome, run_suite, suite_names

__all__ = [
    "AREA_BLOCK",
    "OU_BLOCK",
    "TWOD_BLOCK",
    "AreaSpec",
    "CheckOutcome",
    "CheckReport",
    "ComplexEstimate",
    "DiscreteMeasure",
    "OUSpec",
    "PathEnsembleConfig",
    "RunningMoments",
    "StepBasis",
    "active_backend",
    "active_kernels",
    "area_char_conditional",
    "area_endpoint_samples",
    "available_backends",
    "averaged_area_conditional",
    "averaged_levy_conditional",
    "char_determinant",
    "char_prefactor",
    "embedded_char",
    "gaussian_average_det",
    "gaussian_average_det_block",
    "hyperbolic_char",
    "kernel_ratio_report",
    "levy_char",
    "levy_char_conditional",
    "mc_char",
    "ou_cross_covariance",
    "ou_exp_mean",
    "ou_reduction_check",
    "ou_step_bias",
    "paths_from_increments",
    "run_suite",
    "s_hat",
    "scattering_measure",
    "simulate_bm",
    "simulate_ou",
    "spec_digest",
    "stochastic_area",
    "string_kernel",
    "suite_names",
    "write_report",
]
