"""Soliton tau functions with stochastic-area cross-checks.

Deterministic side: closed-form tau functions (determinant and
exponential-sum evaluations), their log-derivatives, and the KP/KdV
fields they generate.  Stochastic side: Monte Carlo estimation of
exponential functionals of Brownian areas whose exact expectations are
the same determinants, so each side independently verifies the other.
"""

from .errors import (
    CapacityError,
    ConfigError,
    DimensionError,
    DiscretizationWarning,
    DomainError,
    EnvelopeWarning,
    GridAlignmentError,
    PoleError,
    SingularMatrixError,
)
from .fields import (
    FieldGrid,
    GridAxis,
    ScatteringData,
    field_grid,
    kdv_residual,
    kp_residual,
    reflectionless_potential,
    u1,
    write_field_csv,
)
from .tauengine import (
    SolitonParams,
    TauFunction,
    TrivialFactor,
    apply_trivial_factor,
    phase_matrix,
    phases,
    tau_det,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "DimensionError",
    "DiscretizationWarning",
    "DomainError",
    "EnvelopeWarning",
    "GridAlignmentError",
    "PoleError",
    "SingularMatrixError",
    "FieldGrid",
    "GridAxis",
    "ScatteringData",
    "field_grid",
    "kdv_residual",
    "kp_residual",
    "reflectionless_potential",
    "u1",
    "write_field_csv",
    "SolitonParams",
    "TauFunction",
    "TrivialFactor",
    "apply_trivial_factor",
    "phase_matrix",
    "phases",
    "tau_det",
    "__version__",
]
