"""Bridge from soliton data to the area-functional determinants.

The cross-pole matrix P[i, j] = 1/(p_i - q_j) of an n-mode family maps
through the Cayley transform A = (I - P)(I + P)^{-1}, together with the
diagonal weights L(x) = diag(-(xi_i(x) + log m_i)/2), onto the same
hyperbolic determinant the stochastic estimators certify:

    det(cosh L + A sinh L)
        = 2^{-n} det(I + A) exp(-(1/2) sum_i (xi_i + log m_i)) tau(x).

The left side is the reciprocal of an exponential-moment expectation;
tau(x) on the right is the plain determinant evaluation.  Checking the
identity numerically ties the deterministic half of the package to the
Monte Carlo half through nothing but linear algebra.
"""

import math

import numpy as np

from . import matcore, tauengine
from .errors import DimensionError, DomainError
from .wiener.simulate import mc_char
from .wiener.specs import AreaSpec

__all__ = [
    "cross_pole_matrix",
    "soliton_coupling",
    "soliton_weights",
    "determinant_link",
    "link_residual",
    "soliton_area_spec",
    "run_link_check",
]


def cross_pole_matrix(params):
    """P[i, j] = 1/(p_i - q_j) (pairwise distinctness is enforced by the
    parameter container, so every entry is finite)."""
    if params.n == 0:
        raise DimensionError("need at least one mode")
    return 1.0 / (params.p[:, None] - params.q[None, :])


def soliton_coupling(params):
    """Cayley transform A of the cross-pole matrix.

    Raises SingularMatrixError when I + P fails the pivot check, which
    is the regime where the link below is meaningless anyway.
    """
    return matcore.cayley(cross_pole_matrix(params))


def soliton_weights(params, x):
    """Diagonal of L(x): -(xi_i(x) + log m_i)/2."""
    xi = tauengine.phases(params, x)
    return -0.5 * (xi + np.log(params.m))


def determinant_link(params, x):
    """Both sides of the identity, as (hyperbolic side, tau side).

    Sides are computed through disjoint code paths: the left through the
    coupling matrix and an LU determinant, the right through the tau
    determinant and scalar factors.
    """
    x = tauengine.as_phase_point(x)
    n = params.n
    lam = soliton_weights(params, x)
    acoup = soliton_coupling(params)
    lhs = matcore.det(
        np.diag(np.cosh(lam)) + acoup @ np.diag(np.sinh(lam))
    )
    prefactor = float(
        matcore.det(np.eye(n) + acoup).real
    ) * 2.0**-n
    total = float(np.sum(tauengine.phases(params, x) + np.log(params.m)))
    rhs = prefactor * math.exp(-0.5 * total) * tauengine.tau_det(params, x)
    return float(lhs.real), float(rhs)


def link_residual(params, x):
    """Relative discrepancy |lhs - rhs| / max(|lhs|, |rhs|)."""
    lhs, rhs = determinant_link(params, x)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return abs(lhs - rhs) / scale


def soliton_area_spec(params, x):
    """The AreaSpec whose z = i characteristic value inverts the left
    side of the identity.

    Defined only where every weight is positive; elsewhere the
    stochastic construction has no positive diffusion coefficients and
    DomainError is raised (the algebraic identity itself still holds).
    """
    lam = soliton_weights(params, x)
    if np.any(lam <= 0):
        raise DomainError(
            "soliton weights must be positive for the stochastic side; "
            f"got minimum {float(lam.min()) + 0.0:.6g}"
        )
    return AreaSpec(lam=lam, a=soliton_coupling(params))


def run_link_check(params, x, config=None, *, tol=1e-10, workers=1,
                   kernels=None):
    """Verify the identity at one phase point; optionally certify the
    determinant stochastically.

    Always computes the exact two-sided comparison.  When config is
    given and the weights fall in the positive trusted envelope, also
    estimates E[exp(s_hat(i))] and scores it against 1/det.  Returns a
    plain dict ready for report serialization.
    """
    x = tauengine.as_phase_point(x)
    lhs, rhs = determinant_link(params, x)
    scale = max(abs(lhs), abs(rhs))
    rel = abs(lhs - rhs) / scale if scale else 0.0
    out = {
        "det_value": lhs,
        "tau_value": rhs,
        "rel_error": rel,
        "tol": float(tol),
        "identity_passed": rel <= tol,
        "mc": None,
    }
    if config is None:
        return out
    try:
        spec = soliton_area_spec(params, x)
    except DomainError as exc:
        out["mc_skipped"] = str(exc)
        return out
    if not spec.within_envelope():
        out["mc_skipped"] = "weights outside the trusted envelope"
        return out
    est = mc_char(spec, 1j, config, workers=workers, kernels=kernels)
    target = 1.0 / lhs
    out["mc"] = {
        "estimate": est,
        "target": target,
        "max_abs_z": est.max_abs_z(target),
        "spec": spec,
    }
    return out
