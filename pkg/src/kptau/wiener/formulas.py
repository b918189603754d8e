"""Closed-form targets for the stochastic functionals.

Two families: scalar characteristic functions of a single planar area
(unconditional and endpoint-conditional), and n-mode determinant formulas
for the weighted coupled functional.  The determinant at the imaginary
unit has a real hyperbolic form computed independently of the general
complex-argument form, so the two can cross-check each other; the real
Gaussian-averaged determinant additionally has a doubled-dimension block
form used the same way.

Pole policy: the trigonometric determinants and product formulas have
genuine poles (sin factors, determinant zeros); evaluation within 1e-12
of one raises PoleError, a vanishing determinant raises
SingularMatrixError, and everything else is plain arithmetic.
"""

import math

import numpy as np

from .. import matcore
from ..errors import PoleError, SingularMatrixError

_POLE_ATOL = 1e-12
_SERIES_CUT = 1e-4


def _x_over_sin(x):
    """x / sin x, continuous at 0; PoleError near nonzero multiples of pi."""
    if abs(x) < _SERIES_CUT:
        x2 = x * x
        return 1.0 + x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    _check_sin_pole(x)
    return x / math.sin(x)


def _x_cot(x):
    """x * cot x, continuous at 0; PoleError near nonzero multiples of pi."""
    if abs(x) < _SERIES_CUT:
        x2 = x * x
        return 1.0 - x2 / 3.0 - x2 * x2 / 45.0
    _check_sin_pole(x)
    return x * math.cos(x) / math.sin(x)


def _check_sin_pole(x):
    near = np.pi * round(x / np.pi)
    if near != 0.0 and abs(x - near) <= _POLE_ATOL:
        raise PoleError(f"sin vanishes within {_POLE_ATOL} of {x!r}")


def _inverse_det(mat, label):
    d = matcore.det(mat)
    # Hadamard-style scale reference: a determinant this far below the
    # entry scale comes from cancellation, i.e. the target is singular to
    # working precision even when the raw pivots look fine.
    scale = max(float(np.max(np.abs(mat))), 1.0)
    if abs(d) <= 1e-12 * scale ** mat.shape[0]:
        raise SingularMatrixError(f"{label}: determinant target is singular")
    return 1.0 / d


# -- scalar planar area ------------------------------------------------


def levy_char(xi, t=1.0):
    """E[exp(i xi S_t / 2)] = 1 / cosh(xi t / 2) for the halved planar
    area S_t/2 of a standard 2-d Brownian motion on [0, t]."""
    return 1.0 / math.cosh(0.5 * float(xi) * float(t))


def levy_char_conditional(xi, x, y):
    """Endpoint-conditional version at t = 1: E[exp(i xi S/2) | W(1) =
    (x, y)].

    theta / sinh(theta) * exp((x^2 + y^2)(1 - theta coth(theta)) / 2)
    with theta = xi / 2.  The xi -> 0 limit is 1.  Only the unit time
    horizon is supported: at other t the endpoint normalization of the
    printed form stops matching the unconditional average, so offering t
    would be offering a wrong formula.
    """
    theta = 0.5 * float(xi)
    r2 = float(x) ** 2 + float(y) ** 2
    if theta == 0.0:
        return 1.0
    # theta/sinh and theta*coth via the guarded helpers' hyperbolic twins
    sh = math.sinh(theta)
    return theta / sh * math.exp(0.5 * r2 * (1.0 - theta * math.cosh(theta) / sh))


def area_char_conditional(lam, sigma, end1, end2):
    """Endpoint-conditional Gaussian-averaged characteristic value of the
    decoupled weighted functional:

        prod_l  (s_l / sin s_l) exp(-(u_l^2 + v_l^2)(s_l cot s_l - 1)/2),

    s_l = sigma lam_l, endpoints (u, v) of the l-th standard planar pair.
    Continuous at sigma lam_l -> 0; PoleError at the sin zeros.
    """
    lam = np.asarray(lam, dtype=np.float64)
    end1 = np.asarray(end1, dtype=np.float64)
    end2 = np.asarray(end2, dtype=np.float64)
    sigma = float(sigma)
    out = 1.0
    for l in range(lam.size):
        s = sigma * lam[l]
        r2 = end1[l] ** 2 + end2[l] ** 2
        out *= _x_over_sin(s) * math.exp(-0.5 * r2 * (_x_cot(s) - 1.0))
    return out


# -- n-mode determinants ------------------------------------------------


def char_determinant(spec, z):
    """Exponential moment of the coupled area functional at argument z:

        E[exp(z (areas + cross) + z^2/2 sym)]
            = det( cos(z L) + (-z C+ + i C-) sin(z L) )^-1,

    L = diag(lam).  z = i gives the oscillatory characteristic value and
    reduces to :func:`hyperbolic_char` (cos(iL) = cosh L); real z gives
    the real exponential moment, finite only while every |z| lam_l stays
    under pi/2.
    """
    z = complex(z)
    zl = z * spec.lam
    cos_d = np.diag(np.cos(zl))
    sin_d = np.diag(np.sin(zl))
    mat = cos_d + (-z * spec.cplus + 1j * spec.cminus) @ sin_d
    return _inverse_det(mat, "char_determinant")


def hyperbolic_char(spec):
    """det(cosh L + A sinh L)^-1 via real hyperbolic arithmetic.

    This is the exact expectation of the area exponential at argument i.
    Independent of :func:`char_determinant` (no complex trig), which is
    the point: the two must agree and are tested against each other.
    """
    cosh_d = matcore.diag_map(spec.lam, "cosh")
    sinh_d = matcore.diag_map(spec.lam, "sinh")
    val = _inverse_det(cosh_d + spec.a @ sinh_d, "hyperbolic_char")
    return complex(val)


def gaussian_average_det(spec, sigma):
    """Real exponential moment at sigma: det(cos(s L) + (-s C+ + i C-)
    sin(s L))^-1, s = sigma.  Real and positive on its domain (the
    complex entries cancel in the determinant); returned as complex so
    tests can assert that cancellation rather than assume it."""
    return char_determinant(spec, float(sigma))


def gaussian_average_det_block(spec, sigma):
    """Doubled-dimension real form of :func:`gaussian_average_det`:

        prod_l (s_l / sin s_l)
            * det([[D - sigma^2 B+, -sigma B-],
                   [ sigma B-,      D - sigma^2 B+]])^{-1/2},

    D = diag(s_l cot s_l), s_l = sigma lam_l, and B+/- the
    sqrt(lam)-sandwiched coupling parts.  The symmetric part enters
    quadratically in sigma (it sits under z^2/2 in the functional), the
    skew part linearly.  Agrees with the n x n complex form; kept as an
    independent consistency target (different matrix, different size,
    different branch handling).
    """
    sigma = float(sigma)
    s = sigma * spec.lam
    prefac = 1.0
    for v in s:
        prefac *= _x_over_sin(float(v))
    mdiag = np.diag([_x_cot(float(v)) for v in s])
    bp = sigma * sigma * spec.bplus
    bm = sigma * spec.bminus
    big = np.block([[mdiag - bp, bm], [-bm, mdiag - bp]])
    d = matcore.det(big)
    if abs(d.imag) > 1e-9 * max(abs(d.real), 1.0):
        raise ArithmeticError("block determinant unexpectedly non-real")
    dr = d.real
    if dr <= 0:
        raise SingularMatrixError(
            "block determinant left the positive branch; the averaged "
            "formula is outside its domain here"
        )
    return prefac / math.sqrt(dr)


# -- quadrature averages -------------------------------------------------


def _gauss_hermite(nodes):
    """Standard-normal quadrature: nodes x_i and weights summing to 1."""
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    return x, w / math.sqrt(2.0 * math.pi)


def averaged_levy_conditional(xi, nodes=64):
    """Numerically average :func:`levy_char_conditional` over its
    endpoint distribution (independent standard normals at t = 1); equals
    :func:`levy_char` analytically."""
    x, w = _gauss_hermite(nodes)
    theta = 0.5 * float(xi)
    if theta == 0.0:
        return 1.0
    # separable integrand: average exp(-r2 * beta / 2) factorizes
    beta = theta * math.cosh(theta) / math.sinh(theta) - 1.0
    one_d = float(w @ np.exp(-0.5 * beta * x * x))
    return theta / math.sinh(theta) * one_d * one_d


def averaged_area_conditional(lam, sigma, nodes=64):
    """Average :func:`area_char_conditional` over standard-normal
    endpoints; equals the decoupled (A = 0) column of
    :func:`gaussian_average_det` analytically."""
    x, w = _gauss_hermite(nodes)
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    out = 1.0
    for l in range(lam.size):
        s = float(sigma) * float(lam[l])
        beta = _x_cot(s) - 1.0
        one_d = float(w @ np.exp(-0.5 * beta * x * x))
        out *= _x_over_sin(s) * one_d * one_d
    return out
