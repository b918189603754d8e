"""Dense linear algebra for the small matrices used everywhere else.

Every matrix in this package is square and tiny (n stays below a few
dozen), so there is no sparsity or blocking story here.  What this module
adds over raw numpy/scipy is a consistent failure policy:

* factorizations go through LAPACK's partially pivoted LU,
* pivots are checked against ``PIVOT_RTOL`` times the largest input entry,
  so near-singular inputs raise SingularMatrixError naming the offending
  pivot instead of silently returning garbage,
* determinants never raise; a pivot at exact zero gives det == 0.

Inputs are promoted to float64 or complex128 once on entry and all returns
are fresh arrays.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionError, PoleError, SingularMatrixError

#: Relative pivot threshold below which a matrix counts as singular.
PIVOT_RTOL = 1e-12


def as_square(a, name="matrix"):
    """Validate and return ``a`` as a fresh square 2-d array.

    Real input stays float64, complex input becomes complex128.  Non-finite
    entries and non-square shapes are rejected.
    """
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square 2-d, got shape {arr.shape}")
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    arr = arr.astype(dtype, copy=True)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _lu(a):
    """LU factorization with the benign LinAlgWarning silenced.

    scipy warns on exactly-singular input; we inspect the pivots ourselves,
    so the warning is noise here.
    """
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return scipy.linalg.lu_factor(a, check_finite=False)


def _pivot_scale(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


def _check_pivots(lu, scale, name):
    d = np.abs(np.diag(lu))
    bad = np.where(d <= PIVOT_RTOL * scale)[0]
    if bad.size:
        i = int(bad[0])
        raise SingularMatrixError(
            f"{name} is singular at working precision: pivot {i} has "
            f"magnitude {d[i]:.3e} against scale {scale:.3e}"
        )


def det(a):
    """Determinant via LU.  Returns a complex scalar; never raises on
    singular input (the determinant is simply 0 there)."""
    arr = as_square(a)
    n = arr.shape[0]
    if n == 0:
        return 1 + 0j
    lu, piv = _lu(arr)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return 0j
    # permutation parity from the pivot vector
    perm_sign = 1.0
    for i, p in enumerate(piv):
        if p != i:
            perm_sign = -perm_sign
    # log-magnitude accumulation: a pivot product that overflows becomes a
    # clean signed inf instead of nan
    logmag = np.sum(np.log(np.abs(diag)))
    phase = np.prod(diag / np.abs(diag))
    with np.errstate(over="ignore"):
        return complex(perm_sign * phase * np.exp(logmag))


def solve(a, b, name="matrix"):
    """Solve ``a @ x = b`` with the shared pivot policy."""
    arr = as_square(a, name)
    rhs = np.asarray(b, dtype=arr.dtype)
    if rhs.shape[0] != arr.shape[0]:
        raise DimensionError(
            f"rhs has leading dimension {rhs.shape[0]}, expected {arr.shape[0]}"
        )
    if arr.shape[0] == 0:
        return rhs.copy()
    lu_piv = _lu(arr)
    _check_pivots(lu_piv[0], _pivot_scale(arr), name)
    return scipy.linalg.lu_solve(lu_piv, rhs, check_finite=False)


def inv(a, name="matrix"):
    """Inverse via LU solve against the identity."""
    arr = as_square(a, name)
    return solve(arr, np.eye(arr.shape[0], dtype=arr.dtype), name)


def cayley(p):
    """Cayley transform (I - P)(I + P)^-1.

    Raises SingularMatrixError when -1 is an eigenvalue of P (I + P not
    invertible).  The transform and :func:`inverse_cayley` are mutual
    inverses on their domains.
    """
    arr = as_square(p, "cayley argument")
    eye = np.eye(arr.shape[0], dtype=arr.dtype)
    # right-division form: solve (I+P)^T X^T = (I-P)^T
    return solve((eye + arr).T, (eye - arr).T, "I + P").T


def inverse_cayley(a):
    """Inverse of :func:`cayley`: A -> (I - A)(I + A)^-1 (an involution)."""
    return cayley(a)


# Named diagonal maps.  cot is the only one with poles on the real line
# away from zero; its guard lives in diag_map.
_DIAG_FUNCS = {
    "cosh": np.cosh,
    "sinh": np.sinh,
    "cos": np.cos,
    "sin": np.sin,
    "exp": np.exp,
    "neg_exp": lambda v: np.exp(-v),
    "cot": None,  # handled explicitly
}

#: Absolute distance to a pole of cot below which we refuse to evaluate.
COT_POLE_ATOL = 1e-12


def diag_map(values, kind):
    """Return diag(f(values)) for a named transcendental f.

    ``values`` is a 1-d real vector.  Supported kinds:
    cosh, sinh, cos, sin, cot, exp, neg_exp.

    cot raises PoleError when an entry is within ``COT_POLE_ATOL`` of a
    multiple of pi (including zero).
    """
    if kind not in _DIAG_FUNCS:
        raise ValueError(f"unknown diagonal map {kind!r}")
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"diag_map expects a 1-d vector, got shape {v.shape}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("diag_map input contains non-finite entries")
    if kind == "cot":
        dist = np.abs(v - np.pi * np.round(v / np.pi)) if v.size else v
        bad = np.where(dist <= COT_POLE_ATOL)[0] if v.size else []
        if len(bad):
            i = int(bad[0])
            raise PoleError(
                f"cot evaluated at entry {i} = {v[i]!r}, within "
                f"{COT_POLE_ATOL} of a pole"
            )
        return np.diag(np.cos(v) / np.sin(v))
    return np.diag(_DIAG_FUNCS[kind](v))
