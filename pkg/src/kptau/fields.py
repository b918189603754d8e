"""Fields built from tau functions and their PDE residuals.

The basic field is u = 2 (log tau)_{x1 x1}.  For the families produced by
:class:`kptau.tauengine.SolitonParams` this u solves the KP equation in
the variables (x1, x2, x3), and under the reduction p = eta, q = -eta
(no x2 dependence) it solves KdV in (x1, x3).  Both facts are checked
numerically through residuals normalized by the largest participating
term, so "residual 1e-15" means fifteen digits of cancellation between
independently computed derivative combinations, not smallness of u.

All derivatives of log tau come from the cumulant engine in tauengine;
nothing here differentiates numerically.
"""

import dataclasses
import io
import math

import numpy as np

from .errors import DimensionError
from .tauengine import SolitonParams, TauFunction, as_phase_point

__all__ = [
    "ScatteringData",
    "u1",
    "kp_residual",
    "kdv_residual",
    "reflectionless_potential",
    "GridAxis",
    "FieldGrid",
    "field_grid",
    "write_field_csv",
]


@dataclasses.dataclass(frozen=True)
class ScatteringData:
    """Reflectionless scattering data: decay rates eta_i > 0 (pairwise
    distinct) and norming weights m_i > 0."""

    eta: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.float64)
        m = np.asarray(self.m, dtype=np.float64)
        if eta.ndim != 1 or m.ndim != 1 or eta.size != m.size:
            raise DimensionError("eta and m must be 1-d of equal length")
        if eta.size and not (np.all(np.isfinite(eta)) and np.all(np.isfinite(m))):
            raise ValueError("eta, m must be finite")
        if np.any(eta <= 0):
            raise ValueError("eta entries must be positive")
        if np.any(m <= 0):
            raise ValueError("m entries must be positive")
        if len(np.unique(eta)) != eta.size:
            raise ValueError("eta entries must be pairwise distinct")
        eta.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "m", m)

    @property
    def n(self):
        return int(self.eta.size)

    def soliton_params(self):
        """The diagonal embedding p = eta, q = -eta."""
        return SolitonParams(p=self.eta, q=-self.eta, m=self.m)


def _u1_from_tau(tau, x):
    table = tau.log_derivative_table(x, 2, nvars=1)
    return 2.0 * table[(2,)]


def _as_tau(source, nvars):
    """Accept SolitonParams or a ready TauFunction of matching arity.

    Taking prebuilt TauFunction objects keeps repeated evaluation cheap and
    lets tests feed deliberately corrupted term data through the exact same
    residual pipeline.
    """
    if isinstance(source, TauFunction):
        if source.nvars < nvars:
            raise DimensionError(
                f"tau function has {source.nvars} variables, need >= {nvars}"
            )
        return source
    if isinstance(source, SolitonParams):
        return TauFunction(source, nvars=nvars)
    raise TypeError("source must be SolitonParams or TauFunction")


def u1(source, x):
    """u(x) = 2 d^2/dx_1^2 log tau(x).  Requires tau(x) > 0."""
    x = as_phase_point(x)
    return _u1_from_tau(_as_tau(source, x.size), x)


def kp_residual(source, x):
    """Relative KP residual at x for u = 2 (log tau)_{11}.

    The combination
        3/4 u_{22} - u_{13} + 3/2 (u_1^2 + u u_{11}) + 1/4 u_{1111}
    vanishes identically for these tau functions; the return value is that
    sum divided by the largest magnitude among its five products, so a
    genuine solution gives machine-size output regardless of the size of u.
    Empty params (n = 0, u == 0) return 0.0 exactly.
    """
    x = as_phase_point(x, 3)
    tau = _as_tau(source, 3)
    t = tau.log_derivative_table(x, 6, nvars=3)
    u = 2.0 * t[(2, 0, 0)]
    u_1 = 2.0 * t[(3, 0, 0)]
    u_11 = 2.0 * t[(4, 0, 0)]
    u_1111 = 2.0 * t[(6, 0, 0)]
    u_22 = 2.0 * t[(2, 2, 0)]
    u_13 = 2.0 * t[(3, 0, 1)]
    terms = (
        0.75 * u_22,
        -u_13,
        1.5 * u_1 * u_1,
        1.5 * u * u_11,
        0.25 * u_1111,
    )
    scale = max(abs(v) for v in terms)
    if scale == 0.0:
        return 0.0
    return math.fsum(terms) / scale


def kdv_residual(source, x, t):
    """Relative KdV residual u_t - 3/2 u u_x - 1/4 u_xxx at (x, 0, t).

    Identically zero when the modes come from :class:`ScatteringData`
    (q = -p), where the x2 dependence drops out.
    """
    point = np.array([x, 0.0, t], dtype=np.float64)
    tau = _as_tau(source, 3)
    tab = tau.log_derivative_table(point, 5, nvars=3)
    u = 2.0 * tab[(2, 0, 0)]
    u_t = 2.0 * tab[(2, 0, 1)]
    u_x = 2.0 * tab[(3, 0, 0)]
    u_xxx = 2.0 * tab[(5, 0, 0)]
    terms = (u_t, -1.5 * u * u_x, -0.25 * u_xxx)
    scale = max(abs(v) for v in terms)
    if scale == 0.0:
        return 0.0
    return math.fsum(terms) / scale


def reflectionless_potential(data, x, t=0.0):
    """u(x, t) for scattering data, i.e. u1 at the phase point (x, 0, t)."""
    params = data.soliton_params()
    return u1(params, np.array([x, 0.0, t], dtype=np.float64))


@dataclasses.dataclass(frozen=True)
class GridAxis:
    """One sweep axis: ``count`` equispaced points from start to stop."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("axis count must be >= 1")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis endpoints must be finite")

    def points(self):
        return np.linspace(self.start, self.stop, self.count)


@dataclasses.dataclass(frozen=True)
class FieldGrid:
    """Evaluated field on a tensor grid.  values.shape == per-axis counts,
    indexed in axis order (row-major)."""

    axes: tuple
    base: np.ndarray
    values: np.ndarray


# axis-name -> coordinate slot of the length-3 phase point
_AXIS_SLOTS = {"x1": 0, "x2": 1, "x3": 2, "x": 0, "t": 2}


def field_grid(source, axes, base=None):
    """Tabulate u over a tensor grid of one or more axes.

    ``source`` is either SolitonParams (axes named x1/x2/x3) or
    ScatteringData (axes named x/t, the x2 slot pinned by ``base``).
    ``base`` is the full length-3 phase point that non-swept slots keep;
    defaults to the origin.  Every value comes from the same scalar
    evaluator as :func:`u1`.
    """
    if isinstance(source, ScatteringData):
        params = source.soliton_params()
        allowed = {"x", "t"}
    elif isinstance(source, SolitonParams):
        params = source
        allowed = {"x1", "x2", "x3"}
    else:
        raise TypeError("source must be SolitonParams or ScatteringData")

    axes = tuple(axes)
    if not axes:
        raise ValueError("need at least one axis")
    names = [ax.name for ax in axes]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate axis names: {names}")
    for ax in axes:
        if ax.name not in allowed:
            raise ValueError(
                f"axis {ax.name!r} not valid for this source; allowed: "
                f"{sorted(allowed)}"
            )

    base = (
        np.zeros(3)
        if base is None
        else as_phase_point(base, 3).astype(np.float64, copy=True)
    )
    tau = TauFunction(params, nvars=3)
    slots = [_AXIS_SLOTS[ax.name] for ax in axes]
    pts = [ax.points() for ax in axes]
    shape = tuple(ax.count for ax in axes)
    values = np.empty(shape)
    point = base.copy()
    for idx in np.ndindex(shape):
        for k, slot in enumerate(slots):
            point[slot] = pts[k][idx[k]]
        values[idx] = _u1_from_tau(tau, point)
    values.setflags(write=False)
    base.setflags(write=False)
    return FieldGrid(axes=axes, base=base, values=values)


def write_field_csv(grid, destination):
    """Write a FieldGrid as CSV: one row per point, axis coordinates then
    the field value, 17 significant digits (lossless float64 round-trip).

    ``destination`` is a path or a text file object.  Returns the number
    of data rows written.
    """
    close = False
    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        fh = open(destination, "w", encoding="utf-8", newline="")
        close = True
    elif isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        fh = destination
    else:
        raise TypeError("destination must be a path or writable text file")
    try:
        names = [ax.name for ax in grid.axes]
        fh.write(",".join(names + ["u"]) + "\n")
        pts = [ax.points() for ax in grid.axes]
        rows = 0
        for idx in np.ndindex(grid.values.shape):
            coords = [pts[k][idx[k]] for k in range(len(pts))]
            row = coords + [grid.values[idx]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
            rows += 1
        return rows
    finally:
        if close:
            fh.close()
