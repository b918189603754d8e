"""Tau functions of multi-soliton type as finite exponential sums.

A soliton family is specified by mode parameters (p_i, q_i, m_i).  Its tau
function admits two evaluations that this package keeps deliberately
separate:

* a determinant, det(I + G) with the Cauchy-like interaction matrix
  G_ij = sqrt(m_i m_j) / (p_i - q_j) * exp((xi_i + xi_j)/2), and
* an expansion over subsets of modes, tau(x) = sum_J w_J exp(<g_J, x>),
  where the subset weight collects two-mode interaction factors and the
  exponent vector is g_J[l] = sum_{i in J} (p_i^l - q_i^l).

The expansion is what everything downstream consumes: phase-shifted
evaluation, arbitrary mixed partial derivatives, and derivatives of
log tau.  Log-derivatives are computed through the cumulant route: the
normalized term weights at a point form a discrete probability (softmax of
the phases), log tau derivatives are polynomial combinations of its central
moments, and that formulation stays accurate even when the phases span many
orders of magnitude, where naive quotient recursions lose most digits.

Phase points are plain 1-d float vectors x = (x_1, ..., x_L); the engine
treats L as the number of active flow variables (3 covers the equations in
:mod:`kptau.fields`, higher L is allowed up to the capacity bounds).
"""

import dataclasses
import itertools
import math

import numpy as np

from . import matcore
from .errors import CapacityError, DimensionError, DomainError

#: Hard ceiling on the number of modes; the expansion has 2**n terms.
MAX_MODES = 20
#: Hard ceiling on the total order of any requested derivative.
MAX_ORDER = 6


def _vector(v, name, dtype=np.float64):
    arr = np.asarray(v, dtype=dtype)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_phase_point(x, length=None):
    """Validate a phase point: finite 1-d float vector, optionally of a
    required length."""
    arr = _vector(x, "phase point")
    if length is not None and arr.size != length:
        raise DimensionError(f"phase point has length {arr.size}, expected {length}")
    return arr


@dataclasses.dataclass(frozen=True)
class SolitonParams:
    """Mode data (p_i, q_i, m_i), i = 1..n.

    Requirements: all m_i > 0, the p_i pairwise distinct, the q_i pairwise
    distinct, and p_i != q_j for every pair.  n = 0 is allowed and gives
    the constant tau == 1.
    """

    p: np.ndarray
    q: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        p = _vector(self.p, "p")
        q = _vector(self.q, "q")
        m = _vector(self.m, "m")
        if not (p.size == q.size == m.size):
            raise DimensionError(
                f"p, q, m must share a length, got {p.size}, {q.size}, {m.size}"
            )
        if np.any(m <= 0):
            raise ValueError("all mode weights m_i must be positive")
        n = p.size
        if n > 1:
            if len(np.unique(p)) != n:
                raise ValueError("p entries must be pairwise distinct")
            if len(np.unique(q)) != n:
                raise ValueError("q entries must be pairwise distinct")
        if n and np.any(p[:, None] == q[None, :]):
            raise ValueError("p_i == q_j is not allowed")
        for name, arr in (("p", p), ("q", q), ("m", m)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return int(self.p.size)

    def payload(self):
        """Plain-types view used for config digests."""
        return {
            "p": [float(v) for v in self.p],
            "q": [float(v) for v in self.q],
            "m": [float(v) for v in self.m],
        }


@dataclasses.dataclass(frozen=True)
class TrivialFactor:
    """Multiplicative factor C * exp(<shift, x>) with C != 0.

    Multiplying a tau function by one of these changes none of the second
    or higher log-derivatives, hence none of the fields built from them.
    """

    scale: float
    shift: np.ndarray

    def __post_init__(self):
        scale = float(self.scale)
        if scale == 0 or not math.isfinite(scale):
            raise ValueError("scale must be finite and nonzero")
        shift = _vector(self.shift, "shift")
        shift.setflags(write=False)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "shift", shift)

    def value(self, x):
        x = as_phase_point(x, self.shift.size)
        return self.scale * math.exp(float(self.shift @ x))


def phase_matrix(params, nvars):
    """Exponent matrix PW[i, l-1] = p_i^l - q_i^l, l = 1..nvars."""
    if nvars < 1:
        raise DimensionError("nvars must be >= 1")
    powers = np.arange(1, nvars + 1)
    return params.p[:, None] ** powers - params.q[:, None] ** powers


def phases(params, x):
    """Vector of mode phases xi_i(x) = sum_l (p_i^l - q_i^l) x_l."""
    x = as_phase_point(x)
    return phase_matrix(params, x.size) @ x


def tau_det(params, x):
    """Determinant evaluation det(I + G) at the phase point x.

    Independent of the subset expansion: builds the interaction matrix
    explicitly and goes through the LU determinant.
    """
    x = as_phase_point(x)
    n = params.n
    if n == 0:
        return 1.0
    xi = phases(params, x)
    half = 0.5 * (xi[:, None] + xi[None, :])
    g = np.sqrt(params.m[:, None] * params.m[None, :]) / (
        params.p[:, None] - params.q[None, :]
    )
    val = matcore.det(np.eye(n) + g * np.exp(half))
    return float(val.real)


def _subset_terms(params, nvars):
    """Vectorized subset expansion: (signs, log_weights, exponents).

    Every subset J of modes contributes weight
        prod_{i in J} m_i/(p_i - q_i)
        * prod_{i<j in J} (p_i-p_j)(q_i-q_j) / ((p_i-q_j)(q_i-p_j))
    carried as sign plus log-magnitude so huge and tiny weights coexist.
    """
    n = params.n
    count = 1 << n
    pw = phase_matrix(params, nvars) if n else np.zeros((0, nvars))
    if n == 0:
        return (
            np.ones(1),
            np.zeros(1),
            np.zeros((1, nvars)),
        )
    # bits[t, i] == 1 iff mode i belongs to subset t
    bits = (np.arange(count)[:, None] >> np.arange(n)[None, :]) & 1
    bits = bits.astype(np.float64)

    single = params.m / (params.p - params.q)
    logw = bits @ np.log(np.abs(single))
    neg = bits @ (single < 0).astype(np.float64)

    for i in range(n):
        for j in range(i + 1, n):
            f = (
                (params.p[i] - params.p[j])
                * (params.q[i] - params.q[j])
                / ((params.p[i] - params.q[j]) * (params.q[i] - params.p[j]))
            )
            both = bits[:, i] * bits[:, j]
            logw += both * math.log(abs(f))
            if f < 0:
                neg += both
    signs = 1.0 - 2.0 * (neg.astype(np.int64) & 1)
    expon = bits @ pw
    return signs, logw, expon


class TauFunction:
    """A tau function held as its finite exponential-sum expansion.

    Instances are immutable.  ``nvars`` fixes the phase-point length the
    instance accepts.
    """

    def __init__(self, params, nvars=3):
        if not isinstance(params, SolitonParams):
            params = SolitonParams(*params)
        if params.n > MAX_MODES:
            raise CapacityError(
                f"{params.n} modes exceeds the supported maximum {MAX_MODES}"
            )
        signs, logw, expon = _subset_terms(params, nvars)
        self._init_terms(signs, logw, expon)
        self.params = params

    @classmethod
    def from_terms(cls, signs, log_weights, exponents):
        """Build directly from term data (used for factored variants and
        perturbation tests).  Rows: one term each; exponents is (T, L)."""
        self = cls.__new__(cls)
        self._init_terms(
            np.asarray(signs, dtype=np.float64).copy(),
            np.asarray(log_weights, dtype=np.float64).copy(),
            np.asarray(exponents, dtype=np.float64).copy(),
        )
        self.params = None
        return self

    def _init_terms(self, signs, logw, expon):
        if expon.ndim != 2 or signs.shape != logw.shape or signs.shape != expon.shape[:1]:
            raise DimensionError("inconsistent term arrays")
        if not np.all(np.abs(signs) == 1.0):
            raise ValueError("signs must be +1 or -1")
        for arr in (signs, logw, expon):
            arr.setflags(write=False)
        self.signs = signs
        self.log_weights = logw
        self.exponents = expon

    @property
    def n_terms(self):
        return int(self.signs.size)

    @property
    def nvars(self):
        return int(self.exponents.shape[1])

    # -- evaluation ----------------------------------------------------

    def _shifted(self, x):
        """Phase-shifted term logs: t_T = log w_T + <g_T, x>, max removed."""
        x = as_phase_point(x, self.nvars)
        t = self.exponents @ x + self.log_weights
        tmax = float(t.max())
        return t - tmax, tmax

    def log_value(self, x):
        """Return (log |tau(x)|, sign).  sign is +-1.0, or 0.0 when the
        terms cancel exactly."""
        t, tmax = self._shifted(x)
        z = float(self.signs @ np.exp(t))
        if z == 0.0:
            return -math.inf, 0.0
        return tmax + math.log(abs(z)), math.copysign(1.0, z)

    def value(self, x):
        logv, sign = self.log_value(x)
        if sign == 0.0:
            return 0.0
        return sign * math.exp(logv)

    def derivative(self, x, alpha):
        """Mixed partial d^alpha tau / dx^alpha evaluated exactly from the
        expansion: each term picks up prod_l g_T[l]^alpha_l."""
        alpha = self._check_alpha(alpha)
        t, tmax = self._shifted(x)
        poly = np.ones(self.n_terms)
        for l, a in enumerate(alpha):
            if a:
                poly *= self.exponents[:, l] ** a
        return float((self.signs * poly) @ np.exp(t)) * math.exp(tmax)

    def _check_alpha(self, alpha):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise DimensionError(
                f"alpha has length {len(alpha)}, expected {self.nvars}"
            )
        if any(a < 0 for a in alpha):
            raise ValueError("derivative orders must be nonnegative")
        if sum(alpha) > MAX_ORDER:
            raise CapacityError(
                f"total derivative order {sum(alpha)} exceeds {MAX_ORDER}"
            )
        return alpha

    # -- log-derivatives via term-weight cumulants ---------------------

    def log_derivative_table(self, x, max_order, nvars=None):
        """All log tau derivatives of total order <= max_order.

        Returns a dict keyed by multi-indices over the first ``nvars``
        variables (default: all of them); the zero index maps to log tau.
        Requires tau(x) > 0, else DomainError.

        The normalized term weights pi_T = w_T e^{<g_T,x>} / tau form a
        signed softmax distribution; with gbar its mean exponent and mu
        its central moments, log-derivatives follow from the recursion
        l_alpha = mu_alpha - sum_{0<gamma<=beta} C(beta,gamma) mu_gamma
        l_{beta-gamma+e_j}, beta = alpha - e_j.  All inputs to the
        recursion are O(spread of exponents), so no large-phase
        cancellation occurs.
        """
        if nvars is None:
            nvars = self.nvars
        if not 1 <= nvars <= self.nvars:
            raise DimensionError(f"nvars must be in 1..{self.nvars}")
        max_order = int(max_order)
        if max_order < 1:
            raise ValueError("max_order must be >= 1")
        if max_order > MAX_ORDER:
            raise CapacityError(f"max_order {max_order} exceeds {MAX_ORDER}")

        t, tmax = self._shifted(x)
        w = self.signs * np.exp(t)
        z = float(w.sum())
        if z <= 0.0:
            raise DomainError(
                "tau is not positive at this phase point; log-derivatives "
                "are undefined"
            )
        pi = w / z
        g = self.exponents[:, :nvars]
        gbar = pi @ g
        gc = g - gbar

        # central moments, all orders at once via cached componentwise powers
        pows = [
            [np.ones(self.n_terms)] + [gc[:, v] ** k for k in range(1, max_order + 1)]
            for v in range(nvars)
        ]
        indices = [
            a
            for a in itertools.product(range(max_order + 1), repeat=nvars)
            if 1 <= sum(a) <= max_order
        ]
        mu = {(0,) * nvars: 1.0}
        for a in indices:
            prod = pows[0][a[0]].copy()
            for v in range(1, nvars):
                if a[v]:
                    prod *= pows[v][a[v]]
            mu[a] = float(pi @ prod)

        table = {(0,) * nvars: tmax + math.log(z)}
        for a in sorted(indices, key=sum):
            if sum(a) == 1:
                table[a] = float(gbar[a.index(1)])
                continue
            j = next(i for i, v in enumerate(a) if v)
            beta = list(a)
            beta[j] -= 1
            beta = tuple(beta)
            acc = mu[a]
            for gamma in itertools.product(*(range(b + 1) for b in beta)):
                if sum(gamma) == 0:
                    continue
                comb = math.prod(
                    math.comb(beta[i], gamma[i]) for i in range(nvars)
                )
                tgt = tuple(
                    beta[i] - gamma[i] + (1 if i == j else 0) for i in range(nvars)
                )
                if sum(tgt) >= 2:
                    acc -= comb * mu[gamma] * table[tgt]
            table[a] = acc
        return table


def apply_trivial_factor(tau, factor):
    """Return the tau function multiplied by C * exp(<shift, x>).

    Term-level action: every log-weight gains log|C|, every exponent row
    gains the shift, and a negative C flips all signs.
    """
    if factor.shift.size != tau.nvars:
        raise DimensionError(
            f"shift has length {factor.shift.size}, expected {tau.nvars}"
        )
    signs = tau.signs * math.copysign(1.0, factor.scale)
    logw = tau.log_weights + math.log(abs(factor.scale))
    expon = tau.exponents + factor.shift[None, :]
    return TauFunction.from_terms(signs, logw, expon)
