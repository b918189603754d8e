"""Problem specifications for the stochastic side.

An AreaSpec fixes the quadratic functional under study: positive weights
lam and a real coupling matrix A, split into its symmetric part C+ and
skew part C- (only those combinations ever enter formulas or kernels).
PathEnsembleConfig fixes the Monte Carlo ensemble: sample count, time
grid on [0, 1], seed, antithetic flag.  OUSpec describes the auxiliary
Ornstein-Uhlenbeck SDE used by the symmetric-coupling reduction, and
StepBasis the orthonormal step functions of the planar embedding.
DiscreteMeasure carries the spectral data for the string-kernel checks.
"""

import dataclasses
import math

import numpy as np

from ..errors import DimensionError

#: Envelope defaults: the MC functional estimators are trusted when either
#: every weight is below LAM_MAX or the symmetric coupling is small in
#: spectral norm.  Outside, expect heavy tails (variance may be infinite).
LAM_MAX = 0.3
CPLUS_MAX = 0.5

#: Minimum steps for a production time grid on [0, 1].
MIN_STEPS = 256

#: Minimum ensemble size: below this, stderr itself is too noisy to act on.
MIN_SAMPLES = 1000


def _vector(v, name):
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _square(a, n, name):
    arr = np.asarray(a, dtype=np.float64)
    if arr.shape != (n, n):
        raise DimensionError(f"{name} must have shape ({n}, {n}), got {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclasses.dataclass(frozen=True)
class AreaSpec:
    """Weights lam_l > 0 and coupling A for the area functional."""

    lam: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        lam = _vector(self.lam, "lam")
        if lam.size == 0:
            raise DimensionError("need at least one weight")
        if np.any(lam <= 0):
            raise ValueError("all weights lam must be positive")
        a = _square(self.a, lam.size, "a")
        lam.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "a", a)

    @property
    def n(self):
        return int(self.lam.size)

    @property
    def cplus(self):
        """Symmetric part of the coupling."""
        return 0.5 * (self.a + self.a.T)

    @property
    def cminus(self):
        """Skew part of the coupling."""
        return 0.5 * (self.a - self.a.T)

    @property
    def root_lam(self):
        return np.sqrt(self.lam)

    def _sandwich(self, c):
        r = self.root_lam
        return r[:, None] * c * r[None, :]

    @property
    def bplus(self):
        """diag(sqrt(lam)) C+ diag(sqrt(lam)): the endpoint quadratic form."""
        return self._sandwich(self.cplus)

    @property
    def bminus(self):
        """diag(sqrt(lam)) C- diag(sqrt(lam)): the endpoint cross form."""
        return self._sandwich(self.cminus)

    def within_envelope(self, lam_max=LAM_MAX, cplus_max=CPLUS_MAX):
        """Inside the regime where the exponential-moment estimators have
        controlled tails: small weights, or small symmetric coupling."""
        if float(self.lam.max()) <= lam_max:
            return True
        return float(np.linalg.norm(self.cplus, 2)) <= cplus_max

    def payload(self):
        return {
            "lam": [float(v) for v in self.lam],
            "a": [[float(v) for v in row] for row in self.a],
        }


@dataclasses.dataclass(frozen=True)
class PathEnsembleConfig:
    """Monte Carlo ensemble layout: M samples on an N-step grid of [0, 1].

    The seed keys per-sample counter streams, so the ensemble is a pure
    function of (seed, N) regardless of batching or thread count.
    """

    samples: int
    steps: int
    seed: int
    antithetic: bool = False

    def __post_init__(self):
        if int(self.samples) < MIN_SAMPLES:
            raise ValueError(f"samples must be >= {MIN_SAMPLES}")
        if int(self.steps) < MIN_STEPS:
            raise ValueError(f"steps must be >= {MIN_STEPS}")
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "antithetic", bool(self.antithetic))

    @property
    def dt(self):
        return 1.0 / self.steps

    def payload(self):
        return {
            "samples": self.samples,
            "steps": self.steps,
            "seed": self.seed,
            "antithetic": self.antithetic,
        }


@dataclasses.dataclass(frozen=True)
class OUSpec:
    """Ornstein-Uhlenbeck integrand data: d xi = drift xi dt +
    diag(sqrt(lam)) dB from xi(0) = 0, scored by the time integral of
    <quad xi, xi>."""

    lam: np.ndarray
    drift: np.ndarray
    quad: np.ndarray

    def __post_init__(self):
        lam = _vector(self.lam, "lam")
        if lam.size == 0:
            raise DimensionError("need at least one diffusion weight")
        if np.any(lam <= 0):
            raise ValueError("diffusion weights must be positive")
        drift = _square(self.drift, lam.size, "drift")
        quad = _square(self.quad, lam.size, "quad")
        if not np.allclose(quad, quad.T, atol=1e-12):
            raise ValueError("quad must be symmetric")
        for name, arr in (("lam", lam), ("drift", drift), ("quad", quad)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return int(self.lam.size)

    @classmethod
    def char_reduction(cls, spec):
        """The OU problem whose squared exponential moment reproduces the
        area characteristic value for a symmetric coupling.

        Requires A = A^T.  Drift is -diag(lam) A, the integrand weight is
        diag(lam) - A diag(lam) A, and the caller must multiply the squared
        OU mean by exp(-tr(diag(lam) A)).
        """
        if not np.allclose(spec.a, spec.a.T, atol=1e-12):
            raise ValueError("coupling must be symmetric for the OU reduction")
        lam_d = np.diag(spec.lam)
        drift = -lam_d @ spec.a
        quad = lam_d - spec.a @ lam_d @ spec.a
        return cls(lam=spec.lam, drift=drift, quad=quad)


def char_prefactor(spec):
    """exp(-tr(diag(lam) A)) companion constant of OUSpec.char_reduction."""
    return math.exp(-float(np.sum(spec.lam * np.diag(spec.a))))


@dataclasses.dataclass(frozen=True)
class StepBasis:
    """Orthonormal rows used to embed n scalar channels into one planar
    path via step functions: channel i weights block l of the time grid by
    sqrt(n) * vectors[i, l]."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"vectors must be square, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vectors contain non-finite entries")
        gram = v @ v.T
        if not np.allclose(gram, np.eye(v.shape[0]), atol=1e-12):
            raise ValueError("rows must be orthonormal to 1e-12")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self):
        return int(self.vectors.shape[0])

    @classmethod
    def canonical(cls, n):
        return cls(np.eye(n))

    @classmethod
    def haar(cls, n, seed):
        """Uniformly random orthogonal rows (sign-fixed QR)."""
        rng = np.random.default_rng(seed)
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))[None, :]
        return cls(q.T)


@dataclasses.dataclass(frozen=True)
class DiscreteMeasure:
    """Finite atomic measure: positive masses at real locations.

    Atoms at identical locations are merged; atoms are stored sorted by
    location so equal measures compare equal.
    """

    masses: np.ndarray
    locations: np.ndarray

    def __post_init__(self):
        masses = _vector(self.masses, "masses")
        locations = _vector(self.locations, "locations")
        if masses.size != locations.size:
            raise DimensionError("masses and locations must have equal length")
        if np.any(masses <= 0):
            raise ValueError("masses must be positive")
        if masses.size:
            locs, inverse = np.unique(locations, return_inverse=True)
            merged = np.zeros_like(locs)
            np.add.at(merged, inverse, masses)
            masses, locations = merged, locs
        masses.setflags(write=False)
        locations.setflags(write=False)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "locations", locations)

    @property
    def n_atoms(self):
        return int(self.masses.size)


def scattering_measure(scale, c, p):
    """Spectral pair (sigma_plus, sigma_minus) of the process
    sqrt(scale) <c, exp(p s)> driven by rates p.

    Atoms carry mass 2 scale^2 c_i^2 at location -p_i^2; positive rates
    feed sigma_plus, negative rates sigma_minus.  Zero rates are not
    allowed, zero-weight channels are dropped.
    """
    scale = float(scale)
    if not (scale > 0 and math.isfinite(scale)):
        raise ValueError("scale must be positive and finite")
    c = _vector(c, "c")
    p = _vector(p, "p")
    if c.size != p.size:
        raise DimensionError("c and p must have equal length")
    if np.any(p == 0):
        raise ValueError("rates p must be nonzero")
    keep = c != 0
    c, p = c[keep], p[keep]
    mass = 2.0 * scale**2 * c**2
    loc = -(p**2)

    def build(sel):
        return DiscreteMeasure(masses=mass[sel], locations=loc[sel])

    return build(p > 0), build(p < 0)
