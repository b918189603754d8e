"""Monte Carlo estimation of the area functionals.

Layering: streams produce per-sample unit normals (counter-keyed, so the
ensemble is a pure function of seed and step count), backend kernels
reduce blocks of normals to per-sample statistics, and the drivers here
exponentiate, accumulate RunningMoments per block, and fold the blocks in
index order.  Worker threads only change who computes a block, never what
it contains or the fold order, so results are bit-stable for a fixed
backend regardless of the worker count.

The central quantity is the functional

    s_hat(z) = z (sum_l lam_l S_l + <U^1, B- U^2>)
             + z^2/2 sum_a <U^a, B+ U^a>

of a 2n-channel Brownian path (S_l the pairwise Ito areas, U^a the
endpoint vectors); mc_char estimates E[exp(s_hat(z))], whose exact value
is formulas.char_determinant(spec, z).
"""

import concurrent.futures
import math
import warnings

import numpy as np

from ..errors import (
    DimensionError,
    DiscretizationWarning,
    EnvelopeWarning,
    GridAlignmentError,
)
from . import streams
from .backend import active_kernels
from .estimates import ComplexEstimate, RunningMoments
from .formulas import hyperbolic_char
from .specs import OUSpec, StepBasis, char_prefactor

#: Fixed reduction block sizes.  Fixed, not tunable: the block is the
#: reduction granule, and freezing it keeps accumulation order (hence
#: bit-level results) independent of memory pressure or worker count.
AREA_BLOCK = 256
TWOD_BLOCK = 1024
OU_BLOCK = 1024

#: Relative standard error past which an estimate is flagged as unusable.
VARIANCE_GUARD = 0.2


def _run_blocks(total, block, workers, task):
    """Evaluate task(start, count) over contiguous spans; return results
    in span order no matter which thread finished first."""
    spans = [(s, min(block, total - s)) for s in range(0, total, block)]
    if workers <= 1:
        return [task(*span) for span in spans]
    results = [None] * len(spans)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(task, start, count): i
            for i, (start, count) in enumerate(spans)
        }
        for fut in concurrent.futures.as_completed(futures):
            results[futures[fut]] = fut.result()
    return results


def _merge(partials):
    total = RunningMoments()
    for part in partials:
        total.merge(part)
    return total


def _variance_guard(est, label):
    mean = abs(est.mean)
    worst = max(est.stderr_re, est.stderr_im)
    if mean > 0 and math.isfinite(worst) and worst > VARIANCE_GUARD * mean:
        warnings.warn(
            f"{label}: relative standard error {worst / mean:.2f} exceeds "
            f"{VARIANCE_GUARD}; the estimate is outside its trusted regime",
            EnvelopeWarning,
            stacklevel=3,
        )
    return est


def _envelope_guard(spec, z):
    if not spec.within_envelope():
        warnings.warn(
            "area spec outside the trusted envelope (large weights and "
            "large symmetric coupling); exponential moments may be heavy "
            "tailed or divergent",
            EnvelopeWarning,
            stacklevel=3,
        )
    zr = abs(complex(z).real)
    if zr and zr * float(spec.lam.max()) >= 0.5 * math.pi:
        warnings.warn(
            "real part of the argument is past the finite-moment bound "
            "pi/2 for the largest weight; the target does not exist",
            EnvelopeWarning,
            stacklevel=3,
        )


# -- direct 2n-channel estimators ---------------------------------------


def _area_moments(spec, zs, config, workers, kern):
    """RunningMoments of exp(s_hat(z)) for every z in zs, one ensemble."""
    rows = 2 * spec.n
    dt = config.dt
    lam = np.ascontiguousarray(spec.lam)
    bminus = np.ascontiguousarray(spec.bminus)
    bplus = np.ascontiguousarray(spec.bplus)

    def functional(stats, z):
        s, qm, qp = stats
        return np.exp(z * (s + qm) + (0.5 * z * z) * qp)

    def task(start, count):
        buf = np.empty((count, rows, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_BM)
        stats = kern.area_stats(buf, dt, lam, bminus, bplus)
        mirror = None
        if config.antithetic:
            # the functional is quadratic in the path, so negating the
            # whole path is the identity on it; reflecting the second
            # channel of each pair flips the odd part (areas and the
            # skew quadratic) while fixing the even part
            np.negative(buf[:, spec.n:, :], out=buf[:, spec.n:, :])
            mirror = kern.area_stats(buf, dt, lam, bminus, bplus)
        moms = []
        for z in zs:
            vals = functional(stats, z)
            if mirror is not None:
                vals = 0.5 * (vals + functional(mirror, z))
            mom = RunningMoments()
            mom.add_values(vals)
            moms.append(mom)
        return moms

    partials = _run_blocks(config.samples, AREA_BLOCK, workers, task)
    return [_merge([p[i] for p in partials]) for i in range(len(zs))]


def mc_char(spec, z, config, *, workers=1, kernels=None):
    """Monte Carlo estimate of E[exp(s_hat(z))].

    Exact value: formulas.char_determinant(spec, z).  Warns (does not
    raise) when the spec or argument leaves the trusted envelope, and
    when the realized relative standard error exceeds VARIANCE_GUARD.
    """
    kern = kernels if kernels is not None else active_kernels()
    z = complex(z)
    _envelope_guard(spec, z)
    mom = _area_moments(spec, [z], config, workers, kern)[0]
    return _variance_guard(mom.estimate(), "mc_char")


def s_hat(path, spec, z, kernels=None):
    """Evaluate the functional on one explicit path.

    path: (2n, N+1) values on the uniform grid of [0, 1], starting at 0;
    channel l pairs with channel n + l.  Feeding a path reconstructed
    from a bulk ensemble's increments reproduces that sample's functional
    up to path-reconstruction rounding.
    """
    kern = kernels if kernels is not None else active_kernels()
    p = np.asarray(path, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != 2 * spec.n:
        raise DimensionError(
            f"path must have shape (2n, N+1) = ({2 * spec.n}, .), got {p.shape}"
        )
    if p.shape[1] < 2:
        raise DimensionError("path needs at least one step")
    if np.any(p[:, 0] != 0.0):
        raise ValueError("paths start at the origin")
    inc = np.ascontiguousarray(np.diff(p, axis=1))
    # dt = 1 makes the kernel consume the increments verbatim
    s, qm, qp = kern.area_stats(
        inc[None, :, :],
        1.0,
        np.ascontiguousarray(spec.lam),
        np.ascontiguousarray(spec.bminus),
        np.ascontiguousarray(spec.bplus),
    )
    z = complex(z)
    return complex(z * (s[0] + qm[0]) + 0.5 * z * z * qp[0])


def stochastic_area(path):
    """Left-endpoint Ito area sum( W2 dW1 - W1 dW2 ) of one planar path
    given as values (2, N+1)."""
    p = np.asarray(path, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != 2:
        raise DimensionError(f"planar path must have shape (2, N+1), got {p.shape}")
    d1 = np.diff(p[0])
    d2 = np.diff(p[1])
    return float(p[1, :-1] @ d1 - p[0, :-1] @ d2)


def simulate_bm(dim, config, workers=1):
    """Yield (start_index, increments) blocks of the standard ensemble.

    increments have shape (count, dim, steps), already scaled by
    sqrt(dt).  The stream is exactly what the area estimators consume:
    rebuilding paths from these increments and calling :func:`s_hat`
    reproduces a bulk run sample for sample.
    """
    del workers  # generation is sequential by construction
    sdt = math.sqrt(config.dt)
    for start in range(0, config.samples, AREA_BLOCK):
        count = min(AREA_BLOCK, config.samples - start)
        buf = np.empty((count, dim, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_BM)
        buf *= sdt
        yield start, buf


def paths_from_increments(increments):
    """Prepend the zero start and integrate: (..., N) -> (..., N+1)."""
    inc = np.asarray(increments, dtype=np.float64)
    out = np.zeros(inc.shape[:-1] + (inc.shape[-1] + 1,))
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    return out


def area_endpoint_samples(config, *, workers=1, kernels=None):
    """Materialized per-sample (area, end1, end2) of a planar ensemble."""
    kern = kernels if kernels is not None else active_kernels()

    def task(start, count):
        buf = np.empty((count, 2, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_BM)
        return kern.area_raw(buf, config.dt)

    parts = _run_blocks(config.samples, AREA_BLOCK, workers, task)
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


# -- planar embedding -----------------------------------------------------


def embedded_char(spec, config, *, basis=None, z=1j, workers=1, kernels=None):
    """Estimate E[exp(s_hat(z))] from a *single* planar Brownian motion
    per sample, with the n channels carried by orthonormal step functions.

    config.steps must be divisible by n (the step functions are constant
    on n equal blocks).  The estimate converges to the same determinant
    as :func:`mc_char`; that collapse of 2n channels into 2 is the point
    of the check.
    """
    kern = kernels if kernels is not None else active_kernels()
    n = spec.n
    basis = basis if basis is not None else StepBasis.canonical(n)
    if basis.n != n:
        raise DimensionError(f"basis has {basis.n} rows, spec needs {n}")
    if config.steps % n:
        raise GridAlignmentError(
            f"steps = {config.steps} not divisible by n = {n}"
        )
    z = complex(z)
    _envelope_guard(spec, z)

    root = spec.root_lam
    lamm = np.ascontiguousarray(
        root[:, None] * (np.eye(n) + spec.cminus) * root[None, :]
    )
    lamp = np.ascontiguousarray(spec.bplus)
    emat = np.ascontiguousarray(basis.vectors)

    def task(start, count):
        buf = np.empty((count, 2, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_BM)
        sm, sp = kern.twod_stats(buf, config.dt, emat, lamm, lamp)
        vals = np.exp(z * sm + (0.5 * z * z) * sp)
        if config.antithetic:
            # reflect the second planar coordinate: flips the mixed
            # integral, fixes the quadratic endpoint part
            np.negative(buf[:, 1, :], out=buf[:, 1, :])
            sm2, sp2 = kern.twod_stats(buf, config.dt, emat, lamm, lamp)
            vals = 0.5 * (vals + np.exp(z * sm2 + (0.5 * z * z) * sp2))
        mom = RunningMoments()
        mom.add_values(vals)
        return mom

    partials = _run_blocks(config.samples, TWOD_BLOCK, workers, task)
    return _variance_guard(_merge(partials).estimate(), "embedded_char")


# -- Ornstein-Uhlenbeck route ---------------------------------------------


def simulate_ou(ou, config):
    """Yield (start_index, paths) blocks of the Euler-Maruyama ensemble
    for d xi = drift xi dt + diag(sqrt(lam)) dB, xi(0) = 0.

    paths have shape (count, n, steps + 1) including the zero start.
    Same normals, same update rule as the quadrature kernel: integrating
    <quad xi, xi> along these paths by the trapezoid rule reproduces what
    :func:`ou_exp_mean` exponentiates, sample for sample.
    """
    sdt = math.sqrt(config.dt)
    rootlam = np.sqrt(ou.lam)
    step = np.eye(ou.n) + config.dt * ou.drift
    for start in range(0, config.samples, OU_BLOCK):
        count = min(OU_BLOCK, config.samples - start)
        buf = np.empty((count, ou.n, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_OU)
        paths = np.zeros((count, ou.n, config.steps + 1))
        for k in range(config.steps):
            paths[:, :, k + 1] = (
                paths[:, :, k] @ step.T + sdt * rootlam * buf[:, :, k]
            )
        yield start, paths


def ou_exp_mean(ou, config, *, workers=1, kernels=None):
    """E[exp(-1/2 int_0^1 <quad xi, xi> dt)] along Euler-Maruyama paths
    of d xi = drift xi dt + diag(sqrt(lam)) dB, xi(0) = 0."""
    kern = kernels if kernels is not None else active_kernels()
    rootlam = np.ascontiguousarray(np.sqrt(ou.lam))
    drift = np.ascontiguousarray(ou.drift)
    quad = np.ascontiguousarray(ou.quad)

    def task(start, count):
        buf = np.empty((count, ou.n, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_OU)
        integ = kern.ou_quad(buf, config.dt, rootlam, drift, quad)
        # no antithetic branch: the integrand is even in the driving
        # noise (xi is linear in it, the form quadratic), so every sign
        # reflection reproduces the same functional value exactly
        vals = np.exp(-0.5 * integ)
        mom = RunningMoments()
        mom.add_values(vals)
        return mom

    partials = _run_blocks(config.samples, OU_BLOCK, workers, task)
    return _variance_guard(_merge(partials).estimate(), "ou_exp_mean")


def ou_step_bias(ou, config, *, samples=4000, kernels=None):
    """Coupled step-halving diagnostic for the Euler discretization.

    Runs ``samples`` paths at the configured grid and at half resolution
    built from the *same* normals (adjacent increments summed), so the
    difference of the two exponential functionals estimates the marginal
    discretization bias with tiny variance.

    Warns DiscretizationWarning when the bias is resolved above the
    coupling noise AND exceeds the standard error a run of
    ``config.samples`` paths would have.  The second condition carries
    the meaning: the coupling resolves the O(dt) bias far below the
    noise floor of any actual estimate, so significance alone would flag
    grids whose bias is a hundred times smaller than the statistical
    error of the run being validated.
    """
    kern = kernels if kernels is not None else active_kernels()
    if config.steps % 2:
        raise GridAlignmentError("step-halving needs an even step count")
    rootlam = np.ascontiguousarray(np.sqrt(ou.lam))
    drift = np.ascontiguousarray(ou.drift)
    quad = np.ascontiguousarray(ou.quad)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    diff = RunningMoments()
    fine = RunningMoments()
    for start in range(0, samples, OU_BLOCK):
        count = min(OU_BLOCK, samples - start)
        buf = np.empty((count, ou.n, config.steps))
        streams.fill_normals(buf, config.seed, start, streams.PURPOSE_OU)
        vals_f = np.exp(
            -0.5 * kern.ou_quad(buf, config.dt, rootlam, drift, quad)
        )
        coarse = np.ascontiguousarray(
            (buf[:, :, 0::2] + buf[:, :, 1::2]) * inv_sqrt2
        )
        vals_c = np.exp(
            -0.5 * kern.ou_quad(coarse, 2.0 * config.dt, rootlam, drift, quad)
        )
        diff.add_values(vals_f - vals_c)
        fine.add_values(vals_f)

    d = diff.estimate()
    f = fine.estimate()
    # stderr the functional mean would have at the configured run size
    run_se = f.stderr_re * math.sqrt(samples / config.samples)
    significant = abs(d.mean.real) > 3.0 * d.stderr_re
    material = abs(d.mean.real) > 3.0 * run_se
    if significant and material:
        warnings.warn(
            f"step-halving moved the OU functional by {d.mean.real:.2e} "
            f"(coupling stderr {d.stderr_re:.1e}, run stderr {run_se:.1e}); "
            "the Euler bias at this grid exceeds the statistical error of "
            f"a {config.samples}-sample run",
            DiscretizationWarning,
            stacklevel=2,
        )
    return {
        "mean_diff": d.mean.real,
        "stderr": d.stderr_re,
        "run_stderr": run_se,
        "fine_mean": f.mean.real,
        "samples": int(samples),
        "flagged": bool(significant and material),
    }


def ou_reduction_check(spec, config, *, workers=1, kernels=None, bias_pilot=True):
    """Three-way comparison for a symmetric coupling:

    * direct:   mc_char at z = i over the 2n-channel ensemble,
    * reduced:  exp(-tr(L A)) * (OU exponential mean)^2, independent
                normals via the OU purpose tag,
    * exact:    the hyperbolic determinant.

    Returns the three values plus pairwise z-scores; the reduced leg's
    error comes from the delta method for the square.
    """
    ou = OUSpec.char_reduction(spec)
    direct = mc_char(spec, 1j, config, workers=workers, kernels=kernels)
    base = ou_exp_mean(ou, config, workers=workers, kernels=kernels)
    pref = char_prefactor(spec)
    mean = base.mean.real
    reduced = ComplexEstimate(
        mean=complex(pref * mean * mean, 0.0),
        stderr_re=pref * 2.0 * abs(mean) * base.stderr_re,
        stderr_im=0.0,
        count=base.count,
    )
    exact = hyperbolic_char(spec)
    cross_se = math.hypot(direct.stderr_re, reduced.stderr_re)
    out = {
        "direct": direct,
        "reduced": reduced,
        "exact": exact,
        "z_direct": direct.max_abs_z(exact),
        "z_reduced": reduced.max_abs_z(exact),
        "z_cross": abs(direct.mean.real - reduced.mean.real) / cross_se,
        "ou": ou,
    }
    if bias_pilot:
        out["step_bias"] = ou_step_bias(ou, config, kernels=kernels)
    return out
