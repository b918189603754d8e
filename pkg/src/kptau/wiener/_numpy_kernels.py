"""Pure-numpy Monte Carlo kernels (fallback backend).

Shared contract with the compiled versions in kptau._speedups:

* every kernel takes a C-contiguous float64 block ``z`` of *unit normals*
  with sample-major layout and scales by sqrt(dt) internally, so callers
  hand raw generator output straight through;
* per-sample statistics come back as 1-d float64 arrays over the block;
* time integrals use the left-endpoint Ito convention, prefix sums start
  at zero.

The two backends may differ in summation order, hence in the last few
bits; they are each individually deterministic.
"""

import math

import numpy as np

NAME = "numpy"


def area_stats(z, dt, lam, bminus, bplus):
    """Weighted-area and endpoint statistics of a 2n-channel block.

    z: (B, 2n, N); channel l pairs with channel n + l.  Returns
    (s, qm, qp): the lam-weighted sum of pairwise Ito areas, the
    endpoint cross form <U1, bminus U2>, and the symmetric endpoint form
    sum_a <U^a, bplus U^a>.
    """
    b, twon, nsteps = z.shape
    n = twon // 2
    sdt = math.sqrt(dt)
    w = np.cumsum(z, axis=2)
    ends = w[:, :, -1] * sdt
    s = np.zeros(b)
    for l in range(n):
        s += lam[l] * (
            np.einsum("bk,bk->b", w[:, n + l, :-1], z[:, l, 1:])
            - np.einsum("bk,bk->b", w[:, l, :-1], z[:, n + l, 1:])
        )
    s *= dt
    u1 = ends[:, :n]
    u2 = ends[:, n:]
    qm = np.einsum("bi,ij,bj->b", u1, bminus, u2)
    qp = np.einsum("bi,ij,bj->b", u1, bplus, u1) + np.einsum(
        "bi,ij,bj->b", u2, bplus, u2
    )
    return s, qm, qp


def area_raw(z, dt):
    """Plain planar statistics: (area, end1, end2) for z of shape (B, 2, N)."""
    w = np.cumsum(z, axis=2)
    area = dt * (
        np.einsum("bk,bk->b", w[:, 1, :-1], z[:, 0, 1:])
        - np.einsum("bk,bk->b", w[:, 0, :-1], z[:, 1, 1:])
    )
    sdt = math.sqrt(dt)
    return area, w[:, 0, -1] * sdt, w[:, 1, -1] * sdt


def twod_stats(z, dt, emat, lamm, lamp):
    """Step-basis planar embedding statistics.

    z: (B, 2, N) with N divisible by n = emat.shape[0].  Channel i of the
    embedded n-dim system is f_i = sqrt(n) * <emat[i, block], .>.  Returns
    (sminus, splus): the iterated integral against lamm and the quadratic
    endpoint form against lamp.
    """
    b, two, nsteps = z.shape
    n = emat.shape[0]
    blk = nsteps // n
    sdt = math.sqrt(dt)
    rootn = math.sqrt(n)

    # per-block inner vectors: g1 = F2 . a_l, g2 = F1 . b_l
    a_cols = lamm.T @ emat  # a_l = column l
    b_cols = lamm @ emat

    f1 = np.zeros((b, n))
    f2 = np.zeros((b, n))
    sm = np.zeros(b)
    for k in range(nsteps):
        l = k // blk
        col = emat[:, l]
        d1 = z[:, 0, k] * sdt
        d2 = z[:, 1, k] * sdt
        sm += (f2 @ a_cols[:, l]) * d1 - (f1 @ b_cols[:, l]) * d2
        f1 += rootn * np.outer(d1, col)
        f2 += rootn * np.outer(d2, col)

    # endpoint vectors from exact block sums
    sums = z.reshape(b, 2, n, blk).sum(axis=3) * sdt
    v1 = rootn * sums[:, 0, :] @ emat.T
    v2 = rootn * sums[:, 1, :] @ emat.T
    splus = np.einsum("bi,ij,bj->b", v1, lamp, v1) + np.einsum(
        "bi,ij,bj->b", v2, lamp, v2
    )
    return rootn * sm, splus


def ou_quad(z, dt, rootlam, drift, quad):
    """Euler-Maruyama integral of <quad xi, xi> dt along OU paths.

    z: (B, n, N).  xi steps by xi <- xi (I + drift dt)^T + sqrt(dt)
    rootlam * z_k from xi = 0; the integral uses the trapezoid rule with
    the zero initial value.
    """
    b, n, nsteps = z.shape
    sdt = math.sqrt(dt)
    step = np.eye(n) + drift * dt
    xi = np.zeros((b, n))
    total = np.zeros(b)
    qprev = np.zeros(b)
    for k in range(nsteps):
        xi = xi @ step.T + (sdt * rootlam) * z[:, :, k]
        qk = np.einsum("bi,ij,bj->b", xi, quad, xi)
        total += qprev + qk
        qprev = qk
    return total * (0.5 * dt)
