# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled Monte Carlo kernels.

Same contract as kptau.wiener._numpy_kernels (the reference
implementation): C-contiguous float64 blocks of unit normals in,
per-sample float64 statistics out, left-endpoint Ito sums, sqrt(dt)
scaling applied internally.  Per-sample loops are serial, so each call
is deterministic; the GIL is released so the block-level thread pool
overlaps real work.  Summation order differs from the numpy backend, so
cross-backend agreement is ~1e-9 relative, not bitwise.
"""

from libc.math cimport sqrt

import numpy as np

NAME = "ext"


def area_stats(const double[:, :, ::1] z, double dt, const double[::1] lam,
               const double[:, ::1] bminus, const double[:, ::1] bplus):
    """(s, qm, qp) of a (B, 2n, N) block; see the numpy twin."""
    cdef Py_ssize_t nb = z.shape[0]
    cdef Py_ssize_t twon = z.shape[1]
    cdef Py_ssize_t nsteps = z.shape[2]
    cdef Py_ssize_t n = twon // 2
    s_arr = np.zeros(nb)
    qm_arr = np.zeros(nb)
    qp_arr = np.zeros(nb)
    ends_arr = np.empty(twon)
    cdef double[::1] s = s_arr
    cdef double[::1] qm = qm_arr
    cdef double[::1] qp = qp_arr
    cdef double[::1] ends = ends_arr
    cdef double sdt = sqrt(dt)
    cdef Py_ssize_t i, l, k, r, c
    cdef double wl, wnl, acc, stot, zl, znl, q

    with nogil:
        for i in range(nb):
            stot = 0.0
            for l in range(n):
                wl = 0.0
                wnl = 0.0
                acc = 0.0
                for k in range(nsteps):
                    zl = z[i, l, k]
                    znl = z[i, n + l, k]
                    if k > 0:
                        acc += wnl * zl - wl * znl
                    wl += zl
                    wnl += znl
                stot += lam[l] * acc
                ends[l] = wl * sdt
                ends[n + l] = wnl * sdt
            s[i] = stot * dt

            q = 0.0
            for r in range(n):
                for c in range(n):
                    q += ends[r] * bminus[r, c] * ends[n + c]
            qm[i] = q

            q = 0.0
            for r in range(n):
                for c in range(n):
                    q += bplus[r, c] * (
                        ends[r] * ends[c] + ends[n + r] * ends[n + c]
                    )
            qp[i] = q
    return s_arr, qm_arr, qp_arr


def area_raw(const double[:, :, ::1] z, double dt):
    """(area, end1, end2) of a (B, 2, N) planar block."""
    cdef Py_ssize_t nb = z.shape[0]
    cdef Py_ssize_t nsteps = z.shape[2]
    area_arr = np.zeros(nb)
    e1_arr = np.zeros(nb)
    e2_arr = np.zeros(nb)
    cdef double[::1] area = area_arr
    cdef double[::1] e1 = e1_arr
    cdef double[::1] e2 = e2_arr
    cdef double sdt = sqrt(dt)
    cdef Py_ssize_t i, k
    cdef double w1, w2, acc, z1, z2

    with nogil:
        for i in range(nb):
            w1 = 0.0
            w2 = 0.0
            acc = 0.0
            for k in range(nsteps):
                z1 = z[i, 0, k]
                z2 = z[i, 1, k]
                if k > 0:
                    acc += w2 * z1 - w1 * z2
                w1 += z1
                w2 += z2
            area[i] = acc * dt
            e1[i] = w1 * sdt
            e2[i] = w2 * sdt
    return area_arr, e1_arr, e2_arr


def twod_stats(const double[:, :, ::1] z, double dt,
               const double[:, ::1] emat, const double[:, ::1] lamm,
               const double[:, ::1] lamp):
    """(sminus, splus) of the step-basis embedding; (B, 2, N), N % n == 0."""
    cdef Py_ssize_t nb = z.shape[0]
    cdef Py_ssize_t nsteps = z.shape[2]
    cdef Py_ssize_t n = emat.shape[0]
    cdef Py_ssize_t blk = nsteps // n
    sm_arr = np.zeros(nb)
    sp_arr = np.zeros(nb)
    ac_arr = np.ascontiguousarray(np.asarray(lamm).T @ np.asarray(emat))
    bc_arr = np.ascontiguousarray(np.asarray(lamm) @ np.asarray(emat))
    f1_arr = np.empty(n)
    f2_arr = np.empty(n)
    b1_arr = np.empty(n)
    b2_arr = np.empty(n)
    v1_arr = np.empty(n)
    v2_arr = np.empty(n)
    cdef double[::1] sm = sm_arr
    cdef double[::1] sp = sp_arr
    cdef double[:, ::1] ac = ac_arr
    cdef double[:, ::1] bc = bc_arr
    cdef double[::1] f1 = f1_arr
    cdef double[::1] f2 = f2_arr
    cdef double[::1] bsum1 = b1_arr
    cdef double[::1] bsum2 = b2_arr
    cdef double[::1] v1 = v1_arr
    cdef double[::1] v2 = v2_arr
    cdef double sdt = sqrt(dt)
    cdef double rootn = sqrt(<double> n)
    cdef Py_ssize_t i, k, l, r, c
    cdef double d1, d2, g1, g2, smacc, spacc, vr

    with nogil:
        for i in range(nb):
            smacc = 0.0
            for r in range(n):
                f1[r] = 0.0
                f2[r] = 0.0
                bsum1[r] = 0.0
                bsum2[r] = 0.0
            for k in range(nsteps):
                l = k // blk
                d1 = z[i, 0, k] * sdt
                d2 = z[i, 1, k] * sdt
                g1 = 0.0
                g2 = 0.0
                for r in range(n):
                    g1 += f2[r] * ac[r, l]
                    g2 += f1[r] * bc[r, l]
                smacc += g1 * d1 - g2 * d2
                for r in range(n):
                    f1[r] += rootn * d1 * emat[r, l]
                    f2[r] += rootn * d2 * emat[r, l]
                bsum1[l] += z[i, 0, k]
                bsum2[l] += z[i, 1, k]

            for r in range(n):
                vr = 0.0
                for l in range(n):
                    vr += bsum1[l] * emat[r, l]
                v1[r] = rootn * sdt * vr
                vr = 0.0
                for l in range(n):
                    vr += bsum2[l] * emat[r, l]
                v2[r] = rootn * sdt * vr

            spacc = 0.0
            for r in range(n):
                for c in range(n):
                    spacc += lamp[r, c] * (v1[r] * v1[c] + v2[r] * v2[c])
            sm[i] = rootn * smacc
            sp[i] = spacc
    return sm_arr, sp_arr


def ou_quad(const double[:, :, ::1] z, double dt, const double[::1] rootlam,
            const double[:, ::1] drift, const double[:, ::1] quad):
    """Trapezoid integral of <quad xi, xi> along Euler paths; (B, n, N)."""
    cdef Py_ssize_t nb = z.shape[0]
    cdef Py_ssize_t n = z.shape[1]
    cdef Py_ssize_t nsteps = z.shape[2]
    out_arr = np.zeros(nb)
    step_arr = np.ascontiguousarray(np.eye(n) + np.asarray(drift) * dt)
    xi_arr = np.empty(n)
    xn_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double[:, ::1] step = step_arr
    cdef double[::1] xi = xi_arr
    cdef double[::1] xn = xn_arr
    cdef double sdt = sqrt(dt)
    cdef Py_ssize_t i, k, r, c
    cdef double total, qprev, qk, acc

    with nogil:
        for i in range(nb):
            for r in range(n):
                xi[r] = 0.0
            total = 0.0
            qprev = 0.0
            for k in range(nsteps):
                for r in range(n):
                    acc = 0.0
                    for c in range(n):
                        acc += step[r, c] * xi[c]
                    xn[r] = acc + sdt * rootlam[r] * z[i, r, k]
                for r in range(n):
                    xi[r] = xn[r]
                qk = 0.0
                for r in range(n):
                    for c in range(n):
                        qk += quad[r, c] * xi[r] * xi[c]
                total += qprev + qk
                qprev = qk
            out[i] = total * (0.5 * dt)
    return out_arr
