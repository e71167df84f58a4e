# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_fallback`` for the reference
semantics). All loops run without the GIL."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, log, exp, fabs, floor, fmod

cnp.import_array()

cdef double TWO_PI = 6.283185307179586
cdef int RESCALE_EVERY = 1000
cdef int CHECK_EVERY = 8
cdef int RESYNC_EVERY = 64
cdef double BIG = 1e50


cdef inline double _wrap(double x) nogil:
    x = fmod(x, TWO_PI)
    if x < 0.0:
        x += TWO_PI
    return x




def orbit_log_norms(double E, double lam, T, double omega, theta0, h0, checkpoints):
    cdef double[::1] lamT = lam * np.ascontiguousarray(T, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(theta0, dtype=np.float64)
    cdef long long[::1] hs = np.ascontiguousarray(h0, dtype=np.int64)
    cdef long long[::1] ck = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef Py_ssize_t n = th.shape[0], nck = ck.shape[0], i0
    cdef double[:, ::1] out = np.empty((n, nck), dtype=np.float64)
    with nogil:
        # orbits are advanced four at a time so the per-step dependency chains overlap
        for i0 in range(0, n, 4):
            _log_norm_block(E, lamT, omega, th, hs, ck, out, i0, n)
    return np.asarray(out)


cdef void _log_norm_block(double E, double[::1] lamT, double omega, double[::1] th,
                          long long[::1] hs, long long[::1] ck, double[:, ::1] out,
                          Py_ssize_t i0, Py_ssize_t n) noexcept nogil:
    cdef double a11[4]
    cdef double a12[4]
    cdef double a21[4]
    cdef double a22[4]
    cdef double logs[4]
    cdef double phi[4]
    cdef double c[4]
    cdef double sn[4]
    cdef long long hh[4]
    cdef double cw = cos(omega), sw = sin(omega), d, t11, t12, tc, nrm, big
    cdef long long k = lamT.shape[0], step, m_max
    cdef Py_ssize_t nck = ck.shape[0], ci = 0, l, src
    cdef int until_check = CHECK_EVERY, until_rescale = RESCALE_EVERY, until_resync = RESYNC_EVERY
    m_max = ck[nck - 1] if nck > 0 else 0
    for l in range(4):
        src = i0 + l if i0 + l < n else n - 1
        a11[l] = 1.0; a12[l] = 0.0; a21[l] = 0.0; a22[l] = 1.0
        logs[l] = 0.0
        phi[l] = _wrap(th[src])
        hh[l] = hs[src] % k
        if hh[l] < 0:
            hh[l] += k
        c[l] = cos(phi[l])
        sn[l] = sin(phi[l])
    for step in range(1, m_max + 1):
        for l in range(4):
            d = E - lamT[hh[l]] * c[l]
            t11 = a11[l]; t12 = a12[l]
            a11[l] = d * t11 - a21[l]
            a12[l] = d * t12 - a22[l]
            a21[l] = t11
            a22[l] = t12
            phi[l] += omega
            if phi[l] >= TWO_PI:
                phi[l] -= TWO_PI
            hh[l] += 1
            if hh[l] == k:
                hh[l] = 0
        until_resync -= 1
        if until_resync == 0:
            # cos/sin of the phase come from a rotation recurrence, resynced from phi
            until_resync = RESYNC_EVERY
            for l in range(4):
                c[l] = cos(phi[l])
                sn[l] = sin(phi[l])
        else:
            for l in range(4):
                tc = c[l]
                c[l] = tc * cw - sn[l] * sw
                sn[l] = sn[l] * cw + tc * sw
        until_check -= 1
        until_rescale -= 1
        if until_check == 0:
            until_check = CHECK_EVERY
            for l in range(4):
                big = fabs(a11[l]) + fabs(a12[l]) + fabs(a21[l]) + fabs(a22[l])
                if until_rescale <= 0 or big > BIG:
                    nrm = sqrt(a11[l] * a11[l] + a12[l] * a12[l] + a21[l] * a21[l] + a22[l] * a22[l])
                    a11[l] /= nrm; a12[l] /= nrm; a21[l] /= nrm; a22[l] /= nrm
                    logs[l] += log(nrm)
            if until_rescale <= 0:
                until_rescale = RESCALE_EVERY
        while ci < nck and ck[ci] == step:
            for l in range(4):
                if i0 + l < n:
                    out[i0 + l, ci] = logs[l] + 0.5 * log(
                        a11[l] * a11[l] + a12[l] * a12[l] + a21[l] * a21[l] + a22[l] * a22[l])
            ci += 1


def orbit_product(double E, double lam, T, double omega, double theta, long long h,
                  long long m, bint inverse=False):
    cdef double[::1] lamT = lam * np.ascontiguousarray(T, dtype=np.float64)
    cdef long long k = lamT.shape[0], hh, step
    cdef double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0, t11, t12, d, nrm, logs = 0.0
    cdef double phi = _wrap(theta)
    hh = h % k
    if hh < 0:
        hh += k
    with nogil:
        for step in range(1, m + 1):
            if inverse:
                phi -= omega
                if phi < 0.0:
                    phi += TWO_PI
                hh -= 1
                if hh < 0:
                    hh = k - 1
                d = E - lamT[hh] * cos(phi)
                t11 = a11; t12 = a12
                a11 = a21
                a12 = a22
                a21 = d * a21 - t11
                a22 = d * a22 - t12
            else:
                d = E - lamT[hh] * cos(phi)
                t11 = a11; t12 = a12
                a11 = d * a11 - a21
                a12 = d * a12 - a22
                a21 = t11
                a22 = t12
                phi += omega
                if phi >= TWO_PI:
                    phi -= TWO_PI
                hh += 1
                if hh == k:
                    hh = 0
            if step % CHECK_EVERY == 0:
                if step % RESCALE_EVERY == 0 or fabs(a11) > BIG or fabs(a12) > BIG \
                        or fabs(a21) > BIG or fabs(a22) > BIG:
                    nrm = sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
                    a11 /= nrm; a12 /= nrm; a21 /= nrm; a22 /= nrm
                    logs += log(nrm)
    return _finish(a11, a12, a21, a22, logs)


cdef tuple _finish(double a11, double a12, double a21, double a22, double logs):
    cdef double nrm = sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
    cdef double total = logs + log(nrm), c, new
    if total < 1.0:
        c = exp(logs) if logs != 0.0 else 1.0
        logs = 0.0
    else:
        new = floor(total)
        c = exp(total - new) / nrm
        logs = new
    if c != 1.0:
        a11 *= c; a12 *= c; a21 *= c; a22 *= c
    return a11, a12, a21, a22, logs


def discriminant_grid(E, theta, double lam, T, double omega, long long period):
    cdef double[::1] Es = np.ascontiguousarray(E, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] lamT = lam * np.ascontiguousarray(T, dtype=np.float64)
    cdef Py_ssize_t nE = Es.shape[0], nT = th.shape[0], i, j
    cdef long long k = lamT.shape[0], hh, step
    cdef double[:, ::1] out = np.empty((nE, nT), dtype=np.float64)
    cdef double[::1] cosv = np.empty(period * nT, dtype=np.float64)
    cdef double a11, a12, a21, a22, t11, t12, d, phi, logs, nrm, tr
    with nogil:
        # potential cosines depend on theta only
        for j in range(nT):
            phi = _wrap(th[j])
            for step in range(period):
                cosv[j * period + step] = cos(phi)
                phi += omega
                if phi >= TWO_PI:
                    phi -= TWO_PI
        for i in range(nE):
            for j in range(nT):
                a11 = 1.0; a12 = 0.0; a21 = 0.0; a22 = 1.0
                logs = 0.0
                hh = 0
                for step in range(period):
                    d = Es[i] - lamT[hh] * cosv[j * period + step]
                    t11 = a11; t12 = a12
                    a11 = d * a11 - a21
                    a12 = d * a12 - a22
                    a21 = t11
                    a22 = t12
                    hh += 1
                    if hh == k:
                        hh = 0
                    if (step + 1) % CHECK_EVERY == 0:
                        nrm = sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
                        a11 /= nrm; a12 /= nrm; a21 /= nrm; a22 /= nrm
                        logs += log(nrm)
                tr = a11 + a22
                if tr == 0.0:
                    out[i, j] = 0.0
                elif tr > 0.0:
                    out[i, j] = exp(logs + log(tr))
                else:
                    out[i, j] = -exp(logs + log(-tr))
    return np.asarray(out)


def sturm_count(diag, off_sq, x):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] b2 = np.ascontiguousarray(off_sq, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    cdef long long[::1] out = np.empty(xs.shape[0], dtype=np.int64)
    cdef Py_ssize_t j
    with nogil:
        for j in range(xs.shape[0]):
            out[j] = _count_below(dg, b2, xs[j])
    return np.asarray(out)


cdef inline long long _count_below(double[::1] dg, double[::1] b2, double x) nogil:
    cdef Py_ssize_t i, n = dg.shape[0]
    cdef long long c = 0
    cdef double q = dg[0] - x
    if q < 0.0:
        c += 1
    for i in range(1, n):
        if q == 0.0:
            q = 1e-300
        q = dg[i] - x - b2[i - 1] / q
        if q < 0.0:
            c += 1
    return c


def tridiag_eigvalsh(diag, off, double tol=1e-10):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] of = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t n = dg.shape[0], i, j
    cdef double[::1] b2 = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double[::1] out = np.empty(n, dtype=np.float64)
    cdef double glo = 1e300, ghi = -1e300, r, lo, hi, mid
    for i in range(n - 1):
        b2[i] = of[i] * of[i]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += fabs(of[i - 1])
        if i < n - 1:
            r += fabs(of[i])
        if dg[i] - r < glo:
            glo = dg[i] - r
        if dg[i] + r > ghi:
            ghi = dg[i] + r
    glo -= 1e-9
    ghi += 1e-9
    with nogil:
        for j in range(n):
            lo = glo
            hi = ghi
            if j > 0 and out[j - 1] - tol > lo:
                lo = out[j - 1] - tol
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _count_below(dg, b2, mid) > j:
                    hi = mid
                else:
                    lo = mid
            out[j] = 0.5 * (lo + hi)
    return np.asarray(out)
