"""Pure-Python/numpy versions of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is unavailable or ``QUASISPEC_PURE_PYTHON`` is set.
Results agree with the compiled kernels to roundoff, not bitwise.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
RESCALE_EVERY = 1000
CHECK_EVERY = 8
BIG = 1e50


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def orbit_log_norms(E, lam, T, omega, theta0, h0, checkpoints):
    """log Schmidt norm of the m-step forward product, for every orbit and
    every m in ``checkpoints`` (sorted, positive).

    Orbit i starts at (theta0[i], h0[i]); step j uses the point
    (theta0 + j*omega mod 2pi, h0 + j mod k).
    """
    T = np.asarray(T, dtype=float)
    k = len(T)
    phi = _wrap(np.asarray(theta0, dtype=float).copy())
    h = np.asarray(h0, dtype=np.int64) % k
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    n = len(phi)
    out = np.empty((n, len(checkpoints)))
    a11 = np.ones(n)
    a12 = np.zeros(n)
    a21 = np.zeros(n)
    a22 = np.ones(n)
    logs = np.zeros(n)
    lamT = lam * T
    ci = 0
    m_max = int(checkpoints[-1]) if len(checkpoints) else 0
    for step in range(1, m_max + 1):
        d = E - lamT[h] * np.cos(phi)
        a11, a12, a21, a22 = d * a11 - a21, d * a12 - a22, a11, a12
        phi = phi + omega
        phi = np.where(phi >= TWO_PI, phi - TWO_PI, phi)
        h = h + 1
        h[h == k] = 0
        if step % CHECK_EVERY == 0 or step == m_max:
            nrm = np.sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
            a11, a12, a21, a22 = a11 / nrm, a12 / nrm, a21 / nrm, a22 / nrm
            logs = logs + np.log(nrm)
        while ci < len(checkpoints) and checkpoints[ci] == step:
            nrm = np.sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
            out[:, ci] = logs + np.log(nrm)
            ci += 1
    return out


def orbit_product(E, lam, T, omega, theta, h, m, inverse=False):
    """m-step cocycle product along one orbit, kept as (a11, a12, a21, a22, log_scale).

    Forward: A(x_{m-1}) ... A(x_0) with x_j = (theta + j omega, h + j).
    Inverse: A^{-1}(x_{-m}) ... A^{-1}(x_{-1}) with x_{-j} = (theta - j omega, h - j).
    """
    T = [float(t) for t in T]
    k = len(T)
    phi = math.fmod(theta, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    hh = h % k
    a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
    logs = 0.0
    cos = math.cos
    for step in range(1, m + 1):
        if inverse:
            phi -= omega
            if phi < 0.0:
                phi += TWO_PI
            hh -= 1
            if hh < 0:
                hh = k - 1
            d = E - lam * T[hh] * cos(phi)
            a11, a12, a21, a22 = a21, a22, d * a21 - a11, d * a22 - a12
        else:
            d = E - lam * T[hh] * cos(phi)
            a11, a12, a21, a22 = d * a11 - a21, d * a12 - a22, a11, a12
            phi += omega
            if phi >= TWO_PI:
                phi -= TWO_PI
            hh += 1
            if hh == k:
                hh = 0
        if step % RESCALE_EVERY == 0 or (
            step % CHECK_EVERY == 0
            and max(abs(a11), abs(a12), abs(a21), abs(a22)) > BIG
        ):
            nrm = math.sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
            a11, a12, a21, a22 = a11 / nrm, a12 / nrm, a21 / nrm, a22 / nrm
            logs += math.log(nrm)
    return _finish(a11, a12, a21, a22, logs)


def _finish(a11, a12, a21, a22, logs):
    # leave the matrix with Schmidt norm in [1, e) and an integer log scale,
    # or fully assembled when the whole product is that small
    nrm = math.sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
    total = logs + math.log(nrm)
    if total < 1.0:
        c = math.exp(logs) if logs != 0.0 else 1.0
        logs = 0.0
    else:
        new = math.floor(total)
        c = math.exp(total - new) / nrm
        logs = float(new)
    if c != 1.0:
        a11, a12, a21, a22 = a11 * c, a12 * c, a21 * c, a22 * c
    return a11, a12, a21, a22, logs


def discriminant_grid(E, theta, lam, T, omega, period):
    """Trace of the ``period``-step forward product for every (E, theta) pair.

    Returns an array of shape (len(E), len(theta)); entries overflow to +-inf
    rather than wrapping.
    """
    T = np.asarray(T, dtype=float)
    k = len(T)
    E = np.asarray(E, dtype=float)[:, None]
    phi = _wrap(np.asarray(theta, dtype=float))[None, :]
    shape = (E.shape[0], phi.shape[1])
    a11 = np.ones(shape)
    a12 = np.zeros(shape)
    a21 = np.zeros(shape)
    a22 = np.ones(shape)
    logs = np.zeros(shape)
    h = 0
    for step in range(1, period + 1):
        d = E - lam * T[h] * np.cos(phi)
        a11, a12, a21, a22 = d * a11 - a21, d * a12 - a22, a11, a12
        phi = phi + omega
        phi = np.where(phi >= TWO_PI, phi - TWO_PI, phi)
        h = (h + 1) % k
        if step % CHECK_EVERY == 0:
            nrm = np.sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22)
            a11, a12, a21, a22 = a11 / nrm, a12 / nrm, a21 / nrm, a22 / nrm
            logs = logs + np.log(nrm)
    tr = a11 + a22
    with np.errstate(over="ignore", divide="ignore"):
        return np.sign(tr) * np.exp(logs + np.log(np.abs(tr)))


def sturm_count(diag, off_sq, x):
    """Number of eigenvalues strictly below each x (vectorized over x)."""
    x = np.asarray(x, dtype=float)
    count = np.zeros(x.shape, dtype=np.int64)
    q = diag[0] - x
    count += q < 0
    for i in range(1, len(diag)):
        q = np.where(q == 0.0, 1e-300, q)
        q = diag[i] - x - off_sq[i - 1] / q
        count += q < 0
    return count


def tridiag_eigvalsh(diag, off, tol=1e-10):
    """All eigenvalues of a symmetric tridiagonal matrix, ascending, by
    Sturm-sequence bisection to absolute width ``tol``."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = len(diag)
    off_sq = off * off
    radius = np.abs(off)
    r = np.zeros(n)
    r[:-1] += radius
    r[1:] += radius
    lo = np.full(n, float(np.min(diag - r)) - 1e-9)
    hi = np.full(n, float(np.max(diag + r)) + 1e-9)
    idx = np.arange(n)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, off_sq, mid)
        go_left = below > idx
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
    return 0.5 * (lo + hi)
