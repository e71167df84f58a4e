"""Spectra through rational-frequency periodic approximants.

For alpha = p/q the potential has period P = lcm(q, k) and, at a fixed phase,
the spectrum is ``{E : |disc(E, theta)| <= 2}`` where ``disc`` is the trace of
the P-step transfer product. Rational frequencies break theta-invariance, so
band sets are unions over a theta grid.

Two routes compute the per-phase bands:

* ``floquet`` (default): eigenvalues of the P x P periodic and antiperiodic
  Jacobi matrices are exactly the roots of ``disc = +2`` and ``disc = -2``;
  sorted together, consecutive pairs are the band edges. Bands of any width
  are found, including the exponentially thin ones of the supercritical regime.
* ``scan``: the indicator ``min_theta |disc| - 2`` is scanned on an energy
  grid and every sign change is refined by bisection. Bands thinner than the
  grid step can be missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .model import TWO_PI, ModelParams, PhasePoint, cocycle_product
from .numerics import IntervalUnion, union_measure

DEFAULT_THETA_SAMPLES = 64
BISECTION_STEPS = 60


@dataclass(frozen=True)
class BandSet:
    bands: IntervalUnion
    p: int
    q: int
    P: int
    theta_samples: int
    method: str = "floquet"

    @property
    def measure(self) -> float:
        return spectrum_measure(self)


def _rational(params: ModelParams) -> Fraction:
    if params.alpha_exact is None:
        raise ValueError("periodic approximants need an exactly rational alpha = p/q")
    return params.alpha_exact


def period_of(params: ModelParams) -> int:
    q = _rational(params).denominator
    return q * params.k // math.gcd(q, params.k)


def theta_grid(samples: int) -> np.ndarray:
    return TWO_PI * np.arange(samples) / samples


def discriminant(params: ModelParams, E: float, theta: float) -> float:
    """Trace of the P-step transfer product from (theta, 0); a degree-P
    polynomial in E with leading coefficient 1. Overflows to +-inf."""
    P = period_of(params)
    prod = cocycle_product(params, E, PhasePoint(theta % TWO_PI, 0), P)
    tr = prod.mat.trace()
    if tr == 0.0:
        return 0.0
    log_abs = prod.log_scale + math.log(abs(tr))
    return math.copysign(math.exp(log_abs) if log_abs < 709.7 else math.inf, tr)


def discriminant_grid(params: ModelParams, energies, thetas) -> np.ndarray:
    """``disc(E_i, theta_j)`` as an array of shape (len(energies), len(thetas))."""
    P = period_of(params)
    return kernels.discriminant_grid(np.asarray(energies, dtype=float), np.asarray(thetas, dtype=float),
                                     params.lam, np.asarray(params.T), params.omega, P)


def potential_sequence(params: ModelParams, theta: float, N: int, omega: float | None = None) -> np.ndarray:
    """``lambda T(n) cos(theta + n omega)`` for n = 0..N-1."""
    omega = params.omega if omega is None else omega
    n = np.arange(N)
    T = np.asarray(params.T)[n % params.k]
    return params.lam * T * np.cos(theta + n * omega)


def floquet_edges(params: ModelParams, theta: float) -> np.ndarray:
    """Band edges at one phase: sorted eigenvalues of the periodic and
    antiperiodic Jacobi matrices, shape (P, 2)."""
    P = period_of(params)
    v = potential_sequence(params, theta, P)
    evs = []
    for sign in (1.0, -1.0):
        H = np.diag(v)
        idx = np.arange(P - 1)
        H[idx, idx + 1] += 1.0
        H[idx + 1, idx] += 1.0
        H[0, P - 1] += sign
        H[P - 1, 0] += sign
        if P == 1:
            H[0, 0] += sign  # u_{n+1} and u_{n-1} are both u_0 times the Bloch factor
        evs.append(np.linalg.eigvalsh(H))
    allv = np.sort(np.concatenate(evs))
    return allv.reshape(P, 2)


def _bands_floquet(params, thetas):
    pairs = []
    for th in thetas:
        pairs.extend(map(tuple, floquet_edges(params, float(th)).tolist()))
    return IntervalUnion(pairs)


def _bands_scan(params, thetas, e_resolution):
    B = params.energy_bound
    n = int(math.ceil(2 * B / e_resolution)) + 1
    grid = np.linspace(-B, B, n)
    ind = np.min(np.abs(discriminant_grid(params, grid, thetas)), axis=1) - 2.0
    inside = ind <= 0.0

    def indicator(E):
        return float(np.min(np.abs(discriminant_grid(params, [E], thetas)))) - 2.0

    def refine(a, b):
        # a outside, b inside (or the reverse): shrink to the boundary
        fa_inside = indicator(a) <= 0.0
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (a + b)
            if (indicator(mid) <= 0.0) == fa_inside:
                a = mid
            else:
                b = mid
            if abs(b - a) < 1e-12:
                break
        return b if not fa_inside else a

    intervals = []
    i = 0
    while i < n:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and inside[j + 1]:
            j += 1
        lo = grid[i] if i == 0 else refine(grid[i - 1], grid[i])
        hi = grid[j] if j == n - 1 else refine(grid[j + 1], grid[j])
        intervals.append((min(lo, hi), max(lo, hi)))
        i = j + 1
    return IntervalUnion(intervals)


def rational_bands(params: ModelParams, theta_samples: int = DEFAULT_THETA_SAMPLES,
                   e_resolution: float = 1e-3, method: str = "floquet") -> BandSet:
    """Union over a uniform theta grid of the periodic-approximant spectra."""
    alpha = _rational(params)
    if theta_samples < 1:
        raise ValueError("theta_samples must be >= 1")
    if e_resolution <= 0:
        raise ValueError("e_resolution must be positive")
    thetas = theta_grid(theta_samples)
    if method == "floquet":
        bands = _bands_floquet(params, thetas)
    elif method == "scan":
        bands = _bands_scan(params, thetas, e_resolution)
    else:
        raise ValueError(f"unknown method {method!r}")
    if bands.is_empty():
        raise RuntimeError(f"empty band set for {params} (method={method}); the spectrum is never empty")
    return BandSet(bands, alpha.numerator, alpha.denominator, period_of(params), theta_samples, method)


def duality_bands(params: ModelParams, theta_samples: int = DEFAULT_THETA_SAMPLES,
                  e_resolution: float = 1e-3, method: str = "floquet") -> BandSet:
    """Band set of a constant-coupling model (k = 1) through Aubry duality:
    bands at coupling ``4/lambda`` scaled by ``lambda/2``.

    Useful for ``|lambda| > 2``, where the per-phase bands are thinner than
    double precision can resolve.
    """
    if params.k != 1:
        raise ValueError("duality applies to the constant-coupling model (k = 1)")
    lam = params.lam * params.T[0]
    if lam == 0.0:
        raise ValueError("duality needs a nonzero coupling")
    dual = ModelParams(4.0 / lam, (1.0,), params.omega, params.alpha_exact)
    b = rational_bands(dual, theta_samples, e_resolution, method)
    return BandSet(b.bands.scaled(abs(lam) / 2.0), b.p, b.q, b.P, theta_samples, method + "+duality")


def spectrum_measure(b: BandSet) -> float:
    return union_measure(b.bands)


def truncated_spectrum_oracle(params: ModelParams, theta: float, N: int, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of the N x N Dirichlet truncation (diagonal = potential at
    n = 0..N-1, off-diagonal 1) by Sturm-sequence bisection, ascending."""
    if N < 2:
        raise ValueError("N must be >= 2")
    diag = potential_sequence(params, theta, N)
    return kernels.tridiag_eigvalsh(diag, np.ones(N - 1), tol)


def constant_coupling_reference(lam: float) -> dict:
    """Closed-form values for the constant-coupling model at coupling lambda:
    the exponent on the spectrum, the measure formula ``4|1 - 2/|lambda||``
    for |lambda| > 2 and ``|4 - 2|lambda||`` from Aubry duality. The two
    measures disagree for |lambda| > 2."""
    a = abs(lam)
    if a > 2:
        formula = 4.0 * abs(1.0 - 2.0 / a)
        exponent = math.log(a / 2.0)
    elif a == 2:
        formula = 0.0
        exponent = 0.0
    else:
        formula = 4.0 * abs(1.0 - a / 2.0)
        exponent = 0.0
    return {"lambda": lam, "exponent": exponent, "measure_formula": formula,
            "measure_duality": abs(4.0 - 2.0 * a)}


def edge_weights(params: ModelParams, theta: float, N: int, edge: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of the Dirichlet truncation with, for each, the eigenvector
    weight on the ``edge`` sites nearest either end. Weights close to 1 mark
    states bound to a truncation boundary."""
    diag = potential_sequence(params, theta, N)
    H = np.diag(diag) + np.diag(np.ones(N - 1), 1) + np.diag(np.ones(N - 1), -1)
    w, V = np.linalg.eigh(H)
    sq = V * V
    weight = sq[:edge].sum(axis=0) + sq[N - edge:].sum(axis=0)
    return w, weight
