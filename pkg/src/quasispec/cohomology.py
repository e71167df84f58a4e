"""Cohomological equation, one conjugation step for k = 2 with T(0) = 0, and
the reduction of the alternating-sign coupling to the constant one.

With T(0) = 0 the two-step cocycle at E = 0 is ``[[-1, c], [0, -1]]`` with
``c = lambda T(1) cos(theta + omega)``. The matrices here are written in the
basis flipped by ``D = diag(1, -1)``, where this reads ``[[-1, -c], [0, -1]]``.
Conjugating by ``[[1, h], [0, 1]]`` then removes ``c`` once
``h(phi + 2 omega) - h(phi) = lambda T(1) cos(phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SmallDivisorError
from .lyapunov import SWEEP_SCHEDULE, le_sweep
from .model import TWO_PI, ModelParams
from .numerics import TrigPolynomial

RESIDUAL_GRID = 4096
DEFAULT_FLOOR = 1e-8
SLOPE_ENERGIES = tuple(10.0 ** e for e in (-3.0, -2.5, -2.0, -1.5, -1.0))


@dataclass(frozen=True)
class CohomologySolution:
    h: TrigPolynomial
    step: float
    smallest_divisor: float
    residual_sup: float


def solve_cohomological(rhs: TrigPolynomial, step: float,
                        divisor_floor: float = DEFAULT_FLOOR) -> CohomologySolution:
    """Solve ``h(phi + step) - h(phi) = rhs(phi)`` by dividing each Fourier mode
    by ``exp(i n step) - 1``. The zero mode of h is set to 0."""
    if rhs.degree > 10 ** 4:
        raise ValueError("rhs degree above 10^4")
    if not rhs.is_real:
        raise ValueError("rhs must be real-valued")
    scale = max(1.0, float(np.max(np.abs(rhs.coeffs))))
    if abs(rhs.mean()) > 1e-14 * scale:
        raise ValueError(f"rhs has nonzero mean {rhs.mean().real:.3e}; no solution exists")
    modes = rhs.modes()
    c = rhs.coeffs
    out = np.zeros_like(c)
    smallest = math.inf
    for j, n in enumerate(modes):
        if n == 0 or c[j] == 0:
            continue
        div = np.exp(1j * n * step) - 1.0
        if abs(div) < divisor_floor:
            raise SmallDivisorError(int(n), float(abs(div)), divisor_floor)
        smallest = min(smallest, float(abs(div)))
        out[j] = c[j] / div
    # restore exact conjugate symmetry lost to rounding
    out = 0.5 * (out + np.conj(out[::-1]))
    h = TrigPolynomial(out)
    grid = max(RESIDUAL_GRID, 4 * rhs.degree)
    return CohomologySolution(h, step, smallest, equation_residual(h, rhs, step, grid))


def equation_residual(h: TrigPolynomial, rhs: TrigPolynomial, step: float, grid: int = RESIDUAL_GRID) -> float:
    phi = TWO_PI * np.arange(grid) / grid
    return float(np.max(np.abs(h(phi + step) - h(phi) - rhs(phi))))


def cohomology_rhs(params: ModelParams) -> TrigPolynomial:
    """``lambda T(1) cos(phi)``: the off-diagonal term to be removed."""
    return TrigPolynomial.cosine(params.lam * params.T[1])


def closed_form_h(params: ModelParams) -> TrigPolynomial:
    """``lambda T(1) sin(phi - omega) / (2 sin omega)`` as a trigonometric polynomial."""
    amp = params.lam * params.T[1] / (2.0 * math.sin(params.omega))
    return TrigPolynomial.cosine(amp, -params.omega - 0.5 * math.pi)


def solve_for_model(params: ModelParams, divisor_floor: float = DEFAULT_FLOOR) -> CohomologySolution:
    _require_model(params)
    return solve_cohomological(cohomology_rhs(params), 2.0 * params.omega, divisor_floor)


def _require_model(params: ModelParams) -> None:
    if params.k != 2:
        raise ValueError("the conjugation step is derived for k = 2")
    if params.T[0] != 0.0:
        raise ValueError("the conjugation step needs T(0) = 0")


def _conjugated(params: ModelParams, E: float, theta: np.ndarray, h: TrigPolynomial) -> np.ndarray:
    c = params.lam * params.T[1] * np.cos(theta + params.omega)
    # two-step product, then flipped by D: entries (1,2) and (2,1) change sign
    b11 = (E - c) * E - 1.0
    b12 = E - c
    b21 = -E * np.ones_like(theta)
    b22 = -np.ones_like(theta)
    h1 = np.asarray(h(theta + params.omega), dtype=float)
    h3 = np.asarray(h(theta + 3.0 * params.omega), dtype=float)
    # [[1, -h3], [0, 1]] B [[1, h1], [0, 1]]
    m11 = b11 - h3 * b21
    m12 = (b11 - h3 * b21) * h1 + b12 - h3 * b22
    m21 = b21
    m22 = b21 * h1 + b22
    return np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)


def conjugated_cocycle(params: ModelParams, E: float, theta: float, h: TrigPolynomial) -> np.ndarray:
    """The conjugated two-step cocycle at one phase as a 2x2 array."""
    _require_model(params)
    return _conjugated(params, float(E), np.asarray([float(theta)]), h)[0]


def residual_sup(params: ModelParams, E: float, h: TrigPolynomial, grid: int = RESIDUAL_GRID) -> float:
    """Sup over a theta grid of the Schmidt norm of ``conjugated + I``."""
    _require_model(params)
    theta = TWO_PI * np.arange(grid) / grid
    m = _conjugated(params, float(E), theta, h)
    m[:, 0, 0] += 1.0
    m[:, 1, 1] += 1.0
    return float(np.max(np.sqrt(np.sum(m * m, axis=(1, 2)))))


@dataclass(frozen=True)
class SlopeFit:
    energies: tuple[float, ...]
    residuals: tuple[float, ...]
    slope: float


def residual_slope(params: ModelParams, h: TrigPolynomial,
                   energies: Sequence[float] = SLOPE_ENERGIES, grid: int = RESIDUAL_GRID) -> SlopeFit:
    """Least-squares slope of log(residual_sup) against log|E|."""
    res = [residual_sup(params, E, h, grid) for E in energies]
    x = np.log(np.abs(np.asarray(energies, dtype=float)))
    y = np.log(np.asarray(res))
    slope = float(np.polyfit(x, y, 1)[0])
    return SlopeFit(tuple(float(e) for e in energies), tuple(res), slope)


def alternating_params(lam: float, omega: float) -> tuple[ModelParams, ModelParams]:
    """(T = {1, -1} at omega, constant coupling at omega + pi mod 2 pi)."""
    alt = ModelParams(lam, (1.0, -1.0), omega)
    shifted = (omega + math.pi) % TWO_PI
    return alt, ModelParams(lam, (1.0,), shifted)


# Extended precision (80-bit on x86) for phase reduction; where longdouble is
# plain double this degrades to ordinary rounding.
_PI_LD = np.longdouble("3.14159265358979323846264338327950288")


def _potential(lam: float, T: Sequence[float], omega, theta: float, m: int) -> np.ndarray:
    n = np.arange(m)
    phase = np.mod(np.longdouble(theta) + n.astype(np.longdouble) * omega, 2 * _PI_LD)
    return lam * np.asarray(T, dtype=float)[n % len(T)] * np.cos(phase).astype(float)


def _product(E: float, V: np.ndarray) -> tuple[np.ndarray, float]:
    a11, a12, a21, a22, logs = 1.0, 0.0, 0.0, 1.0, 0.0
    for v in (E - V).tolist():
        a11, a12, a21, a22 = v * a11 - a21, v * a12 - a22, a11, a12
        big = max(abs(a11), abs(a12), abs(a21), abs(a22))
        if big > 1e100:
            a11, a12, a21, a22 = a11 / big, a12 / big, a21 / big, a22 / big
            logs += math.log(big)
    return np.array([[a11, a12], [a21, a22]]), logs


def amo_equivalence_check(lam: float, omega: float, E: float, theta: float, m: int) -> float:
    """Max entrywise difference of the two m-step products, relative to the
    larger product's scale (the products grow like exp(m L)).

    Phases ``theta + n omega`` are reduced in extended precision and the shifted
    frequency ``omega + pi`` is formed there too, so the comparison measures
    the identity rather than the rounding of ``omega + pi`` accumulated over m
    steps."""
    if m > 10 ** 6:
        raise ValueError("m above 10^6")
    if m < 1:
        raise ValueError("m must be >= 1")
    om = np.longdouble(omega)
    shifted = np.mod(om + _PI_LD, 2 * _PI_LD)
    a, la = _product(E, _potential(lam, (1.0, -1.0), om, theta, m))
    b, lb = _product(E, _potential(lam, (1.0,), shifted, theta, m))
    s = max(la, lb)
    a, b = a * math.exp(la - s), b * math.exp(lb - s)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    return float(np.max(np.abs(a - b)) / scale)


def equivalence_sweep(lam: float, omega: float, energies: Sequence[float],
                      schedule=SWEEP_SCHEDULE, grid_size: int = 256, threads: int | None = None) -> float:
    """Max pointwise difference of Lyapunov estimates of the two models."""
    alt, amo = alternating_params(lam, omega)
    la = le_sweep(alt, energies, schedule, grid_size, threads)
    lb = le_sweep(amo, energies, schedule, grid_size, threads)
    return max(abs(x.value - y.value) for (_, x), (_, y) in zip(la, lb))
