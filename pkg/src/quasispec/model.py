"""The operator family: parameters, skew-product base dynamics on the circle
times Z_k, potential, transfer matrices and cocycle products.

Products are ordered with later steps applied on the left:
``A(x_{m-1}) ... A(x_1) A(x_0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from ._backend import kernels
from .numerics import Mat2, ScaledMat2

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``lam``, period couplings ``T`` (length k) and frequency ``omega``.

    ``alpha_exact`` optionally records the frequency ``omega / 2pi`` as an exact
    fraction; spectra of periodic approximants require it.
    """

    lam: float
    T: tuple[float, ...]
    omega: float
    alpha_exact: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "T", tuple(float(t) for t in self.T))
        if len(self.T) < 1:
            raise ValueError("coupling sequence T must have at least one entry")
        if not (0.0 < self.omega < TWO_PI):
            raise ValueError(f"omega must lie in (0, 2pi), got {self.omega!r}")
        if not all(math.isfinite(t) for t in self.T) or not math.isfinite(self.lam):
            raise ValueError("lambda and T must be finite")

    @classmethod
    def from_alpha(cls, lam: float, T: Sequence[float], alpha) -> "ModelParams":
        """Build from ``alpha = omega / 2pi``; a Fraction keeps the exact value."""
        exact = alpha if isinstance(alpha, Fraction) else None
        a = float(alpha) % 1.0
        return cls(lam, tuple(T), TWO_PI * a, alpha_exact=None if exact is None else exact % 1)

    @property
    def k(self) -> int:
        return len(self.T)

    @property
    def alpha(self) -> float:
        return self.omega / TWO_PI

    @property
    def max_coupling(self) -> float:
        """``|lambda| * max_j |T(j)|``, the sup norm of the potential."""
        return abs(self.lam) * max(abs(t) for t in self.T)

    @property
    def energy_bound(self) -> float:
        """Any spectral energy satisfies ``|E| <= 2 + |lambda| max|T|``."""
        return 2.0 + self.max_coupling

    def with_alpha(self, alpha) -> "ModelParams":
        return ModelParams.from_alpha(self.lam, self.T, alpha)

    def with_lambda(self, lam: float) -> "ModelParams":
        return ModelParams(lam, self.T, self.omega, self.alpha_exact)


@dataclass(frozen=True)
class PhasePoint:
    """A point (theta, h) of the circle times Z_k; theta is kept in [0, 2pi)."""

    theta: float
    h: int = 0

    def wrapped(self, k: int) -> "PhasePoint":
        return PhasePoint(self.theta % TWO_PI, self.h % k)


def skew_step(p: PhasePoint, params: ModelParams) -> PhasePoint:
    """Base map ``(theta, h) -> (theta + omega mod 2pi, h + 1 mod k)``."""
    theta = p.theta + params.omega
    if theta >= TWO_PI:
        theta -= TWO_PI
    return PhasePoint(theta % TWO_PI, (p.h + 1) % params.k)


def potential(params: ModelParams, theta: float, n: int) -> float:
    """``lambda * T(n mod k) * cos(theta + n omega)`` for any integer n."""
    return params.lam * params.T[n % params.k] * math.cos(theta + n * params.omega)


def one_step_matrix(params: ModelParams, E: float, p: PhasePoint) -> Mat2:
    """Transfer matrix at a base point: ``[[E - lambda T(h) cos(theta), -1], [1, 0]]``."""
    v = params.lam * params.T[p.h % params.k] * math.cos(p.theta)
    return Mat2(E - v, -1.0, 1.0, 0.0)


def transfer_matrix(params: ModelParams, E: float, theta: float, n: int) -> Mat2:
    """Transfer matrix of site n: ``[[E - V(n), -1], [1, 0]]`` (det exactly 1)."""
    return Mat2(E - potential(params, theta, n), -1.0, 1.0, 0.0)


def cocycle_product(params: ModelParams, E: float, start: PhasePoint, m: int) -> ScaledMat2:
    """The m-step product ``A(x_{m-1}) ... A(x_0)`` along the orbit of ``start``.

    Returned in rescaled form: the matrix has Schmidt norm in [1, e) and the
    natural-log scale is accumulated separately. ``m = 0`` gives (I, 0).
    """
    if m < 0:
        raise ValueError("m must be >= 0; use inverse_cocycle_product for backward blocks")
    a11, a12, a21, a22, logs = kernels.orbit_product(
        E, params.lam, params.T, params.omega, start.theta, start.h, m, False)
    return ScaledMat2(Mat2(a11, a12, a21, a22), logs)


def inverse_cocycle_product(params: ModelParams, E: float, start: PhasePoint, m: int) -> ScaledMat2:
    """Inverse of the m-step block ending at ``start``.

    This is ``A^{-1}(x_{-m}) ... A^{-1}(x_{-1})`` with ``x_{-j}`` the j-th
    backward iterate of ``start``; one-step inverses are ``[[0, 1], [-1, E - V]]``.
    It maps the solution vector at ``start`` back m sites.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    a11, a12, a21, a22, logs = kernels.orbit_product(
        E, params.lam, params.T, params.omega, start.theta, start.h, m, True)
    return ScaledMat2(Mat2(a11, a12, a21, a22), logs)


def orbit_point(params: ModelParams, start: PhasePoint, m: int) -> PhasePoint:
    """The m-th iterate of ``start`` (negative m goes backwards)."""
    theta = (start.theta + m * params.omega) % TWO_PI
    return PhasePoint(theta, (start.h + m) % params.k)


def reduced_cocycle(params: ModelParams, E: float, theta: float) -> Mat2:
    """k-step product from residue 0: the cocycle over ``theta -> theta + k omega``."""
    m = Mat2.identity()
    p = PhasePoint(theta % TWO_PI, 0)
    for _ in range(params.k):
        m = one_step_matrix(params, E, p) @ m
        p = skew_step(p, params)
    return m


def birkhoff_average(params: ModelParams, f: Callable[[float, int], float],
                     start: PhasePoint, m: int) -> float:
    """Time average ``(1/m) sum_j f(orbit_j)`` of a pointwise observable."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = start.wrapped(params.k)
    vals = []
    for _ in range(m):
        vals.append(f(p.theta, p.h))
        p = skew_step(p, params)
    return math.fsum(vals) / m


def two_dim_reduction_check(lam: float, omega1: float, omega2: float, theta: float, n: int) -> float:
    """Residual of the identity
    ``cos(t + n w1) + cos(t + n w2) = 2 cos(t + n(w1+w2)/2) cos(n(w1-w2)/2)``
    scaled by lambda."""
    lhs = lam * math.cos(theta + n * omega1) + lam * math.cos(theta + n * omega2)
    rhs = 2.0 * lam * math.cos(theta + 0.5 * n * (omega1 + omega2)) * math.cos(0.5 * n * (omega1 - omega2))
    return abs(lhs - rhs)
