"""Gordon-type non-decay diagnostics built on periodic approximants.

A frequency close to ``p/q`` makes the potential nearly ``2q``-periodic over
several periods. The four-norm inequality applied to the periodic block then
keeps solutions of the true operator from decaying. Everything below measures
that mechanism at one scale: potential error, block discrepancy and the
resulting witness norm. Large quantities are kept as natural logs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arithmetic import ContinuedFraction, continued_fraction_expand
from .model import TWO_PI, ModelParams, PhasePoint, cocycle_product, inverse_cocycle_product
from .numerics import Mat2, ScaledMat2

MAX_BLOCK = 10 ** 7
BLOCK_MULTIPLES = (1, 2, -1, -2)
DIRECTIONS = 64


def _log_norm2(x: float, y: float) -> float:
    r = math.hypot(x, y)
    return math.log(r) if r > 0 else -math.inf


def cfks_max_norm(A: Mat2, v: Sequence[float]) -> float:
    """``max(|Av|, |A^2 v|, |A^-1 v|, |A^-2 v|)`` for unimodular A and unit v."""
    if abs(A.det() - 1.0) > 1e-9:
        raise ValueError(f"matrix is not unimodular: det = {A.det()!r}")
    x, y = float(v[0]), float(v[1])
    if abs(math.hypot(x, y) - 1.0) > 1e-12:
        raise ValueError("v must be a unit vector")
    inv = A.inverse()
    best = 0.0
    for M in (A, A @ A, inv, inv @ inv):
        best = max(best, math.hypot(*M.apply((x, y))))
    return best


def random_sl2(rng: np.random.Generator, n: int, max_log_stretch: float = 6.0) -> np.ndarray:
    """n random SL(2,R) matrices ``R(a) diag(e^s, e^-s) R(b)`` as shape (n, 2, 2)."""
    a = rng.uniform(0, TWO_PI, n)
    b = rng.uniform(0, TWO_PI, n)
    s = rng.uniform(-max_log_stretch, max_log_stretch, n)

    def rot(t):
        c, si = np.cos(t), np.sin(t)
        return np.stack([np.stack([c, -si], -1), np.stack([si, c], -1)], -2)

    D = np.zeros((n, 2, 2))
    D[:, 0, 0] = np.exp(s)
    D[:, 1, 1] = np.exp(-s)
    return rot(a) @ D @ rot(b)


def cfks_fuzz(samples: int = 100_000, seed: int = 0, max_log_stretch: float = 6.0) -> float:
    """Minimum of the four-norm maximum over random unimodular matrices and unit vectors."""
    rng = np.random.default_rng(seed)
    A = random_sl2(rng, samples, max_log_stretch)
    t = rng.uniform(0, TWO_PI, samples)
    v = np.stack([np.cos(t), np.sin(t)], -1)[..., None]
    # inverse of [[a, b], [c, d]] with det 1 is [[d, -b], [-c, a]]
    inv = np.empty_like(A)
    inv[:, 0, 0], inv[:, 1, 1] = A[:, 1, 1], A[:, 0, 0]
    inv[:, 0, 1], inv[:, 1, 0] = -A[:, 0, 1], -A[:, 1, 0]
    norms = [np.linalg.norm(M @ v, axis=(1, 2)) for M in (A, A @ A, inv, inv @ inv)]
    return float(np.min(np.max(np.stack(norms), axis=0)))


@dataclass(frozen=True)
class PotentialError:
    measured: float
    bound: float
    p: int
    q: int
    is_convergent: bool

    @property
    def within_bound(self) -> bool:
        # a few ulps of slack for the measured side
        return self.measured <= self.bound + 1e-13


def _alpha_exact(params: ModelParams) -> Fraction:
    return params.alpha_exact if params.alpha_exact is not None else Fraction(params.alpha)


def _frequency_cf(params: ModelParams, cf: ContinuedFraction | None) -> ContinuedFraction:
    if cf is not None:
        return cf
    if params.alpha_exact is not None:
        return continued_fraction_expand(params.alpha_exact, max_terms=10 ** 6)
    return continued_fraction_expand(params.alpha)


def approximant_params(params: ModelParams, p: int, q: int) -> ModelParams:
    return ModelParams.from_alpha(params.lam, params.T, Fraction(p, q))


def approximant_potential_error(params: ModelParams, p: int, q: int, window_multiple: int = 4,
                                theta_samples: int = 64,
                                cf: ContinuedFraction | None = None) -> PotentialError:
    """Sup over ``|n| <= window_multiple * q`` and a theta grid of the potential
    change caused by replacing alpha with ``p/q``, next to the Lipschitz bound
    ``2 pi C window_multiple q |alpha - p/q|`` with ``C = |lambda| max|T|``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    cf = _frequency_cf(params, cf)
    is_conv = (p, q) in cf.convergents
    approx = approximant_params(params, p, q)
    W = window_multiple * q
    n = np.arange(-W, W + 1)
    T = params.lam * np.asarray(params.T)[n % params.k]
    theta = TWO_PI * np.arange(theta_samples) / theta_samples
    true_phase = np.outer(np.mod(n * params.omega, TWO_PI), np.ones(theta_samples)) + theta
    appr_phase = np.outer(np.mod(n * approx.omega, TWO_PI), np.ones(theta_samples)) + theta
    diff = np.abs(T[:, None] * (np.cos(true_phase) - np.cos(appr_phase)))
    measured = float(diff.max())
    dist = abs(_alpha_exact(params) - Fraction(p, q))
    bound = TWO_PI * params.max_coupling * W * float(dist)
    return PotentialError(measured, bound, p, q, is_conv)


@dataclass(frozen=True)
class GordonReport:
    level: int
    p: int
    q: int
    block_period: int
    sup_potential_error: float
    potential_error_bound: float
    matrix_discrepancy: float
    log_matrix_discrepancy: float
    log_telescoping_bound: float
    four_norm: float
    log_four_norm: float
    margin: float
    witness: float
    log_witness: float
    worst_direction_four_norm: float
    worst_direction_witness: float
    hypothesis_met: bool
    approximant_exact: bool
    approximant_periodic: bool
    is_convergent: bool

    @property
    def telescoping_bound(self) -> float:
        return math.exp(self.log_telescoping_bound) if self.log_telescoping_bound < 709.0 else math.inf

    @property
    def discrepancy_within_bound(self) -> bool | None:
        """None when the bound is not finite in double precision."""
        if not math.isfinite(self.telescoping_bound):
            return None
        return self.log_matrix_discrepancy <= self.log_telescoping_bound + 1e-9

    def to_dict(self) -> dict:
        d = asdict(self)
        d["telescoping_bound"] = self.telescoping_bound
        d["discrepancy_within_bound"] = self.discrepancy_within_bound
        return d


def gordon_hypothesis(params: ModelParams) -> bool:
    """``|lambda T(0) * lambda T(1)| > 4``: the coupling folded into T."""
    t0 = params.lam * params.T[0]
    t1 = params.lam * params.T[1 % params.k]
    return abs(t0 * t1) > 4.0


def _blocks(params: ModelParams, E: float, start: PhasePoint, T: int) -> dict[int, ScaledMat2]:
    out = {}
    for a in BLOCK_MULTIPLES:
        if a > 0:
            out[a] = cocycle_product(params, E, start, a * T)
        else:
            out[a] = inverse_cocycle_product(params, E, start, -a * T)
    return out


def _log_apply(m: ScaledMat2, v: tuple[float, float]) -> float:
    return m.log_scale + _log_norm2(*m.mat.apply(v))


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def gordon_diagnostics(params: ModelParams, E: float, theta: float, convergent_index: int,
                       v: Sequence[float] = (1.0, 0.0),
                       cf: ContinuedFraction | None = None) -> GordonReport:
    """Compare blocks of lengths ``a * 2q`` (a = +-1, +-2) from (theta, 0) for the
    true frequency and its ``convergent_index``-th convergent ``p/q``.

    ``four_norm`` is the four-norm maximum for the approximant (periodic) blocks,
    ``witness`` the same maximum for the true cocycle, ``margin = four_norm - 1/2``.
    """
    x, y = float(v[0]), float(v[1])
    if abs(math.hypot(x, y) - 1.0) > 1e-12:
        raise ValueError("v must be a unit vector")
    cf = _frequency_cf(params, cf)
    if not 1 <= convergent_index < len(cf.convergents):
        raise ValueError(f"frequency expanded to {len(cf.convergents) - 1} convergents, "
                         f"index {convergent_index} requested (levels start at 1)")
    p, q = cf.convergents[convergent_index]
    T = 2 * q
    if 2 * T > MAX_BLOCK:
        raise ValueError(f"block length {2 * T} exceeds {MAX_BLOCK} steps")
    approx = approximant_params(params, p, q)
    start = PhasePoint(theta % TWO_PI, 0)
    true_b = _blocks(params, E, start, T)
    appr_b = _blocks(approx, E, start, T)

    err = approximant_potential_error(params, p, q, cf=cf)
    log_d = max(true_b[a].diff_norm(appr_b[a])[1] for a in BLOCK_MULTIPLES)

    M = params.max_coupling
    M_bar = max(2.0 * (M + 2.0), M)
    if err.measured > 0:
        log_bound = math.log(2 * T) + (2 * T - 1) * math.log(M_bar) + math.log(err.measured)
    else:
        log_bound = -math.inf

    def four(blocks, vec):
        return max(_log_apply(blocks[a], vec) for a in BLOCK_MULTIPLES)

    log_g = four(appr_b, (x, y))
    log_w = four(true_b, (x, y))
    dirs = [(math.cos(t), math.sin(t)) for t in (math.pi * j / DIRECTIONS for j in range(DIRECTIONS))]
    worst_g = min(four(appr_b, d) for d in dirs)
    worst_w = min(four(true_b, d) for d in dirs)
    g = _safe_exp(log_g)
    return GordonReport(
        level=convergent_index, p=p, q=q, block_period=T,
        sup_potential_error=err.measured, potential_error_bound=err.bound,
        matrix_discrepancy=_safe_exp(log_d), log_matrix_discrepancy=log_d,
        log_telescoping_bound=log_bound,
        four_norm=g, log_four_norm=log_g, margin=g - 0.5,
        witness=_safe_exp(log_w), log_witness=log_w,
        worst_direction_four_norm=_safe_exp(worst_g), worst_direction_witness=_safe_exp(worst_w),
        hypothesis_met=gordon_hypothesis(params),
        approximant_exact=_alpha_exact(params) == Fraction(p, q),
        approximant_periodic=(T % params.k == 0),
        is_convergent=err.is_convergent,
    )
