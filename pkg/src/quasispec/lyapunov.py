"""Lyapunov exponents of the periodic-coupling cocycle.

``L_m(E)`` is the average over the invariant measure of the circle times Z_k
(uniform phase grid on each residue) of ``(1/m) log ||A^m||`` with the Schmidt
norm; ``L(E) = inf_m L_m(E)`` is estimated by the minimum over a schedule.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .model import TWO_PI, ModelParams

DEFAULT_GRID = 512
CERTIFY_SCHEDULE = tuple(2 ** j for j in range(6, 21))
SWEEP_SCHEDULE = tuple(2 ** j for j in range(6, 15))


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    m: int
    grid: int
    spread: float
    schedule_values: tuple[float, ...] = ()


def _starts(params: ModelParams, grid_size: int, residues: Sequence[int] | None):
    if residues is None:
        residues = range(params.k)
    residues = list(residues)
    theta = TWO_PI * np.arange(grid_size) / grid_size
    th0 = np.tile(theta, len(residues))
    h0 = np.repeat(np.asarray(residues, dtype=np.int64), grid_size)
    return th0, h0


def _per_orbit_rates(params, E, schedule, grid_size, residues):
    schedule = np.asarray(sorted(set(int(m) for m in schedule)), dtype=np.int64)
    if len(schedule) == 0 or schedule[0] < 1:
        raise ValueError("schedule must contain positive step counts")
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    th0, h0 = _starts(params, grid_size, residues)
    logs = kernels.orbit_log_norms(float(E), params.lam, np.asarray(params.T), params.omega,
                                   th0, h0, schedule)
    return schedule, logs / schedule[None, :]


def _mean(values: np.ndarray) -> float:
    # fsum: exact, so the result does not depend on summation order
    return math.fsum(values.tolist()) / len(values)


def lm_phase_average(params: ModelParams, E: float, m: int, grid_size: int = DEFAULT_GRID,
                     residues: Sequence[int] | None = None) -> float:
    """Phase average of ``(1/m) log ||A^m(theta, h)||`` over a uniform theta grid
    on each residue h."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _, rates = _per_orbit_rates(params, E, [m], grid_size, residues)
    return _mean(rates[:, 0])


def lyapunov_estimate(params: ModelParams, E: float, schedule: Iterable[int] = CERTIFY_SCHEDULE,
                      grid_size: int = DEFAULT_GRID,
                      residues: Sequence[int] | None = None) -> LyapunovEstimate:
    """Minimum of ``L_m(E)`` over the schedule, with the attaining m.

    All schedule entries share one pass over each orbit (prefix reuse).
    ``spread`` is the max - min of the per-phase rates at the attaining m.
    """
    sched, rates = _per_orbit_rates(params, E, schedule, grid_size, residues)
    lm = [_mean(rates[:, j]) for j in range(len(sched))]
    j = int(np.argmin(lm))
    spread = float(np.max(rates[:, j]) - np.min(rates[:, j]))
    return LyapunovEstimate(lm[j], int(sched[j]), grid_size, spread, tuple(lm))


def herman_lower_bound(params: ModelParams) -> float:
    """``log((|lambda|/2) * geometric mean of |T(j)|)``; ``-inf`` if any factor vanishes."""
    if params.lam == 0.0 or any(t == 0.0 for t in params.T):
        return -math.inf
    return math.log(abs(params.lam) / 2.0) + math.fsum(math.log(abs(t)) for t in params.T) / params.k


def default_threads() -> int:
    env = os.environ.get("QUASISPEC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def le_sweep(params: ModelParams, energies: Sequence[float], schedule: Iterable[int] = SWEEP_SCHEDULE,
             grid_size: int = DEFAULT_GRID, threads: int | None = None) -> list[tuple[float, LyapunovEstimate]]:
    """Lyapunov estimates over an energy grid, in input order.

    Each energy is an independent task; the compiled kernel releases the GIL so
    a thread pool runs them concurrently. Results do not depend on ``threads``.
    """
    schedule = tuple(schedule)
    energies = [float(e) for e in energies]
    threads = default_threads() if threads is None else max(1, int(threads))

    def one(E):
        return E, lyapunov_estimate(params, E, schedule, grid_size)

    if threads == 1 or len(energies) < 2:
        return [one(E) for E in energies]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, energies))


def free_exponent(E: float) -> float:
    """Closed-form exponent of the constant free cocycle ``[[E, -1], [1, 0]]``."""
    a = abs(E)
    if a <= 2.0:
        return 0.0
    return math.log((a + math.sqrt(a * a - 4.0)) / 2.0)
