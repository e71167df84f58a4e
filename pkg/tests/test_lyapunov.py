import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasispec.arithmetic import GOLDEN
from quasispec.lyapunov import (free_exponent, herman_lower_bound, le_sweep, lm_phase_average,
                                lyapunov_estimate)
from quasispec.model import TWO_PI, ModelParams, PhasePoint, cocycle_product

GOLDEN_OMEGA = TWO_PI * GOLDEN
SHORT = (64, 256, 1024)


def amo(lam, T=(1.0,)):
    return ModelParams(lam, T, GOLDEN_OMEGA)


def test_free_cocycle_elliptic_region():
    assert lm_phase_average(amo(0.0), 1.0, 10_000, grid_size=4) <= 0.01


def test_unipotent_case():
    p = amo(1.0, (0.0, 10.0))
    value = lm_phase_average(p, 0.0, 10_000, grid_size=16)
    assert value <= math.log(math.sqrt(2 + 100.0 * 1e8)) / 1e4


def test_supercritical_at_zero_energy():
    assert lm_phase_average(amo(6.0), 0.0, 10_000, grid_size=32) >= math.log(3) - 0.05


def test_estimate_is_min_over_schedule():
    p = amo(1.5, (1.0, 2.0))
    est = lyapunov_estimate(p, 0.3, SHORT, grid_size=32)
    singles = [lm_phase_average(p, 0.3, m, grid_size=32) for m in SHORT]
    np.testing.assert_allclose(est.schedule_values, singles, rtol=0, atol=1e-13)
    assert est.value == min(est.schedule_values)
    assert est.m == SHORT[int(np.argmin(singles))]
    assert est.value >= -10 * est.spread


def test_herman_values():
    assert herman_lower_bound(amo(6.0)) == pytest.approx(math.log(3), abs=1e-15)
    assert herman_lower_bound(amo(2.0, (4.0, 1.0))) == pytest.approx(math.log(2), abs=1e-15)
    assert herman_lower_bound(amo(2.0, (4.0, 0.0))) == -math.inf
    assert herman_lower_bound(amo(0.0)) == -math.inf


@given(st.floats(0.5, 8), st.lists(st.floats(0.3, 4), min_size=1, max_size=3), st.floats(-6, 6))
def test_herman_dominance_short_schedule(lam, T, E):
    p = amo(lam, tuple(T))
    est = lyapunov_estimate(p, E, (256, 512), grid_size=16)
    assert est.value >= herman_lower_bound(p) - 0.05


def test_free_sweep_closed_form():
    sweep = le_sweep(amo(0.0), np.linspace(-4, 4, 17), (1024, 4096), grid_size=2, threads=1)
    for E, est in sweep:
        if abs(E) < 2:
            assert est.value <= 0.01
        elif abs(E) > 2.5:
            assert abs(est.value - free_exponent(E)) <= 0.02


def test_sweep_order_and_thread_independence():
    p = amo(2.5, (1.0, -2.0))
    energies = [1.5, -3.0, 0.0, 2.2, -0.7]
    serial = le_sweep(p, energies, SHORT, grid_size=16, threads=1)
    parallel = le_sweep(p, energies, SHORT, grid_size=16, threads=4)
    assert [E for E, _ in serial] == energies
    assert serial == parallel


def test_thread_count_from_environment(monkeypatch):
    from quasispec.lyapunov import default_threads

    monkeypatch.setenv("QUASISPEC_THREADS", "3")
    assert default_threads() == 3


def test_shift_invariance_between_residues():
    p = amo(3.0, (1.0, 2.0, 0.5))
    ests = [lyapunov_estimate(p, 0.4, (4096,), grid_size=64, residues=[h]) for h in range(3)]
    for e in ests[1:]:
        assert abs(e.value - ests[0].value) <= 2 * max(e.spread, ests[0].spread)


def test_reduction_consistency():
    # (1/k) times the exponent of the k-step cocycle over theta -> theta + k omega
    p = amo(2.0, (1.0, 3.0))
    full = lyapunov_estimate(p, 0.5, (4096,), grid_size=64, residues=[0])
    m = 2048
    logs = []
    for theta in TWO_PI * np.arange(64) / 64:
        logs.append(cocycle_product(p, 0.5, PhasePoint(theta, 0), 2 * m).log_norm())
    reduced = math.fsum(logs) / 64 / m
    assert abs(reduced / 2 - full.value) <= 2 * full.spread


def test_operator_norm_close_to_schmidt_norm():
    p = amo(1.5)
    m = 512
    schmidt, operator = [], []
    for theta in TWO_PI * np.arange(32) / 32:
        prod = cocycle_product(p, 0.3, PhasePoint(theta), m)
        schmidt.append(prod.log_norm() / m)
        operator.append((prod.log_scale + math.log(np.linalg.norm(prod.mat.to_array(), 2))) / m)
    assert abs(np.mean(schmidt) - np.mean(operator)) <= math.log(math.sqrt(2)) / m + 1e-15


def test_modulus_of_continuity_shrinks_with_refinement():
    p = amo(3.0)
    coarse = [e.value for _, e in le_sweep(p, np.linspace(-1, 1, 9), (1024,), 32, threads=1)]
    fine = [e.value for _, e in le_sweep(p, np.linspace(-1, 1, 17), (1024,), 32, threads=1)]
    assert np.max(np.abs(np.diff(fine))) <= np.max(np.abs(np.diff(coarse))) + 1e-3


def test_invalid_arguments():
    with pytest.raises(ValueError):
        lm_phase_average(amo(1.0), 0.0, 0)
    with pytest.raises(ValueError):
        lyapunov_estimate(amo(1.0), 0.0, (), grid_size=4)


def test_free_exponent_values():
    assert free_exponent(1.0) == 0.0
    assert free_exponent(2.5) == pytest.approx(math.log(2.0))
