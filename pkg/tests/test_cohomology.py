import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasispec.arithmetic import GOLDEN
from quasispec.cohomology import (amo_equivalence_check, closed_form_h, cohomology_rhs, conjugated_cocycle,
                                  equation_residual, equivalence_sweep, residual_slope, residual_sup,
                                  solve_cohomological, solve_for_model)
from quasispec.errors import SmallDivisorError
from quasispec.model import TWO_PI, ModelParams
from quasispec.numerics import TrigPolynomial

GOLDEN_OMEGA = TWO_PI * GOLDEN


def model(t1, omega=GOLDEN_OMEGA, lam=1.0):
    return ModelParams(lam, (0.0, t1), omega)


def test_zero_rhs():
    sol = solve_cohomological(TrigPolynomial.zero(3), 1.0)
    assert np.all(sol.h.coeffs == 0) and sol.residual_sup == 0.0


@pytest.mark.parametrize("t1", [1.0, 10.0, 100.0, -37.5])
def test_closed_form(t1):
    p = model(t1)
    sol = solve_for_model(p)
    np.testing.assert_allclose(sol.h.coeffs, closed_form_h(p).coeffs, rtol=0, atol=1e-12 * max(1, abs(t1)))
    phi = np.linspace(0, TWO_PI, 101)
    expected = t1 * np.sin(phi - p.omega) / (2 * math.sin(p.omega))
    np.testing.assert_allclose(sol.h(phi), expected, atol=1e-12 * max(1, abs(t1)))
    assert sol.residual_sup <= 1e-10 * max(1, abs(t1))
    assert sol.step == 2 * p.omega


def test_small_divisor_failure_names_mode():
    rhs = TrigPolynomial.from_modes({7: 1.0, -7: 1.0, 1: 0.5, -1: 0.5})
    with pytest.raises(SmallDivisorError) as info:
        solve_cohomological(rhs, TWO_PI * 3 / 7)
    assert abs(info.value.mode) == 7 and info.value.divisor < 1e-8


def test_nonzero_mean_and_complex_rejected():
    with pytest.raises(ValueError):
        solve_cohomological(TrigPolynomial.from_modes({0: 1.0, 1: 1.0, -1: 1.0}), 1.0)
    with pytest.raises(ValueError):
        solve_cohomological(TrigPolynomial.from_modes({1: 1.0}), 1.0)


@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=8),
       st.floats(0.05, TWO_PI - 0.05))
def test_solver_residual(coeffs, step):
    modes = {}
    for n, (re, im) in enumerate(coeffs, start=1):
        modes[n] = complex(re, im)
        modes[-n] = complex(re, -im)
    rhs = TrigPolynomial.from_modes(modes)
    try:
        sol = solve_cohomological(rhs, step, divisor_floor=1e-3)
    except SmallDivisorError:
        return
    scale = max(1.0, float(np.max(np.abs(rhs.coeffs)))) / sol.smallest_divisor
    assert sol.residual_sup <= 1e-10 * scale
    assert equation_residual(sol.h, rhs, step, 4 * max(rhs.degree, 1) * 16) <= 1e-10 * scale
    assert abs(sol.h.mean()) == 0


@given(st.floats(-100, 100), st.floats(0.01, TWO_PI - 0.01).filter(lambda w: abs(math.sin(w)) > 1e-3),
       st.floats(0, TWO_PI))
def test_conjugation_at_zero_energy_is_minus_identity(t1, omega, theta):
    p = model(t1, omega)
    h = solve_for_model(p).h
    b = conjugated_cocycle(p, 0.0, theta, h)
    scale = max(1.0, abs(t1) / abs(math.sin(omega)))
    assert np.max(np.abs(b + np.eye(2))) <= 1e-10 * scale


def test_degenerate_conjugation():
    p = model(0.0)
    b = conjugated_cocycle(p, 0.0, 0.4, TrigPolynomial.zero())
    np.testing.assert_array_equal(b, -np.eye(2))


def test_model_restrictions():
    with pytest.raises(ValueError):
        conjugated_cocycle(ModelParams(1.0, (1.0, 1.0), 1.0), 0.0, 0.0, TrigPolynomial.zero())
    with pytest.raises(ValueError):
        conjugated_cocycle(ModelParams(1.0, (0.0, 1.0, 1.0), 1.0), 0.0, 0.0, TrigPolynomial.zero())


def test_residual_small_energy_and_grid_refinement():
    p = model(1.0)
    h = solve_for_model(p).h
    assert residual_sup(p, 0.0, h) <= 1e-10
    r = residual_sup(p, 0.01, h)
    assert r <= 0.2 * 10  # |E| = 0.01 gives an O(0.01)-sized correction with a modest constant
    assert abs(residual_sup(p, 0.01, h, 8192) - residual_sup(p, 0.01, h, 4096)) <= 1e-8
    trend = [residual_sup(p, E, h) for E in (0.0, 0.01, 0.02, 0.05)]
    assert trend == sorted(trend)


def test_slope_fit():
    p = model(10.0)
    fit = residual_slope(p, solve_for_model(p).h)
    assert fit.slope >= 0.9
    assert len(fit.residuals) == 5


def test_rhs_matches_coupling():
    p = model(4.0, lam=2.0)
    assert cohomology_rhs(p)(0.0) == pytest.approx(8.0)


def test_equivalence_one_step_and_long_products():
    assert amo_equivalence_check(2.0, GOLDEN_OMEGA, 0.3, 1.1, 1) <= 1e-15
    assert amo_equivalence_check(3.0, GOLDEN_OMEGA, 0.7, 2.2, 10_000) <= 1e-8
    with pytest.raises(ValueError):
        amo_equivalence_check(3.0, GOLDEN_OMEGA, 0.7, 2.2, 10 ** 6 + 1)


def test_equivalence_sweep():
    assert equivalence_sweep(3.0, GOLDEN_OMEGA, [-2.0, 0.0, 1.5], (256, 1024), grid_size=32, threads=1) <= 1e-3
