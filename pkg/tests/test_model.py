import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from quasispec.arithmetic import GOLDEN
from quasispec.model import (TWO_PI, ModelParams, PhasePoint, birkhoff_average, cocycle_product,
                             inverse_cocycle_product, one_step_matrix, orbit_point, potential, reduced_cocycle,
                             skew_step, transfer_matrix, two_dim_reduction_check)
from quasispec.numerics import Mat2, schmidt_norm

GOLDEN_OMEGA = TWO_PI * GOLDEN

params_st = st.builds(
    ModelParams,
    st.floats(-5, 5),
    st.lists(st.floats(-3, 3), min_size=1, max_size=4).map(tuple),
    st.floats(0.01, TWO_PI - 0.01),
)


def explicit_product(params, E, start, m):
    out, p = Mat2.identity(), start
    for _ in range(m):
        out = one_step_matrix(params, E, p) @ out
        p = skew_step(p, params)
    return out


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(1.0, (), 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, (1.0,), 0.0)
    with pytest.raises(ValueError):
        ModelParams(math.inf, (1.0,), 1.0)


def test_from_alpha_keeps_exact_value():
    p = ModelParams.from_alpha(2.0, [1, -1], Fraction(55, 89))
    assert p.alpha_exact == Fraction(55, 89)
    assert p.k == 2 and p.T == (1.0, -1.0)
    assert abs(p.alpha - 55 / 89) < 1e-16
    assert p.max_coupling == 2.0 and p.energy_bound == 4.0


def test_skew_step_wraps_both_coordinates():
    p = ModelParams(1.0, (1.0, 2.0, 3.0), 5.0)
    q = skew_step(PhasePoint(4.0, 2), p)
    assert q.h == 0 and abs(q.theta - (9.0 - TWO_PI)) < 1e-15


def test_transfer_matrix_is_unimodular():
    p = ModelParams(2.5, (1.0, -3.0), 1.1)
    for n in range(-5, 6):
        m = transfer_matrix(p, 0.7, 0.2, n)
        assert m.det() == 1.0
        assert m.a11 == 0.7 - potential(p, 0.2, n)


@given(params_st, st.floats(-6, 6), st.floats(0, TWO_PI), st.integers(0, 5), st.integers(0, 60))
def test_kernel_product_matches_explicit(params, E, theta, h, m):
    start = PhasePoint(theta, h % params.k)
    fast = cocycle_product(params, E, start, m).assemble()
    slow = explicit_product(params, E, start, m)
    assert fast.max_abs_diff(slow) <= 1e-9 * max(1.0, schmidt_norm(slow))


@given(params_st, st.floats(-6, 6), st.floats(0, TWO_PI), st.integers(1, 40))
def test_inverse_block_undoes_forward_block(params, E, theta, m):
    start = PhasePoint(theta, 0)
    end = orbit_point(params, start, m)
    fwd = cocycle_product(params, E, start, m)
    back = inverse_cocycle_product(params, E, end, m)
    prod = (back @ fwd).assemble()
    scale = math.exp(fwd.log_norm() + back.log_norm())
    assert prod.max_abs_diff(Mat2.identity()) <= 1e-9 * max(1.0, scale)


@given(params_st, st.floats(-6, 6), st.floats(0, TWO_PI), st.integers(1, 300))
def test_products_stay_unimodular(params, E, theta, m):
    prod = cocycle_product(params, E, PhasePoint(theta, 0), m)
    assert 1.0 <= schmidt_norm(prod.mat) < math.e or prod.log_scale == 0.0
    assume(prod.log_norm() < 300)
    # the determinant cancels catastrophically; roundoff grows like |A|^2 eps
    assert prod.det_defect() < 1e-13 * m * math.exp(2 * prod.log_norm()) + 1e-12


def test_zero_steps_is_identity():
    p = ModelParams(1.0, (1.0,), 1.0)
    prod = cocycle_product(p, 0.3, PhasePoint(0.1), 0)
    assert prod.mat == Mat2.identity() and prod.log_scale == 0.0
    with pytest.raises(ValueError):
        cocycle_product(p, 0.3, PhasePoint(0.1), -1)
    with pytest.raises(ValueError):
        inverse_cocycle_product(p, 0.3, PhasePoint(0.1), 0)


def test_unipotent_product_at_zero_energy():
    # T(0) = 0 and E = 0: the two-step block is [[-1, c], [0, -1]]
    p = ModelParams(1.0, (0.0, 10.0), GOLDEN_OMEGA)
    m = 10_000
    prod = cocycle_product(p, 0.0, PhasePoint(0.3), m)
    bound = math.log(math.sqrt(2 + 100.0 * m * m))
    assert prod.log_norm() <= bound


def test_reduced_cocycle_is_k_step_product():
    p = ModelParams(1.3, (2.0, -1.0, 0.5), 0.9)
    a = reduced_cocycle(p, 0.4, 1.2)
    b = cocycle_product(p, 0.4, PhasePoint(1.2, 0), 3).assemble()
    assert a.max_abs_diff(b) < 1e-12


def test_birkhoff_average_of_cosine_vanishes():
    p = ModelParams(1.0, (1.0,), GOLDEN_OMEGA)
    avg = birkhoff_average(p, lambda th, h: math.cos(th), PhasePoint(0.5), 100_000)
    assert abs(avg) < 1e-3
    p2 = ModelParams(1.0, (1.0, 2.0), GOLDEN_OMEGA)
    assert birkhoff_average(p2, lambda th, h: float(h), PhasePoint(0.5), 1000) == 0.5


@given(st.floats(-3, 3), st.floats(0, 6), st.floats(0, 6), st.floats(0, 6), st.integers(-100, 100))
def test_two_frequency_identity(lam, w1, w2, theta, n):
    assert two_dim_reduction_check(lam, w1, w2, theta, n) < 1e-9 * (1 + abs(n))
