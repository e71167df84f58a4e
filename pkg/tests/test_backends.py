import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasispec import _backend

py = _backend.get_kernels("python")
needs_c = pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="compiled extension not built")
OMEGA = math.pi * (math.sqrt(5) - 1)


@pytest.fixture(scope="module")
def cy():
    return _backend.get_kernels("cython")


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get_kernels("fortran")


@needs_c
@given(st.floats(-5, 5), st.floats(0, 4), st.lists(st.floats(-3, 3), min_size=1, max_size=3),
       st.floats(0, 2 * math.pi))
def test_orbit_product_agrees(cy, E, lam, T, theta):
    for inverse in (False, True):
        a = py.orbit_product(E, lam, T, OMEGA, theta, 0, 700, inverse)
        b = cy.orbit_product(E, lam, T, OMEGA, theta, 0, 700, inverse)
        assert abs(a[4] - b[4]) <= 1.0
        ma = np.array(a[:4]) * math.exp(a[4] - max(a[4], b[4]))
        mb = np.array(b[:4]) * math.exp(b[4] - max(a[4], b[4]))
        assert np.max(np.abs(ma - mb)) <= 1e-6 * max(1.0, np.max(np.abs(ma)))


@needs_c
def test_orbit_log_norms_agree(cy):
    theta = np.linspace(0, 6, 7)
    h = np.arange(7) % 2
    cps = [8, 64, 1000, 5000]
    a = py.orbit_log_norms(0.3, 2.5, [1.0, -0.5], OMEGA, theta, h, cps)
    b = cy.orbit_log_norms(0.3, 2.5, [1.0, -0.5], OMEGA, theta, h, cps)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-7)


@needs_c
def test_discriminant_grid_agrees(cy):
    E = np.linspace(-3, 3, 31)
    th = np.linspace(0, 6, 5)
    a = py.discriminant_grid(E, th, 1.5, [1.0, 2.0], 2 * math.pi * 8 / 13, 26)
    b = cy.discriminant_grid(E, th, 1.5, [1.0, 2.0], 2 * math.pi * 8 / 13, 26)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)


@needs_c
def test_eigen_kernels_agree(cy):
    rng = np.random.default_rng(0)
    d, off = rng.normal(size=60), rng.uniform(0.1, 1.0, 59)
    x = np.linspace(-4, 4, 33)
    np.testing.assert_array_equal(py.sturm_count(d, off * off, x), cy.sturm_count(d, off * off, x))
    ref = np.linalg.eigvalsh(np.diag(d) + np.diag(off, 1) + np.diag(off, -1))
    for k in (py, cy):
        np.testing.assert_allclose(k.tridiag_eigvalsh(d, off, 1e-11), ref, atol=1e-9)


@pytest.mark.parametrize("value,expected", [("1", "python"), ("0", None)])
def test_environment_selects_backend(value, expected):
    env = dict(os.environ, QUASISPEC_PURE_PYTHON=value)
    out = subprocess.run([sys.executable, "-c", "from quasispec._backend import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    if expected is None:
        expected = "cython" if "cython" in _backend.BACKENDS else "python"
    assert out == expected
