"""The compiled kernels and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renormqp import kernels

py = kernels.get_backend("python")
try:
    cy = kernels.get_backend("cython")
except ImportError:
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_horner_matches_numpy_polyval():
    c = np.array([1.0, -2.0, 0.5, 0.25]) + 0j
    z = np.array([0.3, -1.1 + 0.4j, 2.0])
    want = np.polynomial.polynomial.polyval(z - 0.2, c)
    assert np.allclose(kernels.horner(c, 0.2, z), want, atol=1e-14)


def test_qp_eval_matches_direct_sum():
    rng = np.random.default_rng(3)
    K, n = 2, 4
    t = rng.normal(size=(2 * K + 1, n + 1)) + 1j * rng.normal(size=(2 * K + 1, n + 1))
    th, z = 0.37, 0.6 - 0.2j
    want = sum(
        np.exp(2j * np.pi * k * th) * np.polynomial.polynomial.polyval(z - 0.2, t[k + K])
        for k in range(-K, K + 1)
    )
    assert abs(kernels.qp_eval(t, 0.2, th, z)[0] - want) < 1e-12


def test_flm_orbit_one_step_by_hand():
    x, d = kernels.flm_orbit(3.5, 0.1, 0.3, 0.0, 0.4, 1)
    assert x[0] == pytest.approx(3.5 * 0.4 * 0.6 * 1.1)
    assert d[0] == pytest.approx(3.5 * 1.1 * 0.2)
    x, d = kernels.flm_orbit(3.5, 0.1, 0.3, 0.0, 0.4, 1, additive=True)
    assert x[0] == pytest.approx(3.5 * 0.4 * 0.6 + 0.1)


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 30), st.integers(1, 200), st.integers(0, 2**32 - 1))
def test_horner_parity(deg, m, seed):
    rng = np.random.default_rng(seed)
    c = (rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)) * 0.6 ** np.arange(deg + 1)
    z = 0.2 + 1.4 * rng.random(m) * np.exp(2j * np.pi * rng.random(m))
    a, b = py.horner(c, 0.2, z), cy.horner(c, 0.2, z)
    assert np.abs(a - b).max() <= 1e-13 * max(1.0, np.abs(a).max())


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(0, 20), st.integers(1, 100), st.integers(0, 2**32 - 1))
def test_qp_eval_parity(K, deg, m, seed):
    rng = np.random.default_rng(seed)
    shape = (2 * K + 1, deg + 1)
    t = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * 0.6 ** np.arange(deg + 1)
    z = 0.2 + 1.4 * rng.random(m) * np.exp(2j * np.pi * rng.random(m))
    th = rng.random(m) * 4 - 2
    a, b = py.qp_eval(t, 0.2, th, z), cy.qp_eval(t, 0.2, th, z)
    assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())


@needs_ext
@pytest.mark.parametrize("additive", [False, True])
def test_flm_orbit_parity(additive):
    rng = np.random.default_rng(5)
    th, x = rng.random(64), rng.uniform(0.2, 0.8, 64)
    a = py.flm_orbit(3.55, 0.01, 0.618, th, x, 500, additive)
    b = cy.flm_orbit(3.55, 0.01, 0.618, th, x, 500, additive)
    # period-4 regime: orbits are attracted, so the two backends stay close
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-10)
    assert np.allclose(a[1], b[1], rtol=1e-8, atol=1e-300)


def test_env_forces_fallback():
    env = dict(os.environ, RENORMQP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from renormqp import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
