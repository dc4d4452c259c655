import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conetrace.jets import Jet


def _scalar_jet(v, s, order=4):
    return Jet.variable(np.array([v]), np.array([s]), order)


def test_variable_and_ring_ops():
    x = _scalar_jet(2.0, 1.0)
    y = (x + 1.0) * (x - 3.0)  # (t+3)(t-1) at x=2: value -3, slope 2, curv 1
    assert np.allclose(y.coef.ravel(), [-3.0, 2.0, 1.0, 0.0, 0.0])


def test_reciprocal_matches_series():
    a = _scalar_jet(0.455, -0.152)
    inv = a.reciprocal()
    v, d = 0.455, -0.152
    expect = [1 / v, -d / v**2, d**2 / v**3, -(d**3) / v**4]
    got = inv.coef.ravel()[:4]
    assert np.allclose(got, expect, rtol=1e-13)


def test_sqrt_and_exp_against_finite_differences():
    def fn(t):
        z = 0.7 + 0.3 * t
        return math.exp(-1.0 / math.sqrt(z))

    x = Jet.variable(np.array([0.7]), np.array([0.3]), 3)
    jet = (-x.sqrt().reciprocal()).exp()
    h = 1e-2
    for k in (1, 2, 3):
        # Richardson-improved central differences of order k
        def fd(step):
            if k == 1:
                return (fn(step) - fn(-step)) / (2 * step)
            if k == 2:
                return (fn(step) - 2 * fn(0) + fn(-step)) / step**2
            return (fn(2 * step) - 2 * fn(step) + 2 * fn(-step) - fn(-2 * step)) / (
                2 * step**3
            )

        rich = (4 * fd(h / 2) - fd(h)) / 3
        assert abs(jet.derivative(k)[0] - rich) < 5e-6 * max(1, abs(rich))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=-2.0, max_value=2.0),
    st.integers(min_value=-3, max_value=3),
)
def test_integer_powers(v, s, k):
    x = _scalar_jet(v, s, order=3)
    p = x**k
    direct = v**k
    assert abs(p.value()[0] - direct) <= 1e-12 * max(1.0, abs(direct))
    if k != 0:
        d1 = k * v ** (k - 1) * s
        assert abs(p.derivative(1)[0] - d1) <= 1e-11 * max(1.0, abs(d1))


def test_batched_lanes_match_scalar():
    vals = np.array([0.5, 1.5, 2.5])
    slopes = np.array([1.0, -0.5, 0.25])
    x = Jet.variable(vals, slopes, 2)
    y = (x * x + 1.0).reciprocal()
    for i in range(3):
        xi = _scalar_jet(vals[i], slopes[i], 2)
        yi = (xi * xi + 1.0).reciprocal()
        assert np.allclose(y.coef[:, i], yi.coef.ravel()[:3])


def test_division_and_rdiv():
    x = _scalar_jet(1.3, 0.7, 3)
    y = (1.0 / x) * x
    assert np.allclose(y.coef.ravel(), [1.0, 0.0, 0.0, 0.0], atol=1e-14)
    z = (x / x).coef.ravel()
    assert np.allclose(z, [1.0, 0.0, 0.0, 0.0], atol=1e-14)
