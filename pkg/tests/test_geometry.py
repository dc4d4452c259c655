import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conetrace.geometry import (
    CoverageError,
    OddDimension,
    RadialRule,
    annulus_volume_integral,
    build_sphere_quadrature,
    gamma_half_integer,
    gauss_legendre_rule,
    inversion_map,
    sphere_surface_area,
    stable_sum,
)
from conetrace.fields import make_annular_bump


def test_odd_dimension_constants():
    d3 = OddDimension(3)
    assert d3.m == 1
    assert abs(d3.omega - 4 * math.pi) < 1e-12 * 4 * math.pi
    d5 = OddDimension(5)
    assert d5.m == 2
    assert abs(d5.omega - 8 * math.pi**2 / 3) < 1e-12 * d5.omega


@pytest.mark.parametrize("bad", [2, 4, 1, 0, -3])
def test_odd_dimension_rejects(bad):
    with pytest.raises(ValueError):
        OddDimension(bad)


def test_gamma_half_integer():
    assert gamma_half_integer(1) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_half_integer(3) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert gamma_half_integer(4) == 1.0  # Gamma(2)
    assert gamma_half_integer(5) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-15)


def test_sphere_quadrature_n3_level8():
    rule = build_sphere_quadrature(OddDimension(3), 8)
    assert len(rule) == 128
    assert abs(stable_sum(rule.weights) - 4 * math.pi) <= 1e-12 * 4 * math.pi
    assert np.max(np.abs(np.linalg.norm(rule.nodes, axis=1) - 1.0)) <= 1e-14
    # centroid and second moments
    assert abs(stable_sum(rule.weights * rule.nodes[:, 0])) <= 1e-13
    for i in range(3):
        mom = stable_sum(rule.weights * rule.nodes[:, i] ** 2)
        assert abs(mom - 4 * math.pi / 3) <= 1e-12
    cross = stable_sum(rule.weights * rule.nodes[:, 0] * rule.nodes[:, 2])
    assert abs(cross) <= 1e-12


def test_sphere_quadrature_n5():
    rule = build_sphere_quadrature(OddDimension(5), 4)
    omega = sphere_surface_area(5)
    assert abs(stable_sum(rule.weights) - omega) <= 1e-12 * omega
    for i in (0, 2, 4):
        mom = stable_sum(rule.weights * rule.nodes[:, i] ** 2)
        assert abs(mom - omega / 5) <= 1e-12 * omega


def test_sphere_quadrature_antipodal_pairing():
    rule = build_sphere_quadrature(OddDimension(3), 6)
    idx = rule.antipode_index()
    assert np.allclose(rule.nodes[idx], -rule.nodes, atol=1e-14)
    assert np.allclose(rule.weights[idx], rule.weights)


def test_sphere_quadrature_rejects_bad_level():
    with pytest.raises(ValueError):
        build_sphere_quadrature(OddDimension(3), 0)


def test_radial_rule_polynomial_exactness():
    rule = RadialRule(0.5, 2.0, 6)
    # degree 11 = 2 * order - 1 exactness
    for deg in (0, 3, 7, 11):
        approx = stable_sum(rule.weights * rule.nodes**deg)
        exact = (2.0 ** (deg + 1) - 0.5 ** (deg + 1)) / (deg + 1)
        assert abs(approx - exact) <= 1e-12 * abs(exact)
    with pytest.raises(ValueError):
        RadialRule(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        RadialRule(2.0, 1.0, 4)


def test_inversion_map_examples():
    assert np.allclose(inversion_map(np.array([2.0, 0.0, 0.0])), [0.5, 0, 0])
    with pytest.raises(ValueError):
        inversion_map(np.zeros(3))


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-10, max_value=10).filter(lambda v: abs(v) > 1e-3),
        min_size=3,
        max_size=3,
    )
)
def test_inversion_map_involution(coords):
    x = np.array(coords)
    back = inversion_map(inversion_map(x))
    assert np.max(np.abs(back - x)) <= 1e-14 * max(1.0, np.max(np.abs(x)))


def test_inversion_sphere_to_plane():
    # points on the sphere |x - c| = |c| map to the hyperplane 2 X . c = 1
    c = np.array([1.0, 0.0, 0.0])
    rng = np.random.default_rng(11)
    omega = rng.normal(size=(200, 3))
    omega /= np.linalg.norm(omega, axis=1)[:, None]
    pts = c[None, :] + omega  # radius |c| = 1
    pts = pts[np.linalg.norm(pts, axis=1) > 1e-6]
    X = inversion_map(pts)
    assert np.max(np.abs(2.0 * X @ c - 1.0)) <= 1e-13


def test_annulus_integral_zero_field(dim3, sphere3_coarse):
    zero = make_annular_bump(dim3, 1.0, 2.0, [(0.0, (0, 0, 0))])
    rad = RadialRule(1.0, 2.0, 24)
    assert annulus_volume_integral(zero, 0, sphere3_coarse, rad) == 0.0


def test_annulus_integral_radial_oracle(dim3, bump3_radial, sphere3_coarse):
    rad = RadialRule(1.0 - 1e-12, 2.0 + 1e-12, 40)
    val = annulus_volume_integral(bump3_radial, 0, sphere3_coarse, rad)
    r, w = gauss_legendre_rule(1.0, 2.0, 400)
    prof = np.exp(-1.0 / np.maximum(1e-300, 1 - (2 * r - 3.0) ** 2))
    oracle = 4 * math.pi * stable_sum(w * r**2 * prof**2)
    assert abs(val - oracle) <= 1e-10 * oracle


def test_annulus_integral_scaling(dim3, bump3, sphere3_coarse):
    rad = RadialRule(1.0 - 1e-12, 2.0 + 1e-12, 32)
    base = annulus_volume_integral(bump3, -2, sphere3_coarse, rad)
    scaled = annulus_volume_integral(bump3.scaled(3.0), -2, sphere3_coarse, rad)
    assert abs(scaled - 9.0 * base) <= 1e-13 * abs(scaled)


def test_annulus_integral_coverage_error(dim3, bump3, sphere3_coarse):
    with pytest.raises(CoverageError):
        annulus_volume_integral(
            bump3, 0, sphere3_coarse, RadialRule(1.2, 2.0, 16)
        )
    with pytest.raises(CoverageError):
        annulus_volume_integral(
            bump3, 0, sphere3_coarse, RadialRule(1.0, 1.8, 16)
        )


def test_annulus_integral_radial_refinement(dim3, sphere3_coarse):
    # non-polynomial wiggle: error should drop by >= 3.5x when nodes double
    wig = make_annular_bump(
        dim3, 1.0, 2.0, [(1.0, (0, 0, 0)), (0.8, (4, 0, 0))]
    )
    vals = {}
    for order in (6, 12, 96):
        rad = RadialRule(1.0 - 1e-12, 2.0 + 1e-12, order)
        vals[order] = annulus_volume_integral(wig, 0, sphere3_coarse, rad)
    err6 = abs(vals[6] - vals[96])
    err12 = abs(vals[12] - vals[96])
    assert err12 < err6 / 3.5
