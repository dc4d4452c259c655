"""Shared fixtures: reference fields, grids, and cached trace tables.

The expensive tabulations (reference-resolution trace/mean/radon tables)
are session-scoped and shared between the unit tests and the acceptance
suite, mirroring how the CLI caches them across a run.
"""

import numpy as np
import pytest

from conetrace.fields import make_annular_bump
from conetrace.geometry import OddDimension, build_sphere_quadrature
from conetrace.identities import Grids
from conetrace.radon import PlaneRule, build_radon_table, default_s_grid
from conetrace.trace import tabulate_mean_trace, tabulate_trace

THREADS = 2

# reference resolution (n = 3): backprojection-grade tables
INV3 = dict(sphere_level=32, s_points=129, plane=(32, 32), fd_s=1.0 / 32.0)
# integral-identity resolution (n = 3): no backprojection, smooth integrands
INT3 = dict(sphere_level=8, s_points=129, plane=(48, 48))
# n = 5 smoke resolution
SMOKE5 = dict(sphere_level=4, s_points=33, plane=(32, 8))


@pytest.fixture(scope="session")
def dim3():
    return OddDimension(3)


@pytest.fixture(scope="session")
def dim5():
    return OddDimension(5)


@pytest.fixture(scope="session")
def bump3(dim3):
    """Reference non-radial test field, support [1, 2]."""
    return make_annular_bump(
        dim3, 1.0, 2.0, [(1.0, (0, 0, 0)), (0.3, (1, 0, 0))]
    )


@pytest.fixture(scope="session")
def bump3_radial(dim3):
    return make_annular_bump(dim3, 1.0, 2.0)


@pytest.fixture(scope="session")
def bump3_g(dim3):
    """Second reference field (odd-part data), support [1, 2]."""
    return make_annular_bump(
        dim3, 1.0, 2.0, [(1.0, (0, 0, 0)), (0.2, (0, 1, 0))]
    )


@pytest.fixture(scope="session")
def bump5(dim5):
    return make_annular_bump(dim5, 1.0, 2.0, max_order=6)


@pytest.fixture(scope="session")
def grids_inv3(dim3):
    return Grids.make(
        3,
        INV3["sphere_level"],
        plane=INV3["plane"],
        s_points=INV3["s_points"],
        fd_s=INV3["fd_s"],
        threads=THREADS,
    )


@pytest.fixture(scope="session")
def grids_int3(dim3):
    return Grids.make(
        3,
        INT3["sphere_level"],
        plane=INT3["plane"],
        s_points=INT3["s_points"],
        threads=THREADS,
    )


@pytest.fixture(scope="session")
def grids5(dim5):
    return Grids.make(
        5,
        SMOKE5["sphere_level"],
        plane=SMOKE5["plane"],
        s_points=SMOKE5["s_points"],
        threads=THREADS,
    )


@pytest.fixture(scope="session")
def table_U_ref(bump3, grids_inv3):
    return tabulate_trace(
        "U",
        bump3,
        grids_inv3.sphere,
        grids_inv3.s_grid(bump3),
        grids_inv3.plane,
        threads=THREADS,
    )


@pytest.fixture(scope="session")
def table_V_ref(bump3_g, grids_inv3):
    return tabulate_trace(
        "V",
        bump3_g,
        grids_inv3.sphere,
        grids_inv3.s_grid(bump3_g),
        grids_inv3.plane,
        threads=THREADS,
    )


@pytest.fixture(scope="session")
def mean_table_ref(bump3_radial, grids_inv3):
    return tabulate_mean_trace(
        bump3_radial,
        grids_inv3.sphere,
        grids_inv3.s_grid(bump3_radial, include_zero=False),
        route="means",
    )


@pytest.fixture(scope="session")
def radon_table_ref(bump3, dim3):
    """Criterion-1 pinned resolution: level 16, 129 offsets, 64 x 128 plane."""
    sphere = build_sphere_quadrature(dim3, 16)
    s_grid = default_s_grid(16, bump3.support[1])
    return build_radon_table(
        bump3, sphere, s_grid, 2, PlaneRule(64, 64), threads=THREADS
    )


@pytest.fixture(scope="session")
def sphere3_coarse(dim3):
    return build_sphere_quadrature(dim3, 8)


@pytest.fixture(scope="session")
def plane3_coarse():
    return PlaneRule(24, 24)
