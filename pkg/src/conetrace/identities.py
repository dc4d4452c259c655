"""Theorem-level identities: isometries, adjoints, and inversion formulas.

Conventions used throughout (n = 2m + 1, theta = x/|x|, s = 1/(2|x|)):

* U-trace profile  E_U(theta, s) = s^{-m} (U f)(theta/(2s))
* V-trace profile  E_V(theta, s) = s^{-m} (V g)(theta/(2s))
* mean profile     q(theta, s)   = rho^{n-1} (M h)(rho theta, rho), rho = 1/(2s)

All identity right-hand sides are integrated in the compact s-coordinate, so
no radial truncation enters; profile derivatives use second-order central
stencils on the tabulated splines, which continue smoothly across s = 0 via
the antipodal parity rule.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import radial_power_scale
from .geometry import (
    RadialRule,
    SphereQuadrature,
    annulus_volume_integral,
    build_sphere_quadrature,
    complete_frame,
    gamma_half_integer,
    gauss_legendre_rule,
    stable_sum,
    unit_sphere_rule,
)
from .radon import PlaneRule, radon_s_derivative
from .trace import (
    TraceField,
    derived_radial_table,
    fd_weights,
    tabulate_mean_trace,
    tabulate_trace,
    trace_pullback,
)

__all__ = [
    "Grids",
    "IdentityReport",
    "ReconstructionReport",
    "isometry_U",
    "isometry_V",
    "invert_U_first",
    "invert_V_first",
    "adjoint_U",
    "adjoint_V",
    "adjoint_U_pairing",
    "adjoint_V_pairing",
    "adjoint_U_isometry",
    "adjoint_V_isometry",
    "invert_U_second",
    "invert_V_second",
    "mean_isometry",
    "invert_mean",
    "reconstruction_grid",
    "reconstruction_report",
    "sup_norm",
]


@dataclass(frozen=True)
class Grids:
    """Discretization bundle shared by the identity experiments."""

    sphere: SphereQuadrature
    plane: PlaneRule
    s_points: int = 129
    radial_order: int = 48
    s_quad_order: int = 64
    fd_s: float = 2e-3
    dr: float = 1e-3
    n_radii: int = 10
    far_angular: int = 32
    far_factor: float = 1024.0
    threads: int | None = None

    @classmethod
    def make(
        cls,
        n: int,
        sphere_level: int,
        plane=(32, 32),
        s_points: int = 129,
        **kw,
    ) -> "Grids":
        sphere = build_sphere_quadrature(n, sphere_level)
        return cls(sphere=sphere, plane=PlaneRule(*plane), s_points=s_points, **kw)

    def s_grid(self, field_obj, include_zero: bool = True) -> np.ndarray:
        s_max = 1.0 / field_obj.support[0]
        grid = np.linspace(0.0, s_max, self.s_points)
        return grid if include_zero else grid[1:]

    def radial(self, field_obj) -> RadialRule:
        a, b = field_obj.support
        return RadialRule(a * (1 - 1e-12), b * (1 + 1e-12), self.radial_order)

    def meta(self) -> dict:
        return {
            "n": self.sphere.dim.n,
            "sphere_level": self.sphere.level,
            "sphere_nodes": len(self.sphere),
            "plane_radial": self.plane.radial,
            "plane_angular_level": self.plane.angular_level,
            "s_points": self.s_points,
            "radial_order": self.radial_order,
            "s_quad_order": self.s_quad_order,
            "fd_s": self.fd_s,
            "dr": self.dr,
        }


@dataclass
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    rel_err: float
    grid: dict = dc_field(default_factory=dict)
    extras: dict = dc_field(default_factory=dict)
    runtime_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_err": self.rel_err,
            "grid": self.grid,
            "extras": self.extras,
        }


@dataclass
class ReconstructionReport:
    name: str
    rel_l2: float
    max_abs_err: float
    outside_max: float
    weight_exponent: int
    n_points: int
    grid: dict = dc_field(default_factory=dict)
    extras: dict = dc_field(default_factory=dict)
    runtime_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rel_l2": self.rel_l2,
            "max_abs_err": self.max_abs_err,
            "outside_max": self.outside_max,
            "weight_exponent": self.weight_exponent,
            "n_points": self.n_points,
            "grid": self.grid,
            "extras": self.extras,
        }


def _rel(lhs: float, rhs: float) -> float:
    if lhs == 0.0 and rhs == 0.0:
        return 0.0
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def _profile_sq_integral(table: TraceField, order: int, s_quad: int, fd_s: float):
    """per-direction integral of |d^order E / ds^order|^2 over [0, s_max]."""
    s_nodes, s_w = gauss_legendre_rule(0.0, table.s_max, s_quad)
    jj = np.arange(len(table.sphere))[:, None]
    if order == 0:
        vals = table.profile_eval(jj, s_nodes[None, :])
    else:
        vals = table.profile_derivative(jj, s_nodes[None, :], order, fd_s)
    return (vals**2) @ s_w


def isometry_U(f, grids: Grids, table: TraceField | None = None) -> IdentityReport:
    """Weighted-norm identity for the even-part trace.

    lhs: integral of |f|^2 / |x|^2;  rhs: 2 * integral of |U f|^2 / |x|^2,
    evaluated in s-coordinates as 2^{3-n} sum_j w_j int |E_U|^2 ds.
    """
    t0 = time.time()
    n = f.dim.n
    lhs = annulus_volume_integral(f, -2, grids.sphere, grids.radial(f))
    if table is None:
        table = tabulate_trace(
            "U", f, grids.sphere, grids.s_grid(f), grids.plane, threads=grids.threads
        )
    per_dir = _profile_sq_integral(table, 0, grids.s_quad_order, grids.fd_s)
    rhs = 2.0 ** (3 - n) * stable_sum(grids.sphere.weights * per_dir)
    return IdentityReport(
        name="isometry-u",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        runtime_seconds=time.time() - t0,
    )


def isometry_V(g, grids: Grids, table: TraceField | None = None) -> IdentityReport:
    """Weighted-norm identity for the odd-part trace.

    lhs: integral of |x|^2 |g|^2;  rhs (literal route): the radial
    derivative of r^m (V g) integrated in s-coordinates,
    4^{1-m} sum_j w_j int |dE_V/ds|^2 ds, with the derivative taken by
    central differences of the tabulated trace.  An independent rhs from
    the m-th plane derivative of R G is reported alongside.
    """
    t0 = time.time()
    m = g.dim.m
    lhs = annulus_volume_integral(g, 2, grids.sphere, grids.radial(g))
    if table is None:
        table = tabulate_trace(
            "V", g, grids.sphere, grids.s_grid(g), grids.plane, threads=grids.threads
        )
    per_dir = _profile_sq_integral(table, 1, grids.s_quad_order, grids.fd_s)
    rhs = 4.0 ** (1 - m) * stable_sum(grids.sphere.weights * per_dir)

    # independent route: d_s^m (R G) by analytic plane quadrature
    G = trace_pullback("V", g)
    s_nodes, s_w = gauss_legendre_rule(0.0, table.s_max, grids.s_quad_order // 2)
    acc = np.empty(len(grids.sphere))
    for j in range(len(grids.sphere)):
        dsm = radon_s_derivative(G, grids.sphere.nodes[j], s_nodes, m, grids.plane)
        acc[j] = np.dot(s_w, dsm**2)
    rhs_radon = stable_sum(grids.sphere.weights * acc) / (2.0 * math.pi) ** (2 * m)
    return IdentityReport(
        name="isometry-v",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        extras={
            "rhs_radon": rhs_radon,
            "route_gap": _rel(rhs, rhs_radon),
            "rel_err_radon": _rel(lhs, rhs_radon),
        },
        runtime_seconds=time.time() - t0,
    )


def _backproject(table: TraceField, pts: np.ndarray, order: int, fd_s: float):
    """sum_j w_j (d^order E / ds^order)(theta_j, x . theta_j / |x|^2)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r2 = np.sum(pts * pts, axis=1)
    if np.any(r2 == 0.0):
        raise ValueError("reconstruction points must avoid the origin")
    s_star = (pts @ table.sphere.nodes.T) / r2[:, None]  # (P, N)
    jj = np.arange(len(table.sphere))[None, :]
    vals = table.profile_derivative(jj, s_star, order, fd_s)
    return vals @ table.sphere.weights, r2


def invert_U_first(table: TraceField, x, fd_s: float = 2e-3):
    """First inversion formula for U: backprojection of d_s^m E_U.

    f(x) = (4 pi)^{-m} |x|^{-2m} * sum_j w_j (d_s^m E_U)(theta_j, s*_j)
    at s*_j = x . theta_j / |x|^2; stencil values beyond the tabulated
    support are exact zeros and negative offsets use the antipodal parity.
    """
    if table.kind != "U":
        raise ValueError("invert_U_first expects a U-kind trace")
    m = table.dim.m
    acc, r2 = _backproject(table, x, m, fd_s)
    out = acc / ((4.0 * math.pi) ** m * r2**m)
    return float(out[0]) if np.ndim(x) == 1 else out


def invert_V_first(table: TraceField, x, fd_s: float = 2e-3):
    """First inversion formula for V: backprojection of d_s^{m+1} E_V."""
    if table.kind != "V":
        raise ValueError("invert_V_first expects a V-kind trace")
    m = table.dim.m
    n = table.dim.n
    acc, r2 = _backproject(table, x, m + 1, fd_s)
    out = -acc / ((4.0 * math.pi) ** m * r2 ** ((n + 1) / 2))
    return float(out[0]) if np.ndim(x) == 1 else out


def invert_mean(table: TraceField, x, fd_s: float = 2e-3):
    """Reconstruction from spherical means over spheres through the origin.

    h(x) = (-1)^m omega_{n-1} / (2^n pi^{n-1}) * |x|^{2-2n}
           * sum_j w_j (d_s^{n-1} q)(theta_j, s*_j),
    the full-sphere form of the backprojection over all origin-spheres
    through x (centers swept by s* = x . theta / |x|^2).
    """
    if table.kind != "mean":
        raise ValueError("invert_mean expects a mean-kind trace")
    n = table.dim.n
    m = table.dim.m
    omega = table.dim.omega
    acc, r2 = _backproject(table, x, n - 1, fd_s)
    const = (-1.0) ** m * omega / (2.0**n * math.pi ** (n - 1))
    out = const * acc * r2 ** (1 - n)
    return float(out[0]) if np.ndim(x) == 1 else out


def adjoint_U(phi, x, plane: PlaneRule = PlaneRule()):
    """(U* phi)(x) for analytic phi, via the plane derivative of R phi_*.

    phi_*(y) = |y|^{-1} phi(y); the radii |x|/2 may be batched along a
    shared direction.
    """
    x = np.asarray(x, dtype=float)
    m = phi.dim.m
    r = np.linalg.norm(x)
    theta = x / r
    phi_star = radial_power_scale(phi, -1)
    val = radon_s_derivative(phi_star, theta, r / 2.0, m, plane)
    return float(val) / (2.0 * (-2.0 * math.pi) ** m * r ** (m - 1))


def adjoint_V(phi, x, plane: PlaneRule = PlaneRule()):
    """(V* phi)(x) via R phi^* with phi^*(y) = |y| phi(y)."""
    x = np.asarray(x, dtype=float)
    m = phi.dim.m
    r = np.linalg.norm(x)
    theta = x / r
    phi_star = radial_power_scale(phi, 1)
    val = radon_s_derivative(phi_star, theta, r / 2.0, m, plane)
    return float(val) / (4.0 * (-2.0 * math.pi) ** m * r ** (m + 1))


def _adjoint_grid(phi, kind: str, sphere: SphereQuadrature, radii, plane):
    """(U*/V* phi) on the tensor grid radii x sphere nodes, batched per node."""
    m = phi.dim.m
    power = -1 if kind == "U" else 1
    denom = 2.0 if kind == "U" else 4.0
    rpow = m - 1 if kind == "U" else m + 1
    phi_star = radial_power_scale(phi, power)
    radii = np.asarray(radii, dtype=float)
    out = np.empty((len(radii), len(sphere)))
    for j in range(len(sphere)):
        vals = radon_s_derivative(phi_star, sphere.nodes[j], radii / 2.0, m, plane)
        out[:, j] = vals / (denom * (-2.0 * math.pi) ** m * radii**rpow)
    return out


def adjoint_U_pairing(f, phi, grids: Grids) -> IdentityReport:
    """<U f, phi>_{|x|^{-2}} = <f, U* phi>_{|x|^{-2}} for analytic f, phi.

    Both sides are radial-Gauss x sphere quadratures; the trace and U* phi
    are evaluated directly through the plane-integral reductions (one
    batched call per direction), so the check needs no precomputed table.
    """
    t0 = time.time()
    n = f.dim.n
    m = f.dim.m
    sphere = grids.sphere
    F = trace_pullback("U", f)
    c_prof = (-1.0) ** m / (2.0 * math.pi**m)
    # lhs over supp phi (the only region where the pairing integrand lives)
    ra, rb = phi.support
    r_nodes, r_w = gauss_legendre_rule(ra, rb, grids.radial_order)
    s_of_r = 1.0 / (2.0 * r_nodes)
    trace_vals = np.empty((len(r_nodes), len(sphere)))
    for j in range(len(sphere)):
        prof = c_prof * radon_s_derivative(
            F, sphere.nodes[j], s_of_r, m, grids.plane
        )
        trace_vals[:, j] = s_of_r**m * prof
    pts = r_nodes[:, None, None] * sphere.nodes[None, :, :]
    phi_vals = phi.eval(pts.reshape(-1, n)).reshape(len(r_nodes), len(sphere))
    ang = (trace_vals * phi_vals) @ sphere.weights
    lhs = stable_sum(r_w * r_nodes ** (n - 3) * ang)
    # rhs over supp f
    fa, fb = f.support
    r2_nodes, r2_w = gauss_legendre_rule(fa, fb, grids.radial_order)
    adj = _adjoint_grid(phi, "U", sphere, r2_nodes, grids.plane)
    pts2 = r2_nodes[:, None, None] * sphere.nodes[None, :, :]
    f_vals = f.eval(pts2.reshape(-1, n)).reshape(len(r2_nodes), len(sphere))
    ang2 = (adj * f_vals) @ sphere.weights
    rhs = stable_sum(r2_w * r2_nodes ** (n - 3) * ang2)
    return IdentityReport(
        name="adjoint-u-pairing",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        runtime_seconds=time.time() - t0,
    )


def adjoint_V_pairing(g, phi, grids: Grids) -> IdentityReport:
    """<|x|^{-m} d_r(|x|^m V g), phi>_{|x|^2} = <g, V* phi>_{|x|^2}.

    The left factor is the derived radial-derivative trace, evaluated
    directly from d_s^m (R G) (the identity the radial derivative satisfies
    on the cone), batched per direction.
    """
    t0 = time.time()
    n = g.dim.n
    m = g.dim.m
    sphere = grids.sphere
    G = trace_pullback("V", g)
    ra, rb = phi.support
    r_nodes, r_w = gauss_legendre_rule(ra, rb, grids.radial_order)
    s_of_r = 1.0 / (2.0 * r_nodes)
    psi_vals = np.empty((len(r_nodes), len(sphere)))
    denom = 4.0 * (-2.0 * math.pi) ** m
    for j in range(len(sphere)):
        dsm = radon_s_derivative(G, sphere.nodes[j], s_of_r, m, grids.plane)
        w_vals = dsm / (denom * r_nodes**2)  # d_r(r^m V g)
        psi_vals[:, j] = w_vals / r_nodes**m
    pts = r_nodes[:, None, None] * sphere.nodes[None, :, :]
    phi_vals = phi.eval(pts.reshape(-1, n)).reshape(len(r_nodes), len(sphere))
    ang = (psi_vals * phi_vals) @ sphere.weights
    lhs = stable_sum(r_w * r_nodes ** (n + 1) * ang)
    ga, gb = g.support
    r2_nodes, r2_w = gauss_legendre_rule(ga, gb, grids.radial_order)
    adj = _adjoint_grid(phi, "V", sphere, r2_nodes, grids.plane)
    pts2 = r2_nodes[:, None, None] * sphere.nodes[None, :, :]
    g_vals = g.eval(pts2.reshape(-1, n)).reshape(len(r2_nodes), len(sphere))
    ang2 = (adj * g_vals) @ sphere.weights
    rhs = stable_sum(r2_w * r2_nodes ** (n + 1) * ang2)
    return IdentityReport(
        name="adjoint-v-pairing",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        runtime_seconds=time.time() - t0,
    )


def adjoint_U_isometry(phi, grids: Grids) -> IdentityReport:
    """integral |phi|^2/|x|^2 = 2 integral |U* phi|^2/|x|^2."""
    t0 = time.time()
    n = phi.dim.n
    sphere = grids.sphere
    lhs = annulus_volume_integral(phi, -2, sphere, grids.radial(phi))
    rb = 2.0 * phi.support[1]
    r_nodes, r_w = gauss_legendre_rule(0.0, rb, grids.radial_order)
    adj = _adjoint_grid(phi, "U", sphere, r_nodes, grids.plane)
    ang = (adj**2) @ sphere.weights
    rhs = 2.0 * stable_sum(r_w * r_nodes ** (n - 3) * ang)
    return IdentityReport(
        name="adjoint-u-isometry",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        runtime_seconds=time.time() - t0,
    )


def adjoint_V_isometry(phi, grids: Grids) -> IdentityReport:
    """integral |x|^2 |phi|^2 = 8 integral |x|^2 |V* phi|^2."""
    t0 = time.time()
    n = phi.dim.n
    sphere = grids.sphere
    lhs = annulus_volume_integral(phi, 2, sphere, grids.radial(phi))
    rb = 2.0 * phi.support[1]
    r_nodes, r_w = gauss_legendre_rule(0.0, rb, grids.radial_order)
    adj = _adjoint_grid(phi, "V", sphere, r_nodes, grids.plane)
    ang = (adj**2) @ sphere.weights
    rhs = 8.0 * stable_sum(r_w * r_nodes ** (n + 1) * ang)
    return IdentityReport(
        name="adjoint-v-isometry",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        runtime_seconds=time.time() - t0,
    )


def _far_segments(a: float, b: float, far_factor: float):
    """Geometric radial segments reaching ~far_factor * b into the far field."""
    segs = [(0.0, 4.0 * b, 48)]
    lo = 4.0 * b
    order = 24
    while lo < far_factor * b:
        hi = min(4.0 * lo, far_factor * b)
        segs.append((lo, hi, max(order, 8)))
        lo = hi
        order = max(order // 2, 8)
    return segs


def _plane_integral_far(evaluator, n: int, theta, s_list, angular_level, segments):
    """Plane integrals of a slowly decaying interpolated integrand.

    evaluator maps (P, n) points to values; the radial integration is a
    composite Gauss rule over geometric segments out to the configured far
    radius (the trace tables represent the integrand all the way to
    infinity in s-coordinates, so only this radial truncation enters).
    """
    theta = np.asarray(theta, dtype=float)
    frame = complete_frame(theta)
    eta, w_eta = unit_sphere_rule(n - 1, angular_level)
    dirs = eta @ frame.T
    out = np.zeros(len(s_list))
    for i, s in enumerate(s_list):
        total = 0.0
        for lo, hi, order in segments:
            rho, w_rho = gauss_legendre_rule(max(lo, 1e-12), hi, order)
            pts = (
                s * theta[None, None, :]
                + rho[:, None, None] * dirs[None, :, :]
            )
            vals = evaluator(pts.reshape(-1, n)).reshape(len(rho), len(eta))
            total += float(
                np.dot(w_rho * rho ** (n - 2), vals @ w_eta)
            )
        out[i] = total
    return out


def _second_inversion(table_for_phi: TraceField, kind: str, pts, grids: Grids):
    """Common engine of the second inversion formulas.

    Evaluates (U*/V* phi)(x) where phi is an interpolated trace table:
    plane integrals of |y|^{-/+1} phi(y) at offsets near |x|/2, with the
    m-th s-derivative taken by central differences of the plane integral.
    """
    n = table_for_phi.dim.n
    m = table_for_phi.dim.m
    power = -1 if kind == "U" else 1
    denom = 2.0 if kind == "U" else 4.0
    rpow = m - 1 if kind == "U" else m + 1
    a, b = table_for_phi.support

    def evaluator(p):
        r = np.linalg.norm(p, axis=1)
        vals = table_for_phi.evaluate_any(p)
        out = np.zeros_like(vals)
        ok = r > 0
        out[ok] = vals[ok] * r[ok] ** power
        return out

    segments = _far_segments(a, b, grids.far_factor)
    offs, w = fd_weights(m, grids.fd_s)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.empty(pts.shape[0])
    for i, x in enumerate(pts):
        r = np.linalg.norm(x)
        theta = x / r
        s_list = r / 2.0 + offs
        integrals = _plane_integral_far(
            evaluator, n, theta, s_list, grids.far_angular, segments
        )
        dsm = float(np.dot(w, integrals))
        out[i] = dsm / (denom * (-2.0 * math.pi) ** m * r**rpow)
    return out


def invert_U_second(f, grids: Grids, table: TraceField | None = None, pts=None):
    """f = 2 U*(U f), with U f tabulated and U* applied by plane quadrature."""
    if table is None:
        table = tabulate_trace(
            "U", f, grids.sphere, grids.s_grid(f), grids.plane, threads=grids.threads
        )
    if pts is None:
        pts, _, _ = reconstruction_grid(f, grids)
    rec = 2.0 * _second_inversion(table, "U", pts, grids)
    return rec


def invert_V_second(g, grids: Grids, table: TraceField | None = None, pts=None):
    """g = 8 V*(|x|^{-m} d_r(|x|^m V g)) through the derived trace table."""
    if table is None:
        table = tabulate_trace(
            "V", g, grids.sphere, grids.s_grid(g), grids.plane, threads=grids.threads
        )
    derived = derived_radial_table(table, dr_rel=grids.dr)
    if pts is None:
        pts, _, _ = reconstruction_grid(g, grids)
    rec = 8.0 * _second_inversion(derived, "V", pts, grids)
    return rec


def mean_isometry(h, grids: Grids, table: TraceField | None = None) -> IdentityReport:
    """Isometry for spherical means over spheres through the origin.

    lhs: integral |x|^{2n-4} |h|^2.  rhs (route i): literal, with
    (rho^2 d_rho)^m realized as (-1/2)^m d_s^m of the tabulated mean
    profile q (windowed-means route); route ii evaluates d_s^m R H / omega
    analytically and is reported alongside.
    """
    t0 = time.time()
    n = h.dim.n
    m = h.dim.m
    lhs = annulus_volume_integral(h, 2 * n - 4, grids.sphere, grids.radial(h))
    if table is None:
        table = tabulate_mean_trace(
            h, grids.sphere, grids.s_grid(h, include_zero=False), route="means"
        )
    const = 2.0 * math.pi / gamma_half_integer(n) ** 2
    per_dir = _profile_sq_integral(table, m, grids.s_quad_order, grids.fd_s)
    rhs = const * 2.0 * 4.0 ** (-m) * stable_sum(grids.sphere.weights * per_dir)

    H = trace_pullback("mean", h)
    omega = h.dim.omega
    s_nodes, s_w = gauss_legendre_rule(0.0, table.s_max, grids.s_quad_order // 2)
    acc = np.empty(len(grids.sphere))
    for j in range(len(grids.sphere)):
        dsm = radon_s_derivative(H, grids.sphere.nodes[j], s_nodes, m, grids.plane)
        acc[j] = np.dot(s_w, (dsm / omega) ** 2)
    rhs_radon = const * 2.0 * 4.0 ** (-m) * stable_sum(grids.sphere.weights * acc)
    return IdentityReport(
        name="mean-isometry",
        lhs=lhs,
        rhs=rhs,
        rel_err=_rel(lhs, rhs),
        grid=grids.meta(),
        extras={
            "rhs_radon": rhs_radon,
            "route_gap": _rel(rhs, rhs_radon),
            "rel_err_radon": _rel(lhs, rhs_radon),
        },
        runtime_seconds=time.time() - t0,
    )


def sup_norm(field_obj, samples: int = 4000) -> float:
    """Max |field| over a dense deterministic sample of the support annulus."""
    a, b = field_obj.support
    n = field_obj.dim.n
    rng = np.random.default_rng(20160229)
    pts = rng.normal(size=(samples, n))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    pts *= rng.uniform(a, b, size=samples)[:, None]
    return float(np.max(np.abs(field_obj.eval(pts))))


def reconstruction_grid(field_obj, grids: Grids, weight_exponent: int = 0):
    """Tensor evaluation grid: Gauss radii on [0.9a, 1.1b] x sphere nodes.

    Returns (points, quadrature weights for the weighted L2 norm, radii).
    """
    a, b = field_obj.support
    n = field_obj.dim.n
    r_nodes, r_w = gauss_legendre_rule(0.9 * a, 1.1 * b, grids.n_radii)
    pts = (r_nodes[:, None, None] * grids.sphere.nodes[None, :, :]).reshape(-1, n)
    w = (
        (r_w * r_nodes ** (weight_exponent + n - 1))[:, None]
        * grids.sphere.weights[None, :]
    ).reshape(-1)
    return pts, w, r_nodes


def reconstruction_report(
    name: str,
    field_obj,
    rec_values: np.ndarray,
    pts: np.ndarray,
    weights: np.ndarray,
    weight_exponent: int,
    grids: Grids,
    outside_values: np.ndarray | None = None,
    runtime: float = 0.0,
) -> ReconstructionReport:
    """Weighted-L2 comparison of a reconstruction against the true field."""
    truth = field_obj.eval(pts)
    err2 = stable_sum(weights * (rec_values - truth) ** 2)
    ref2 = stable_sum(weights * truth**2)
    rel = math.sqrt(err2 / ref2) if ref2 > 0 else 0.0
    sup = sup_norm(field_obj)
    outside = (
        float(np.max(np.abs(outside_values))) / sup
        if outside_values is not None and len(outside_values)
        else 0.0
    )
    return ReconstructionReport(
        name=name,
        rel_l2=rel,
        max_abs_err=float(np.max(np.abs(rec_values - truth))),
        outside_max=outside,
        weight_exponent=weight_exponent,
        n_points=len(pts),
        grid=grids.meta(),
        runtime_seconds=runtime,
    )
