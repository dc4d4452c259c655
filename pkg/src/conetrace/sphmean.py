"""The spherical mean operator and its independent 1-D radial oracle."""

from __future__ import annotations

import numpy as np

from .geometry import (
    RadialRule,
    SphereQuadrature,
    complete_frame,
    gauss_legendre_rule,
    sphere_surface_area,
    stable_sum,
    unit_sphere_rule,
)

__all__ = [
    "spherical_mean",
    "radial_mean_oracle_3d",
    "mean_through_origin",
    "windowed_spherical_mean",
    "origin_mean_windowed",
]


def spherical_mean(h, c, t: float, sphere: SphereQuadrature) -> float:
    """Average of h over the sphere of center c and radius |t|.

    The unit-sphere form (1/omega) sum w_i h(c + |t| theta_i); even in t by
    construction, and equal to h(c) at t = 0.
    """
    c = np.asarray(c, dtype=float)
    t = abs(t)
    pts = c[None, :] + t * sphere.nodes
    vals = np.asarray(h.eval(pts), dtype=float)
    return stable_sum(sphere.weights * vals) / sphere.dim.omega


def radial_mean_oracle_3d(profile, c_norm: float, t: float, rule: RadialRule | int = 64) -> float:
    """Spherical mean of a radial field in 3-D via the classical 1-D identity.

    For h(x) = profile(|x|), the mean over the sphere of center c and radius
    t reduces to (1 / (2 |c| t)) * integral of r * profile(r) over
    [| |c| - t |, |c| + t]; derived from the polar form of the mean and
    validated against the direct quadrature before use as an oracle.
    """
    if c_norm <= 0.0 or t <= 0.0:
        raise ValueError("oracle requires c_norm > 0 and t > 0")
    lo = abs(c_norm - t)
    hi = c_norm + t
    order = rule if isinstance(rule, int) else rule.order
    if lo == 0.0:
        lo = 1e-300  # degenerate tangent case; measure-zero endpoint
    r, w = gauss_legendre_rule(lo, hi, order)
    vals = np.asarray(profile(r), dtype=float)
    return stable_sum(w * r * vals) / (2.0 * c_norm * t)


def mean_through_origin(h, x, sphere: SphereQuadrature) -> float:
    """(M h)(x, |x|): mean over the sphere through the origin centered at x."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise ValueError("spheres through the origin need a nonzero center")
    return spherical_mean(h, x, r, sphere)


def windowed_spherical_mean(
    h, c, t: float, polar_nodes: int = 32, azimuth_level: int = 16
) -> float:
    """(M h)(c, t) with the polar integration clipped to the support band.

    A point of the sphere at polar cosine mu (axis c/|c|) has
    |y|^2 = |c|^2 + t^2 + 2 |c| t mu, so the support annulus [a, b] of h
    occupies an explicit mu-window.  Placing a Gauss rule inside that
    window keeps the accuracy uniform in |c| and t, where a fixed
    whole-sphere rule under-resolves the support cap; the polar weight
    (1 - mu^2)^{(n-3)/2} is a polynomial for odd n and is folded into the
    integrand.
    """
    c = np.asarray(c, dtype=float)
    rho = np.linalg.norm(c)
    t = abs(t)
    if rho == 0.0 or t == 0.0:
        raise ValueError("windowed mean needs a nonzero center and radius")
    n = h.dim.n
    a, b = h.support
    two_rho_t = 2.0 * rho * t
    mu_lo = max(-1.0, (a * a - rho * rho - t * t) / two_rho_t)
    mu_hi = min(1.0, (b * b - rho * rho - t * t) / two_rho_t)
    if mu_lo >= mu_hi:
        return 0.0
    mu, w_mu = gauss_legendre_rule(mu_lo + 1.0, mu_hi + 1.0, polar_nodes)
    mu -= 1.0
    axis = c / rho
    basis = complete_frame(axis)
    eta, w_eta = unit_sphere_rule(n - 1, azimuth_level)
    sin_mu = np.sqrt(np.maximum(0.0, 1.0 - mu * mu))
    tang = eta @ basis.T  # (A, n)
    omega = (
        mu[:, None, None] * axis[None, None, :]
        + sin_mu[:, None, None] * tang[None, :, :]
    )
    pts = c[None, None, :] + t * omega
    vals = np.asarray(h.eval(pts.reshape(-1, n)), dtype=float).reshape(
        len(mu), len(eta)
    )
    poly_w = w_mu * (1.0 - mu * mu) ** ((n - 3) // 2)
    return stable_sum(poly_w * (vals @ w_eta)) / sphere_surface_area(n)


def origin_mean_windowed(
    h, x, polar_nodes: int = 32, azimuth_level: int = 16
) -> float:
    """(M h)(x, |x|) through the window-clipped rule (any radius)."""
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x)
    if rho == 0.0:
        raise ValueError("spheres through the origin need a nonzero center")
    return windowed_spherical_mean(h, x, rho, polar_nodes, azimuth_level)
