"""Dimensions, sphere quadrature, the inversion map, and annulus integrals.

Everything here is immutable after construction and safe to evaluate
concurrently; reductions run in a fixed deterministic order (math.fsum on
the outer axis) so results do not depend on thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "CoverageError",
    "OddDimension",
    "SphereQuadrature",
    "RadialRule",
    "build_sphere_quadrature",
    "unit_sphere_rule",
    "gauss_legendre_rule",
    "complete_frame",
    "inversion_map",
    "annulus_volume_integral",
    "weighted_pair_integral",
    "gamma_half_integer",
    "sphere_surface_area",
    "stable_sum",
]


class CoverageError(ValueError):
    """A quadrature grid does not cover the region it must integrate."""


def gamma_half_integer(two_x: int) -> float:
    """Gamma(two_x / 2) by exact recursion from Gamma(1/2) = sqrt(pi).

    two_x must be a positive integer; for odd two_x = 2k+1 this returns
    sqrt(pi) * (2k-1)!! / 2^k, for even two_x an ordinary factorial.
    """
    if two_x <= 0:
        raise ValueError("argument must be positive")
    if two_x % 2 == 0:
        return float(math.factorial(two_x // 2 - 1))
    value = math.sqrt(math.pi)
    k = 1
    while k + 2 <= two_x:
        value *= k / 2.0
        k += 2
    return value


def sphere_surface_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / gamma_half_integer(n)


def stable_sum(values) -> float:
    """Deterministic compensated reduction (exact-rounding fsum)."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


@dataclass(frozen=True)
class OddDimension:
    """Ambient odd dimension n = 2m + 1 with its sphere area constant."""

    n: int
    m: int = field(init=False)
    omega: float = field(init=False)

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"dimension must be odd and >= 3, got {self.n}")
        object.__setattr__(self, "m", (self.n - 1) // 2)
        object.__setattr__(self, "omega", sphere_surface_area(self.n))


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes/weights on S^{n-1} with polynomial exactness metadata."""

    dim: OddDimension
    nodes: np.ndarray  # (N, n), unit vectors
    weights: np.ndarray  # (N,), positive, summing to omega_{n-1}
    exactness_degree: int
    level: int | None = None

    def __len__(self) -> int:
        return self.nodes.shape[0]

    def antipode_index(self) -> np.ndarray:
        """Index map j -> j' with nodes[j'] = -nodes[j] (exact pairing).

        The product rules built here are antipodally symmetric; pairing is
        resolved by nearest match and verified to 1e-12.
        """
        nodes = self.nodes
        # exact-enough match on the reflected node set
        dots = nodes @ (-nodes.T)
        idx = np.argmax(dots, axis=1)
        err = np.linalg.norm(nodes[idx] + nodes, axis=1).max()
        if err > 1e-12:
            raise ValueError("quadrature node set is not antipodally symmetric")
        return idx

    def polar_grid_shape(self):
        """(polar count, azimuth count) for n = 3 product rules, else None."""
        if self.dim.n != 3:
            return None
        K = int(round(len(self) ** 0.5 / math.sqrt(2)))
        return (K, 2 * K)


@dataclass(frozen=True)
class RadialRule:
    """Gauss-Legendre rule on [lo, hi]; exact to degree 2*order - 1."""

    lo: float
    hi: float
    order: int
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.lo < self.hi):
            raise ValueError("radial interval must satisfy 0 < lo < hi")
        x, w = gauss_legendre_rule(self.lo, self.hi, self.order)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)


def gauss_legendre_rule(lo: float, hi: float, order: int):
    """Gauss-Legendre nodes/weights mapped to [lo, hi]."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = roots_legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def unit_sphere_rule(d: int, level: int):
    """Product quadrature nodes/weights on S^{d-1} embedded in R^d.

    d = 2 is the uniform 2*level-point rule on the circle; for d >= 3 the
    polar cosine uses a level-point Gauss-Jacobi rule with weight
    (1 - c^2)^{(d-3)/2} and the remaining angles recurse on S^{d-2}.
    Exact for spherical polynomials of degree <= 2*level - 1.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    if d < 2:
        raise ValueError("sphere dimension d must be >= 2")
    if d == 2:
        M = 2 * level
        psi = 2.0 * math.pi * np.arange(M) / M
        nodes = np.stack([np.cos(psi), np.sin(psi)], axis=1)
        weights = np.full(M, 2.0 * math.pi / M)
        return nodes, weights
    alpha = 0.5 * (d - 3)
    if alpha == 0.0:
        c, wc = roots_legendre(level)
    else:
        c, wc = roots_jacobi(level, alpha, alpha)
    sub_nodes, sub_weights = unit_sphere_rule(d - 1, level)
    s = np.sqrt(1.0 - c**2)
    nodes = np.empty((level * len(sub_nodes), d))
    nodes[:, 0] = np.repeat(c, len(sub_nodes))
    nodes[:, 1:] = np.repeat(s, len(sub_nodes))[:, None] * np.tile(
        sub_nodes, (level, 1)
    )
    weights = np.repeat(wc, len(sub_weights)) * np.tile(sub_weights, level)
    return nodes, weights


def build_sphere_quadrature(dim: OddDimension, level: int) -> SphereQuadrature:
    """Graded product rule on S^{n-1} for odd ambient dimension n."""
    if not isinstance(dim, OddDimension):
        dim = OddDimension(int(dim))
    if level < 1:
        raise ValueError("level must be >= 1")
    nodes, weights = unit_sphere_rule(dim.n, level)
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    return SphereQuadrature(
        dim=dim,
        nodes=nodes,
        weights=weights,
        exactness_degree=2 * level - 1,
        level=level,
    )


def complete_frame(axis: np.ndarray) -> np.ndarray:
    """(n, n-1) orthonormal completion of a unit vector, deterministic.

    Seeds Gram-Schmidt with the coordinate axes ordered by increasing
    |axis_i| (pivot on the smallest-magnitude coordinate), so repeated runs
    and different thread counts see identical frames.
    """
    axis = np.asarray(axis, dtype=float)
    n = axis.shape[0]
    order = np.argsort(np.abs(axis), kind="stable")
    cols = []
    basis = [axis]
    for i in order:
        v = np.zeros(n)
        v[i] = 1.0
        for u in basis:
            v = v - np.dot(v, u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-10:
            v /= norm
            basis.append(v)
            cols.append(v)
        if len(cols) == n - 1:
            break
    return np.stack(cols, axis=1)


def inversion_map(x: np.ndarray) -> np.ndarray:
    """The involution x -> x / |x|^2 on R^n minus the origin."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(r2 == 0.0):
        raise ValueError("inversion map is undefined at the origin")
    return x / r2


def _check_coverage(field_obj, radial: RadialRule):
    a, b = field_obj.support
    if radial.lo > a * (1.0 + 1e-12) or radial.hi < b * (1.0 - 1e-12):
        raise CoverageError(
            f"radial interval [{radial.lo}, {radial.hi}] does not cover "
            f"field support [{a}, {b}]"
        )


def annulus_volume_integral(
    field_obj, weight_exponent: int, sphere: SphereQuadrature, radial: RadialRule
) -> float:
    """integral of |x|^p |field(x)|^2 dx over the support annulus.

    Computed in spherical coordinates as a radial Gauss rule against the
    sphere quadrature; the radial rule must cover the support (silent
    truncation is a CoverageError).
    """
    _check_coverage(field_obj, radial)
    n = sphere.dim.n
    r = radial.nodes
    pts = r[:, None, None] * sphere.nodes[None, :, :]
    vals = field_obj.eval(pts.reshape(-1, n)).reshape(len(r), len(sphere))
    ang = vals**2 @ sphere.weights
    rad_w = radial.weights * r ** (weight_exponent + n - 1)
    return stable_sum(rad_w * ang)


def weighted_pair_integral(
    eval_a,
    eval_b,
    weight_exponent: int,
    sphere: SphereQuadrature,
    radial: RadialRule,
) -> float:
    """integral of |x|^p a(x) b(x) dx over the radial interval of `radial`.

    a and b are point evaluators taking an (N, n) array; used for the
    adjoint pairing checks where the integrand is a product of two
    different fields.
    """
    n = sphere.dim.n
    r = radial.nodes
    pts = (r[:, None, None] * sphere.nodes[None, :, :]).reshape(-1, n)
    va = np.asarray(eval_a(pts), dtype=float).reshape(len(r), len(sphere))
    vb = np.asarray(eval_b(pts), dtype=float).reshape(len(r), len(sphere))
    ang = (va * vb) @ sphere.weights
    rad_w = radial.weights * r ** (weight_exponent + n - 1)
    return stable_sum(rad_w * ang)
