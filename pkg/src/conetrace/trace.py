"""Light-cone trace operators: even-part (U) and odd-part (V) traces.

Each trace has two independent evaluation routes:

* the spherical-means route, via the classical explicit wave solution
  u(x,t) = c_n * t * D^m (t^{n-2} M f(x,|t|)) with D = (1/2t) d/dt (and the
  analogous odd-part formula), with D^m realized by m nested second-order
  central differences in t;
* the Radon route, via the inversion-map pullback: with theta = x/|x| and
  s = 1/(2|x|), s^{-m} (U f)(x) equals a constant times the m-th s-derivative
  of the Radon transform of F(X) = |X|^{1-n} f(X/|X|^2) (and the (m-1)-th
  for V with exponent -n-1).

Tabulation stores the rescaled profile E(theta, s) = s^{-m} * trace, which
extends smoothly through s = 0 (the r -> infinity limit); all tables live on
a compact s-grid in [0, 1/a], so no radial truncation ever happens.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._splines import RowSplines
from .fields import InversionPullback, field_spec_hash
from .geometry import (
    OddDimension,
    SphereQuadrature,
    build_sphere_quadrature,
    gamma_half_integer,
    stable_sum,
)
from .radon import PlaneRule, radon_s_derivative
from .sphmean import origin_mean_windowed, spherical_mean, windowed_spherical_mean

__all__ = [
    "TraceField",
    "kirchhoff_constant",
    "trace_U_means",
    "trace_V_means",
    "trace_U_radon",
    "trace_V_radon",
    "pullback_exponent",
    "trace_pullback",
    "profile_U_radon",
    "profile_V_radon",
    "tabulate_trace",
    "tabulate_mean_trace",
    "derived_radial_table",
    "trace_radial_derivative",
    "trace_radial_derivative_radon",
    "central_difference",
    "fd_weights",
    "save_trace_table",
    "load_trace_table",
]


def kirchhoff_constant(n: int) -> float:
    """sqrt(pi) / Gamma(n/2), exactly 2 for n = 3."""
    return math.sqrt(math.pi) / gamma_half_integer(n)


def pullback_exponent(kind: str, n: int) -> int:
    """|X| exponent of the inversion pullback entering each reduction."""
    if kind == "U":
        return 1 - n
    if kind == "V":
        return -n - 1
    if kind == "mean":
        return 2 - 2 * n
    raise ValueError(f"unknown trace kind {kind!r}")


def trace_pullback(kind: str, source) -> InversionPullback:
    return InversionPullback(source, pullback_exponent(kind, source.dim.n))


def fd_weights(order: int, step: float) -> tuple[np.ndarray, np.ndarray]:
    """(offsets, weights) of the nested second-order central stencil.

    Composes the 3-point first-derivative stencil `order` times, giving an
    O(step^2) approximation of the order-th derivative on offsets
    -order..order.
    """
    w = np.array([1.0])
    base = np.array([-0.5, 0.0, 0.5]) / step
    for _ in range(order):
        w = np.convolve(w, base)
    k = (len(w) - 1) // 2
    return np.arange(-k, k + 1) * step, w


def central_difference(fn, t0: float, order: int, step: float) -> float:
    """Nested central difference of a scalar function."""
    offs, w = fd_weights(order, step)
    vals = np.array([fn(t0 + o) for o in offs])
    return float(np.dot(w, vals))


def _nested_D(values: np.ndarray, t: np.ndarray, k: int, dt: float) -> float:
    """Apply D = (1/2t) d/dt k times to samples values[i] = J(t[i]).

    t must be the uniform stencil t0 + i*dt for i = -k..k; each fold is a
    second-order central difference, so the result is O(dt^2) accurate.
    """
    vals = np.asarray(values, dtype=float)
    tt = np.asarray(t, dtype=float)
    for _ in range(k):
        vals = (vals[2:] - vals[:-2]) / (4.0 * dt * tt[1:-1])
        tt = tt[1:-1]
    return float(vals[0])


def _default_dt(field_obj, nesting: int = 1) -> float:
    """Step for the nested D stencils, balanced against quadrature noise.

    One fold tolerates 1e-3 * width; deeper nesting divides the mean-value
    noise by dt^k, so the step grows to keep the two error terms matched.
    """
    a, b = field_obj.support
    return (b - a) * (1e-3 if nesting <= 1 else 1e-2)


def _mean_at(field_obj, x, t, sphere):
    """Spherical mean through the given rule, or the windowed rule if None.

    The windowed rule keeps the accuracy uniform under the t-differencing
    in the trace formulas (a fixed whole-sphere rule's error oscillates in
    t and is amplified by the stencil).
    """
    if sphere is None:
        return windowed_spherical_mean(field_obj, x, t)
    return spherical_mean(field_obj, x, t, sphere)


def trace_U_means(
    f, x, sphere: SphereQuadrature | None = None, dt: float | None = None
) -> float:
    """(U f)(x) through the explicit even-part wave solution at t = |x|."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise ValueError("traces are undefined at the origin")
    n = f.dim.n
    m = f.dim.m
    if dt is None:
        dt = _default_dt(f, m)
    if m * dt >= r:
        raise ValueError("difference step too large for this radius")
    t = r + dt * np.arange(-m, m + 1)
    means = np.array([_mean_at(f, x, ti, sphere) for ti in t])
    val = _nested_D(t ** (n - 2) * means, t, m, dt)
    return kirchhoff_constant(n) * r * val


def trace_V_means(
    g, x, sphere: SphereQuadrature | None = None, dt: float | None = None
) -> float:
    """(V g)(x) through the odd-part wave solution; no differencing at n = 3."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise ValueError("traces are undefined at the origin")
    n = g.dim.n
    k = g.dim.m - 1
    if dt is None:
        dt = _default_dt(g, k)
    if k * dt >= r:
        raise ValueError("difference step too large for this radius")
    t = r + dt * np.arange(-k, k + 1)
    means = np.array([_mean_at(g, x, ti, sphere) for ti in t])
    val = _nested_D(t ** (n - 2) * means, t, k, dt)
    return 0.5 * kirchhoff_constant(n) * val


def profile_U_radon(f, theta, s, plane: PlaneRule = PlaneRule(), pullback=None):
    """E_U(theta, s) = s^{-m} (U f)(theta/(2s)), smooth through s = 0.

    Equal to (-1)^m / (2 pi^m) times the m-th s-derivative of R F; valid
    for every real s.
    """
    m = f.dim.m
    F = pullback if pullback is not None else trace_pullback("U", f)
    c = (-1.0) ** m / (2.0 * math.pi**m)
    return c * radon_s_derivative(F, theta, s, m, plane)


def profile_V_radon(g, theta, s, plane: PlaneRule = PlaneRule(), pullback=None):
    """E_V(theta, s) = s^{-m} (V g)(theta/(2s)) via the (m-1)-th derivative of R G."""
    m = g.dim.m
    G = pullback if pullback is not None else trace_pullback("V", g)
    c = (-1.0) ** (m - 1) / (2.0 * math.pi**m)
    return c * radon_s_derivative(G, theta, s, m - 1, plane)


def _s_of_point(x: np.ndarray):
    r = np.linalg.norm(x)
    if r == 0.0:
        raise ValueError("traces are undefined at the origin")
    return x / r, 1.0 / (2.0 * r), r


def trace_U_radon(f, x, plane: PlaneRule = PlaneRule()) -> float:
    """(U f)(x) by the Radon-route reduction."""
    theta, s, _ = _s_of_point(np.asarray(x, dtype=float))
    m = f.dim.m
    return s**m * float(profile_U_radon(f, theta, s, plane))


def trace_V_radon(g, x, plane: PlaneRule = PlaneRule()) -> float:
    """(V g)(x) by the Radon-route reduction."""
    theta, s, _ = _s_of_point(np.asarray(x, dtype=float))
    m = g.dim.m
    return s**m * float(profile_V_radon(g, theta, s, plane))


# parity sign sigma with E(theta, s) = sigma * E(-theta, -s)
def _parity(kind: str, m: int) -> float:
    if kind in ("U", "Vr"):
        return (-1.0) ** m
    if kind == "V":
        return (-1.0) ** (m - 1)
    if kind == "mean":
        return 1.0
    raise ValueError(f"unknown trace kind {kind!r}")


@dataclass(frozen=True)
class TraceField:
    """Tabulated trace in s-coordinates with per-direction cubic splines.

    profiles[j, k] holds the smooth rescaled profile E(theta_j, s_k):
    s^{-m} * trace for kinds U/V/Vr, and rho^{n-1} * (M h) for kind "mean".
    The s-grid lives in [0, 1/a]; values for negative s come from the
    antipodal direction and the parity sign, so stencils may cross s = 0
    freely and no radial truncation occurs.
    """

    kind: str  # "U" | "V" | "Vr" | "mean"
    dim: OddDimension
    sphere: SphereQuadrature
    s_grid: np.ndarray  # (K,), ascending, within [0, 1/a]
    profiles: np.ndarray  # (N_dir, K)
    route: str
    field_hash: str = ""
    support: tuple = (0.0, 0.0)
    pole_profiles: np.ndarray | None = None  # (2, K): +axis0 / -axis0 rows
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def s_max(self) -> float:
        return float(self.s_grid[-1])

    @property
    def parity(self) -> float:
        return _parity(self.kind, self.dim.m)

    def _extended_spline(self) -> RowSplines:
        if "spline" not in self._cache:
            anti = self.sphere.antipode_index()
            mirrored = self.parity * self.profiles[anti]
            if self.s_grid[0] == 0.0:
                s_ext = np.concatenate([-self.s_grid[:0:-1], self.s_grid])
                vals = np.concatenate(
                    [mirrored[:, :0:-1], self.profiles], axis=1
                )
            else:
                s_ext = np.concatenate([-self.s_grid[::-1], self.s_grid])
                vals = np.concatenate([mirrored[:, ::-1], self.profiles], axis=1)
            self._cache["spline"] = RowSplines(s_ext, vals)
        return self._cache["spline"]

    def profile_eval(self, j_idx, s):
        """E(theta_j, s) for arrays of direction indices and offsets."""
        return self._extended_spline()(j_idx, s)

    def profile_derivative(self, j_idx, s, order: int, step: float):
        """Central-difference d^order/ds^order of the profile."""
        offs, w = fd_weights(order, step)
        j_idx = np.asarray(j_idx)
        s = np.asarray(s, dtype=float)
        acc = np.zeros(np.broadcast_shapes(j_idx.shape, s.shape))
        for o, wt in zip(offs, w):
            acc = acc + wt * self.profile_eval(j_idx, s + o)
        return acc

    def _direction_index(self, theta: np.ndarray) -> int:
        dots = self.sphere.nodes @ theta
        j = int(np.argmax(dots))
        if dots[j] < 1.0 - 1e-10:
            raise ValueError(
                "query direction is not a tabulated node; "
                "use evaluate_any (angular interpolation) instead"
            )
        return j

    def evaluate(self, x) -> float:
        """Trace value at x whose direction must be a tabulated node."""
        x = np.asarray(x, dtype=float)
        theta, s, _ = _s_of_point(x)
        j = self._direction_index(theta)
        e = float(self.profile_eval(np.array([j]), np.array([s]))[0])
        return self._value_from_profile(e, s)

    def _value_from_profile(self, e, s):
        m = self.dim.m
        n = self.dim.n
        if self.kind == "mean":
            return (2.0 * s) ** (n - 1) * e
        return s**m * e

    # -- angular interpolation (n = 3 product grids) -------------------------

    def _interpolator(self):
        if "rgi" not in self._cache:
            if self.dim.n != 3:
                raise NotImplementedError(
                    "angular interpolation is implemented for n = 3 tables"
                )
            if self.pole_profiles is None:
                raise ValueError("table was built without pole rows")
            from scipy.interpolate import RegularGridInterpolator

            K, M = self.sphere.polar_grid_shape()
            S = len(self.s_grid)
            vals = self.profiles.reshape(K, M, S)
            c_ax = self.sphere.nodes[::M, 0]  # GL polar cosines, axis x1
            psi = np.arctan2(self.sphere.nodes[:M, 2], self.sphere.nodes[:M, 1])
            psi = np.mod(psi, 2.0 * math.pi)
            # pad azimuth periodically (2 ghost layers each side for cubic)
            psi_ext = np.concatenate(
                [psi[-2:] - 2 * math.pi, psi, psi[:2] + 2 * math.pi]
            )
            vals_psi = np.concatenate(
                [vals[:, -2:, :], vals, vals[:, :2, :]], axis=1
            )
            # pole rows: constant in azimuth; polar cosines ascend already
            c_ext = np.concatenate([[-1.0], c_ax, [1.0]])
            body = vals_psi
            south = np.broadcast_to(
                self.pole_profiles[1][None, None, :], (1, len(psi_ext), S)
            )
            north = np.broadcast_to(
                self.pole_profiles[0][None, None, :], (1, len(psi_ext), S)
            )
            grid_vals = np.concatenate([south, body, north], axis=0)
            self._cache["rgi"] = RegularGridInterpolator(
                (c_ext, psi_ext, self.s_grid),
                grid_vals,
                method="cubic",
                bounds_error=False,
                fill_value=None,
            )
        return self._cache["rgi"]

    def evaluate_any(self, pts) -> np.ndarray:
        """Trace values at arbitrary points via (polar, azimuth, s) interpolation."""
        pts = np.asarray(pts, dtype=float)
        flat = pts.reshape(-1, self.dim.n)
        r = np.linalg.norm(flat, axis=1)
        out = np.zeros(flat.shape[0])
        ok = r > 0.0
        s = np.zeros_like(r)
        s[ok] = 1.0 / (2.0 * r[ok])
        inside = ok & (s <= self.s_max)
        if inside.any():
            p = flat[inside]
            rr = r[inside]
            c = np.clip(p[:, 0] / rr, -1.0, 1.0)
            psi = np.mod(np.arctan2(p[:, 2], p[:, 1]), 2.0 * math.pi)
            e = self._interpolator()(np.stack([c, psi, s[inside]], axis=1))
            out[inside] = self._value_from_profile(e, s[inside])
        return out.reshape(pts.shape[:-1])


def _pole_axis_nodes(n: int) -> np.ndarray:
    e = np.zeros((2, n))
    e[0, 0] = 1.0
    e[1, 0] = -1.0
    return e


def tabulate_trace(
    kind: str,
    source,
    sphere: SphereQuadrature,
    s_grid,
    plane: PlaneRule = PlaneRule(),
    route: str = "radon",
    threads: int | None = None,
    dt: float | None = None,
    means_sphere: SphereQuadrature | None = None,
    with_poles: bool = True,
) -> TraceField:
    """Tabulate (U f) or (V g) as rescaled profiles on (theta_j, s_k).

    route "radon" evaluates the analytic plane-integral reduction (uniform
    accuracy down to s = 0); route "means" evaluates the explicit wave
    solution at radius 1/(2s) (requires s_grid[0] > 0 and a means sphere).
    """
    if kind not in ("U", "V"):
        raise ValueError("kind must be 'U' or 'V'")
    s_grid = np.asarray(s_grid, dtype=float)
    m = source.dim.m
    order = m if kind == "U" else m - 1
    c = (-1.0) ** order / (2.0 * math.pi**m)
    ndir = len(sphere)
    profiles = np.empty((ndir, len(s_grid)))
    pole = None
    if route == "radon":
        F = trace_pullback(kind, source)

        def work(theta):
            return c * radon_s_derivative(F, theta, s_grid, order, plane)

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for j, row in enumerate(
                    pool.map(lambda j: work(sphere.nodes[j]), range(ndir))
                ):
                    profiles[j] = row
        else:
            for j in range(ndir):
                profiles[j] = work(sphere.nodes[j])
        if with_poles:
            pole = np.stack([work(e) for e in _pole_axis_nodes(source.dim.n)])
    elif route == "means":
        if s_grid[0] <= 0.0:
            raise ValueError("means route requires s_grid excluding 0")
        if means_sphere is None:
            means_sphere = sphere
        tracer = trace_U_means if kind == "U" else trace_V_means

        def mean_row(theta):
            row = np.empty(len(s_grid))
            for k, s in enumerate(s_grid):
                x = theta / (2.0 * s)
                row[k] = tracer(source, x, means_sphere, dt) / s**m
            return row

        for j in range(ndir):
            profiles[j] = mean_row(sphere.nodes[j])
        if with_poles:
            pole = np.stack(
                [mean_row(e) for e in _pole_axis_nodes(source.dim.n)]
            )
    else:
        raise ValueError(f"unknown route {route!r}")
    return TraceField(
        kind=kind,
        dim=source.dim,
        sphere=sphere,
        s_grid=s_grid,
        profiles=profiles,
        route=route,
        field_hash=field_spec_hash(source) if hasattr(source, "to_spec") else "",
        support=tuple(source.support),
        pole_profiles=pole,
    )


def tabulate_mean_trace(
    h,
    sphere: SphereQuadrature,
    s_grid,
    route: str = "means",
    plane: PlaneRule = PlaneRule(),
    polar_nodes: int = 32,
    azimuth_level: int = 16,
    threads: int | None = None,
) -> TraceField:
    """Tabulate q(theta, s) = rho^{n-1} (M h)(rho theta, rho), rho = 1/(2s).

    route "means" uses the support-windowed origin-sphere quadrature (exact
    cap resolution at any radius); route "radon" uses
    q = (R H)(theta, s) / omega with H the 2-2n pullback of h.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    n = h.dim.n
    ndir = len(sphere)
    profiles = np.empty((ndir, len(s_grid)))
    if route == "means":
        if s_grid[0] <= 0.0:
            raise ValueError("means route requires s_grid excluding 0")

        def mean_row(theta):
            row = np.empty(len(s_grid))
            for k, s in enumerate(s_grid):
                rho = 1.0 / (2.0 * s)
                row[k] = rho ** (n - 1) * origin_mean_windowed(
                    h, rho * theta, polar_nodes, azimuth_level
                )
            return row

        for j in range(ndir):
            profiles[j] = mean_row(sphere.nodes[j])
        pole = np.stack([mean_row(e) for e in _pole_axis_nodes(n)])
    elif route == "radon":
        H = trace_pullback("mean", h)
        omega = h.dim.omega

        def work(theta):
            return radon_s_derivative(H, theta, s_grid, 0, plane) / omega

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for j, row in enumerate(
                    pool.map(lambda j: work(sphere.nodes[j]), range(ndir))
                ):
                    profiles[j] = row
        else:
            for j in range(ndir):
                profiles[j] = work(sphere.nodes[j])
        pole = np.stack([work(e) for e in _pole_axis_nodes(n)])
    else:
        raise ValueError(f"unknown route {route!r}")
    return TraceField(
        kind="mean",
        dim=h.dim,
        sphere=sphere,
        s_grid=s_grid,
        profiles=profiles,
        route=route,
        field_hash=field_spec_hash(h) if hasattr(h, "to_spec") else "",
        support=tuple(h.support),
        pole_profiles=pole,
    )


def trace_radial_derivative(trace: TraceField, x, dr: float) -> float:
    """d/dr of r^m * trace(r theta) at r = |x|, second-order in dr."""
    x = np.asarray(x, dtype=float)
    theta, _, r = _s_of_point(x)
    j = trace._direction_index(theta)
    m = trace.dim.m

    def g(rr):
        s = 1.0 / (2.0 * rr)
        e = float(trace.profile_eval(np.array([j]), np.array([s]))[0])
        return rr**m * s**m * e  # = 2^{-m} E(theta, 1/(2 rr))

    return (g(r + dr) - g(r - dr)) / (2.0 * dr)


def trace_radial_derivative_radon(
    g_field, x, plane: PlaneRule = PlaneRule()
) -> float:
    """Same quantity from d_s^m (R G)(theta, s) / (4 (-2 pi)^m r^2)."""
    x = np.asarray(x, dtype=float)
    theta, s, r = _s_of_point(x)
    m = g_field.dim.m
    G = trace_pullback("V", g_field)
    val = radon_s_derivative(G, theta, s, m, plane)
    return float(val) / (4.0 * (-2.0 * math.pi) ** m * r * r)


def derived_radial_table(trace_v: TraceField, dr_rel: float = 1e-3) -> TraceField:
    """Tabulate psi(x) = |x|^{-m} d/dr (r^m (V g)) as a Vr-kind trace.

    Profile D(theta, s) = s^{-m} psi = -2 s^2 dE_V/ds; computed by the
    radial central difference of the tabulated V-trace at each grid radius
    (the s = 0 cell is exactly zero).
    """
    if trace_v.kind != "V":
        raise ValueError("derived table requires a V-kind trace")
    s = trace_v.s_grid
    ndir = len(trace_v.sphere)
    m = trace_v.dim.m
    profiles = np.zeros((ndir, len(s)))
    a, b = trace_v.support
    dr = dr_rel * (b - a)
    pos = s > 0.0
    r = 1.0 / (2.0 * s[pos])
    jj = np.arange(ndir)[:, None]
    sp = 1.0 / (2.0 * (r + dr))
    sm = 1.0 / (2.0 * (r - dr))
    gp = (r + dr) ** m * sp**m * trace_v.profile_eval(jj, sp[None, :])
    gm = (r - dr) ** m * sm**m * trace_v.profile_eval(jj, sm[None, :])
    w = (gp - gm) / (2.0 * dr)  # = d/dr (r^m trace)
    # D = s^{-m} psi = r^{-m} s^{-m} W = 2^m W
    profiles[:, pos] = (2.0**m) * w
    pole = None
    if trace_v.pole_profiles is not None:
        pole = np.zeros((2, len(s)))
        spl = RowSplines(s, trace_v.pole_profiles)
        gp = (r + dr) ** m * sp**m * spl(np.array([[0], [1]]), sp[None, :])
        gm = (r - dr) ** m * sm**m * spl(np.array([[0], [1]]), sm[None, :])
        wpole = (gp - gm) / (2.0 * dr)
        pole[:, pos] = (2.0**m) * wpole
    return TraceField(
        kind="Vr",
        dim=trace_v.dim,
        sphere=trace_v.sphere,
        s_grid=s,
        profiles=profiles,
        route=trace_v.route,
        field_hash=trace_v.field_hash,
        support=trace_v.support,
        pole_profiles=pole,
    )


def save_trace_table(table: TraceField, csv_path, meta_path=None):
    """CSV + JSON sidecar dump, 17 significant digits (exact round trip)."""
    csv_path = Path(csv_path)
    meta_path = Path(meta_path) if meta_path else csv_path.with_suffix(".json")
    n = table.dim.n
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"theta{i+1}" for i in range(n)] + ["s", "profile"]
        )
        for j in range(len(table.sphere)):
            node = [f"{v:.17g}" for v in table.sphere.nodes[j]]
            for k, s in enumerate(table.s_grid):
                writer.writerow(node + [f"{s:.17g}", f"{table.profiles[j, k]:.17g}"])
    meta = {
        "kind": table.kind,
        "n": n,
        "sphere_level": table.sphere.level,
        "s_grid": {
            "start": f"{table.s_grid[0]:.17g}",
            "stop": f"{table.s_grid[-1]:.17g}",
            "num": len(table.s_grid),
        },
        "route": table.route,
        "field_hash": table.field_hash,
        "support": [f"{v:.17g}" for v in table.support],
        "has_poles": table.pole_profiles is not None,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    if table.pole_profiles is not None:
        pole_path = csv_path.with_suffix(".poles.csv")
        with open(pole_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["axis", "s", "profile"])
            for i, sign in enumerate(("+", "-")):
                for k, s in enumerate(table.s_grid):
                    writer.writerow(
                        [sign, f"{s:.17g}", f"{table.pole_profiles[i, k]:.17g}"]
                    )


def load_trace_table(csv_path, meta_path=None) -> TraceField:
    csv_path = Path(csv_path)
    meta_path = Path(meta_path) if meta_path else csv_path.with_suffix(".json")
    with open(meta_path) as fh:
        meta = json.load(fh)
    dim = OddDimension(meta["n"])
    sphere = build_sphere_quadrature(dim, meta["sphere_level"])
    s_grid = np.linspace(
        float(meta["s_grid"]["start"]),
        float(meta["s_grid"]["stop"]),
        meta["s_grid"]["num"],
    )
    profiles = np.zeros((len(sphere), len(s_grid)))
    with open(csv_path) as fh:
        reader = csv.reader(fh)
        next(reader)
        it = iter(reader)
        for j in range(len(sphere)):
            for k in range(len(s_grid)):
                profiles[j, k] = float(next(it)[-1])
    pole = None
    if meta.get("has_poles"):
        pole = np.zeros((2, len(s_grid)))
        with open(csv_path.with_suffix(".poles.csv")) as fh:
            reader = csv.reader(fh)
            next(reader)
            it = iter(reader)
            for i in range(2):
                for k in range(len(s_grid)):
                    pole[i, k] = float(next(it)[-1])
    return TraceField(
        kind=meta["kind"],
        dim=dim,
        sphere=sphere,
        s_grid=s_grid,
        profiles=profiles,
        route=meta["route"],
        field_hash=meta["field_hash"],
        support=tuple(float(v) for v in meta["support"]),
        pole_profiles=pole,
    )
