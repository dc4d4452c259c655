"""Smooth compactly supported test fields with exact directional derivatives.

Concrete fields are polynomial-times-bump functions supported in an annulus
away from the origin, closed under the two transforms the trace reductions
need: precomposition with the inversion map x -> x/|x|^2 times a power of
|x| (``inversion_pullback``) and plain multiplication by |x|^k
(``radial_power_scale``).  Directional derivatives of any order are exact,
propagated through the defining expressions with Taylor jets; no finite
differencing happens inside a field.

Field specs round-trip through plain dicts (kind, a, b, polynomial terms,
transform chain) so an experiment config fully determines its fields.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .geometry import OddDimension
from .jets import Jet

__all__ = [
    "AnalyticField",
    "AnnularBump",
    "InversionPullback",
    "RadialPowerScale",
    "ScaledField",
    "make_annular_bump",
    "inversion_pullback",
    "radial_power_scale",
    "field_from_spec",
    "field_to_spec",
    "field_spec_hash",
]

_TINY_BUMP_ARG = 1e-12  # below this, exp(-1/w) underflows to exactly 0.0


class AnalyticField:
    """Base class: a smooth function on R^n supported in an annulus.

    Subclasses implement ``_eval_inside`` (plain numpy point evaluation) and
    ``_jet`` (Taylor-jet evaluation through arbitrary coordinate jets); both
    may assume nothing about their input lanes beyond finiteness and must
    return exact zeros outside the support.
    """

    def __init__(self, dim: OddDimension, support, max_order: int):
        self.dim = dim
        self.support = (float(support[0]), float(support[1]))
        self.max_order = int(max_order)

    # -- required subclass hooks --------------------------------------------

    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jet(self, coords: list[Jet]) -> Jet:
        raise NotImplementedError

    # -- public evaluation ----------------------------------------------------

    def eval(self, pts) -> np.ndarray:
        """Point values; pts has shape (..., n). Zero outside the support."""
        pts = np.asarray(pts, dtype=float)
        scalar = pts.ndim == 1
        flat = pts.reshape(-1, self.dim.n)
        r = np.linalg.norm(flat, axis=1)
        a, b = self.support
        mask = (r >= a) & (r <= b)
        out = np.zeros(flat.shape[0])
        if mask.any():
            out[mask] = self._eval_inside(flat[mask])
        out = out.reshape(pts.shape[:-1])
        return float(out) if scalar else out

    def jet_values(self, pts, theta, order: int) -> np.ndarray:
        """Derivatives (theta . grad)^k at pts for k = 0..order.

        Returns shape (order+1,) + pts.shape[:-1]. theta broadcasts against
        pts (a single direction or one per point).
        """
        pts = np.asarray(pts, dtype=float)
        flat = pts.reshape(-1, self.dim.n)
        th = np.broadcast_to(np.asarray(theta, dtype=float), flat.shape)
        coords = [
            Jet.variable(flat[:, i], th[:, i], order) for i in range(self.dim.n)
        ]
        jet = self._jet(coords)
        fact = 1.0
        out = np.empty((order + 1, flat.shape[0]))
        for k in range(order + 1):
            if k > 1:
                fact *= k
            out[k] = fact * jet.coef[k]
        return out.reshape((order + 1,) + pts.shape[:-1])

    def directional_derivative(self, pts, theta, k: int):
        if k > self.max_order:
            raise ValueError(
                f"derivative order {k} exceeds declared max_order {self.max_order}"
            )
        vals = self.jet_values(pts, theta, k)
        return vals[k]

    # -- transforms -----------------------------------------------------------

    def scaled(self, alpha: float) -> "ScaledField":
        return ScaledField(self, alpha)

    def to_spec(self) -> dict:
        raise NotImplementedError


def _masked_jet(coords: list[Jet], mask: np.ndarray, inner) -> Jet:
    """Evaluate ``inner`` on the masked lanes, zero elsewhere."""
    order = coords[0].order
    n_lanes = coords[0].coef.shape[1]
    out = np.zeros((order + 1, n_lanes))
    if mask.any():
        idx = np.flatnonzero(mask)
        sub = [Jet(c.coef[:, idx]) for c in coords]
        out[:, idx] = inner(sub).coef
    return Jet(out)


class AnnularBump(AnalyticField):
    """P(x) * B(|x|) with B the standard C-infinity bump on the annulus.

    B(r) = exp(-1 / (1 - u^2)) for u = (2r - a - b)/(b - a) inside (a, b),
    zero elsewhere; P is a polynomial given as monomial terms.
    """

    kind = "bump"

    def __init__(self, dim, a, b, terms=None, max_order=None):
        if not (0.0 < a < b):
            raise ValueError("support must satisfy 0 < a < b (origin excluded)")
        dim = dim if isinstance(dim, OddDimension) else OddDimension(int(dim))
        super().__init__(dim, (a, b), max_order if max_order else dim.n)
        if terms is None:
            terms = [(1.0, (0,) * dim.n)]
        self.terms = [
            (float(c), tuple(int(p) for p in powers)) for c, powers in terms
        ]
        for _, powers in self.terms:
            if len(powers) != dim.n:
                raise ValueError("monomial powers must have one entry per axis")

    def _poly(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(pts.shape[0])
        for c, powers in self.terms:
            term = np.full(pts.shape[0], c)
            for i, p in enumerate(powers):
                if p:
                    term *= pts[:, i] ** p
            out += term
        return out

    def _bump_arg(self, r: np.ndarray) -> np.ndarray:
        a, b = self.support
        u = (2.0 * r - (a + b)) / (b - a)
        return 1.0 - u * u

    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(pts, axis=1)
        w = self._bump_arg(r)
        out = np.zeros(pts.shape[0])
        ok = w > _TINY_BUMP_ARG
        if ok.any():
            out[ok] = np.exp(-1.0 / w[ok]) * self._poly(pts[ok])
        return out

    def _jet(self, coords: list[Jet]) -> Jet:
        a, b = self.support
        x0 = np.stack([c.value() for c in coords], axis=1)
        r0 = np.linalg.norm(x0, axis=1)
        mask = self._bump_arg(r0) > _TINY_BUMP_ARG

        def inner(sub):
            r2 = sub[0] * sub[0]
            for c in sub[1:]:
                r2 = r2 + c * c
            r = r2.sqrt()
            u = (2.0 * r - (a + b)) * (1.0 / (b - a))
            w = 1.0 - u * u
            bump = (-w.reciprocal()).exp()
            poly = None
            for cf, powers in self.terms:
                term = Jet.constant(cf, sub[0].order, sub[0].coef.shape[1:])
                for i, p in enumerate(powers):
                    if p:
                        term = term * sub[i] ** p
                poly = term if poly is None else poly + term
            return bump * poly

        return _masked_jet(coords, mask, inner)

    def to_spec(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.support[0],
            "b": self.support[1],
            "poly": [
                {"coef": c, "powers": list(p)} for c, p in self.terms
            ],
            "max_order": self.max_order,
            "transforms": [],
        }


class InversionPullback(AnalyticField):
    """H(X) = |X|^k h(X / |X|^2); support [1/b, 1/a] for h supported in [a, b]."""

    def __init__(self, source: AnalyticField, k: int):
        a, b = source.support
        super().__init__(source.dim, (1.0 / b, 1.0 / a), source.max_order)
        self.source = source
        self.k = int(k)

    def _radial_power_eval(self, r2: np.ndarray) -> np.ndarray:
        if self.k % 2 == 0:
            return r2 ** (self.k // 2)
        return np.sqrt(r2) * r2 ** ((self.k - 1) // 2)

    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=1)
        inner = self.source.eval(pts / r2[:, None])
        return self._radial_power_eval(r2) * inner

    def _jet(self, coords: list[Jet]) -> Jet:
        x0 = np.stack([c.value() for c in coords], axis=1)
        r0sq = np.sum(x0 * x0, axis=1)
        a, b = self.support
        mask = (r0sq >= (a * (1 - 1e-13)) ** 2) & (r0sq <= (b * (1 + 1e-13)) ** 2)

        def inner(sub):
            r2 = sub[0] * sub[0]
            for c in sub[1:]:
                r2 = r2 + c * c
            inv_r2 = r2.reciprocal()
            Y = [c * inv_r2 for c in sub]
            if self.k % 2 == 0:
                wgt = r2 ** (self.k // 2)
            else:
                wgt = r2.sqrt() * r2 ** ((self.k - 1) // 2)
            return wgt * self.source._jet(Y)

        return _masked_jet(coords, mask, inner)

    def to_spec(self) -> dict:
        spec = self.source.to_spec()
        spec["transforms"] = spec["transforms"] + [
            {"kind": "inversion_pullback", "k": self.k}
        ]
        return spec


class RadialPowerScale(AnalyticField):
    """|x|^k h(x); smooth because the support stays away from the origin."""

    def __init__(self, source: AnalyticField, k: int):
        super().__init__(source.dim, source.support, source.max_order)
        self.source = source
        self.k = int(k)

    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=1)
        if self.k % 2 == 0:
            w = r2 ** (self.k // 2)
        else:
            w = np.sqrt(r2) * r2 ** ((self.k - 1) // 2)
        return w * self.source.eval(pts)

    def _jet(self, coords: list[Jet]) -> Jet:
        x0 = np.stack([c.value() for c in coords], axis=1)
        r0sq = np.sum(x0 * x0, axis=1)
        mask = r0sq > 1e-30

        def inner(sub):
            r2 = sub[0] * sub[0]
            for c in sub[1:]:
                r2 = r2 + c * c
            if self.k % 2 == 0:
                wgt = r2 ** (self.k // 2)
            else:
                wgt = r2.sqrt() * r2 ** ((self.k - 1) // 2)
            return wgt * self.source._jet(sub)

        return _masked_jet(coords, mask, inner)

    def to_spec(self) -> dict:
        spec = self.source.to_spec()
        spec["transforms"] = spec["transforms"] + [
            {"kind": "radial_power", "k": self.k}
        ]
        return spec


class ScaledField(AnalyticField):
    """alpha * h(x), for linearity checks and normalized experiments."""

    def __init__(self, source: AnalyticField, alpha: float):
        super().__init__(source.dim, source.support, source.max_order)
        self.source = source
        self.alpha = float(alpha)

    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        return self.alpha * self.source.eval(pts)

    def _jet(self, coords: list[Jet]) -> Jet:
        return self.source._jet(coords) * self.alpha

    def to_spec(self) -> dict:
        spec = self.source.to_spec()
        spec["transforms"] = spec["transforms"] + [
            {"kind": "scale", "alpha": self.alpha}
        ]
        return spec


def make_annular_bump(dim, a, b, angular_poly=None, max_order=None) -> AnnularBump:
    """Concrete smooth test field P(x) * B(|x|) supported in a <= |x| <= b."""
    return AnnularBump(dim, a, b, terms=angular_poly, max_order=max_order)


def inversion_pullback(h: AnalyticField, k: int) -> InversionPullback:
    return InversionPullback(h, k)


def radial_power_scale(h: AnalyticField, k: int) -> RadialPowerScale:
    return RadialPowerScale(h, k)


def field_from_spec(spec: dict, dim=None) -> AnalyticField:
    """Rebuild a field from its config block."""
    known = {"kind", "a", "b", "poly", "max_order", "transforms"}
    unknown = set(spec) - known
    if unknown:
        raise ValueError(f"unknown field spec keys: {sorted(unknown)}")
    if spec.get("kind") != "bump":
        raise ValueError(f"unsupported field kind: {spec.get('kind')!r}")
    if dim is None:
        raise ValueError("field_from_spec requires the ambient dimension")
    dim = dim if isinstance(dim, OddDimension) else OddDimension(int(dim))
    poly = spec.get("poly") or [{"coef": 1.0, "powers": [0] * dim.n}]
    terms = [(t["coef"], tuple(t["powers"])) for t in poly]
    field: AnalyticField = AnnularBump(
        dim, spec["a"], spec["b"], terms=terms, max_order=spec.get("max_order")
    )
    for tr in spec.get("transforms", []):
        kind = tr.get("kind")
        if kind == "inversion_pullback":
            field = InversionPullback(field, tr["k"])
        elif kind == "radial_power":
            field = RadialPowerScale(field, tr["k"])
        elif kind == "scale":
            field = ScaledField(field, tr["alpha"])
        else:
            raise ValueError(f"unknown transform kind: {kind!r}")
    return field


def field_to_spec(field: AnalyticField) -> dict:
    return field.to_spec()


def field_spec_hash(field_or_spec) -> str:
    spec = (
        field_or_spec
        if isinstance(field_or_spec, dict)
        else field_or_spec.to_spec()
    )
    canonical = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
