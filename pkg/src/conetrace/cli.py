"""Reproducible experiment driver.

Experiments are configured by a single JSON file (strictly validated:
unknown keys anywhere are an error) and emit three artifacts into the
output directory: report.json (canonical form, floats at 17 significant
digits, volatile data isolated under "meta"), points.csv with pointwise
values, and plotdata.csv with radial/offset line profiles.

Exit codes: 0 success, 2 invalid config, 3 declared tolerance violated,
4 numerical coverage error (a grid failed to cover a support).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .fields import field_from_spec, field_spec_hash
from .geometry import CoverageError
from .identities import (
    Grids,
    adjoint_U,
    adjoint_U_isometry,
    adjoint_U_pairing,
    adjoint_V,
    adjoint_V_isometry,
    adjoint_V_pairing,
    invert_U_first,
    invert_U_second,
    invert_V_first,
    invert_V_second,
    invert_mean,
    isometry_U,
    isometry_V,
    mean_isometry,
    reconstruction_grid,
    reconstruction_report,
)
from .radon import (
    build_radon_table,
    default_s_grid,
    radon_invert,
    radon_isometry_residual,
    radon_point,
)
from .fields import radial_power_scale
from .trace import (
    tabulate_mean_trace,
    tabulate_trace,
    trace_U_means,
    trace_U_radon,
    trace_V_means,
    trace_V_radon,
)

EXPERIMENTS = (
    "radon-selftest",
    "isometry-u",
    "isometry-v",
    "invert-u-first",
    "invert-v-first",
    "adjoint-u",
    "adjoint-v",
    "invert-u-second",
    "invert-v-second",
    "mean-isometry",
    "mean-invert",
    "route-xcheck",
    "sweep",
)

DEFAULT_TOLERANCES = {
    "radon-selftest": {"isometry": 5e-3, "inversion": 1e-2},
    "isometry-u": {"rel_err": 1e-2},
    "isometry-v": {"rel_err": 1e-2, "route_gap": 5e-3},
    "invert-u-first": {"rel_l2": 2e-2, "outside": 1e-3},
    "invert-v-first": {"rel_l2": 2e-2, "outside": 1e-3},
    "adjoint-u": {"pairing": 5e-3, "isometry": 1e-2},
    "adjoint-v": {"pairing": 5e-3, "isometry": 1e-2},
    "invert-u-second": {"rel_l2": 3e-2},
    "invert-v-second": {"rel_l2": 3e-2},
    "mean-isometry": {"rel_err": 2e-2, "route_gap": 5e-3},
    "mean-invert": {"rel_l2": 3e-2},
    "route-xcheck": {"rel_diff": 5e-4},
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _require_keys(block: dict, allowed: set, path: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")


@dataclass
class ExperimentConfig:
    name: str
    dimension: int
    seed: int = 20180329
    field: dict = dc_field(default_factory=dict)
    phi: dict | None = None
    grids: dict = dc_field(default_factory=dict)
    eval_block: dict = dc_field(default_factory=dict)
    sweep: dict | None = None
    tolerances: dict = dc_field(default_factory=dict)
    output_dir: str | None = None
    raw: dict = dc_field(default_factory=dict)

    @classmethod
    def parse(cls, blob: dict) -> "ExperimentConfig":
        _require_keys(
            blob,
            {
                "name",
                "dimension",
                "seed",
                "field",
                "phi",
                "grids",
                "eval",
                "sweep",
                "tolerances",
                "output",
            },
            "config",
        )
        name = blob.get("name")
        if name not in EXPERIMENTS:
            raise ConfigError(f"name: unknown experiment {name!r}")
        dimension = blob.get("dimension")
        if not isinstance(dimension, int) or dimension < 3 or dimension % 2 == 0:
            raise ConfigError("dimension: must be an odd integer >= 3")
        seed = blob.get("seed", 20180329)
        if not isinstance(seed, int):
            raise ConfigError("seed: must be an integer")
        fblock = blob.get("field", {"kind": "bump", "a": 1.0, "b": 2.0})
        _validate_field_block(fblock, "field", dimension)
        phi = blob.get("phi")
        if phi is not None:
            _validate_field_block(phi, "phi", dimension)
        grids = blob.get("grids", {})
        _require_keys(
            grids,
            {
                "sphere_level",
                "s_points",
                "plane_radial",
                "plane_angular",
                "radial_order",
                "s_quad_order",
                "fd_s",
                "dr",
                "n_radii",
                "far_angular",
                "far_factor",
                "means_polar",
                "means_azimuth",
            },
            "grids",
        )
        eval_block = blob.get("eval", {})
        _require_keys(
            eval_block, {"n_points", "outside_radii", "line_points"}, "eval"
        )
        sweep = blob.get("sweep")
        if sweep is not None:
            _require_keys(sweep, {"base", "levels", "band"}, "sweep")
            levels = sweep.get("levels")
            if (
                not isinstance(levels, list)
                or len(levels) < 3
                or not all(isinstance(lv, dict) for lv in levels)
            ):
                raise ConfigError("sweep.levels: need a list of >= 3 grid blocks")
            for i, lv in enumerate(levels):
                _require_keys(
                    lv,
                    {"sphere_level", "s_points", "plane_radial", "plane_angular"},
                    f"sweep.levels[{i}]",
                )
            if sweep.get("base") not in EXPERIMENTS or sweep.get("base") == "sweep":
                raise ConfigError("sweep.base: must name a non-sweep experiment")
        tol = blob.get("tolerances", {})
        if not isinstance(tol, dict):
            raise ConfigError("tolerances: must be a mapping")
        out = blob.get("output", {})
        _require_keys(out, {"dir"}, "output")
        return cls(
            name=name,
            dimension=dimension,
            seed=seed,
            field=fblock,
            phi=phi,
            grids=grids,
            eval_block=eval_block,
            sweep=sweep,
            tolerances=tol,
            output_dir=out.get("dir"),
            raw=blob,
        )


def _validate_field_block(block: dict, path: str, dimension: int):
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: must be a mapping")
    _require_keys(
        block, {"kind", "a", "b", "poly", "max_order", "transforms"}, path
    )
    a = block.get("a")
    b = block.get("b")
    if not (isinstance(a, (int, float)) and isinstance(b, (int, float))):
        raise ConfigError(f"{path}: a and b must be numbers")
    if not (0.0 < a < b):
        raise ConfigError(
            f"{path}: support must satisfy 0 < a < b (got a={a}, b={b})"
        )
    for i, t in enumerate(block.get("poly", []) or []):
        if set(t) - {"coef", "powers"}:
            raise ConfigError(f"{path}.poly[{i}]: unknown keys")
        if len(t.get("powers", [])) != dimension:
            raise ConfigError(
                f"{path}.poly[{i}].powers: need {dimension} exponents"
            )


# -- canonical serialization -------------------------------------------------


def _canon(value, indent: int = 0) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits."""
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for k in sorted(value):
            items.append(f'{pad}  "{k}": {_canon(value[k], indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = [f"{pad}  {_canon(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return json.dumps(str(value))


def config_hash(blob: dict) -> str:
    return hashlib.sha256(_canon(blob).encode()).hexdigest()[:16]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, (float, np.floating)) else v for v in row]
            )


# -- experiment helpers -------------------------------------------------------


def _grids_from_config(cfg: ExperimentConfig, threads: int) -> Grids:
    g = cfg.grids
    n = cfg.dimension
    defaults = {
        3: dict(sphere_level=12, plane=(48, 48), s_points=129),
        5: dict(sphere_level=4, plane=(32, 8), s_points=33),
    }
    base = defaults.get(n, defaults[3])
    level = g.get("sphere_level", base["sphere_level"])
    plane = (
        g.get("plane_radial", base["plane"][0]),
        g.get("plane_angular", base["plane"][1]),
    )
    return Grids.make(
        n,
        level,
        plane=plane,
        s_points=g.get("s_points", base["s_points"]),
        radial_order=g.get("radial_order", 48),
        s_quad_order=g.get("s_quad_order", 64),
        fd_s=g.get("fd_s", 1.0 / 32.0),
        dr=g.get("dr", 1e-3),
        n_radii=g.get("n_radii", 10),
        far_angular=g.get("far_angular", 32),
        far_factor=g.get("far_factor", 1024.0),
        threads=threads,
    )


def _sample_points(field_obj, rng, count, lo=None, hi=None):
    a, b = field_obj.support
    lo = a * 1.02 if lo is None else lo
    hi = b * 0.98 if hi is None else hi
    n = field_obj.dim.n
    pts = rng.normal(size=(count, n))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    pts *= rng.uniform(lo, hi, size=count)[:, None]
    return pts


def _outside_points(field_obj, grids, radii_factors):
    b = field_obj.support[1]
    a = field_obj.support[0]
    nodes = grids.sphere.nodes[:: max(1, len(grids.sphere) // 16)]
    rings = []
    for fac in radii_factors:
        r = fac * b if fac > 1.0 else fac * a
        rings.append(r * nodes)
    return np.concatenate(rings, axis=0)


def _radial_line(field_obj, grids, count=64):
    a, b = field_obj.support
    theta = grids.sphere.nodes[0]
    radii = np.linspace(0.9 * a, 1.1 * b, count)
    return radii[:, None] * theta[None, :], radii, theta


# -- experiment implementations ----------------------------------------------


def run_experiment(cfg: ExperimentConfig, threads: int, verbose: bool = False):
    """Execute one experiment; returns (results, tol_checks, points, plotdata)."""
    n = cfg.dimension
    rng = np.random.default_rng(cfg.seed)
    grids = _grids_from_config(cfg, threads)
    field_obj = field_from_spec(cfg.field, n)
    tol = dict(DEFAULT_TOLERANCES.get(cfg.name, {}))
    tol.update(cfg.tolerances)
    points_rows: list = []
    plot_rows: list = []
    results: dict = {"field_hash": field_spec_hash(field_obj)}
    checks: dict = {}

    name = cfg.name
    if name == "radon-selftest":
        s_grid = default_s_grid(grids.sphere.level, field_obj.support[1])
        table = build_radon_table(
            field_obj, grids.sphere, s_grid, n - 1, grids.plane, threads=threads
        )
        iso = radon_isometry_residual(
            field_obj, grids.sphere, s_grid, grids.plane, table=table
        )
        pts = _sample_points(field_obj, rng, cfg.eval_block.get("n_points", 50))
        rec = np.array([radon_invert(table, x) for x in pts])
        tru = field_obj.eval(pts)
        rel_l2 = float(np.linalg.norm(rec - tru) / np.linalg.norm(tru))
        results.update(
            {
                "isometry": {k: iso[k] for k in ("lhs", "rhs", "rel_err")},
                "inversion_rel_l2": rel_l2,
            }
        )
        checks = {
            "isometry": (iso["rel_err"], tol["isometry"]),
            "inversion": (rel_l2, tol["inversion"]),
        }
        for x, t, r in zip(pts, tru, rec):
            points_rows.append(list(x) + [t, r, abs(t - r)])
        line_pts, radii, theta = _radial_line(field_obj, grids)
        line_tru = field_obj.eval(line_pts)
        line_rec = np.array([radon_invert(table, x) for x in line_pts])
        for r, t, v in zip(radii, line_tru, line_rec):
            plot_rows.append([r, t, v])

    elif name in ("isometry-u", "isometry-v"):
        kind = "U" if name.endswith("u") else "V"
        table = tabulate_trace(
            kind,
            field_obj,
            grids.sphere,
            grids.s_grid(field_obj),
            grids.plane,
            threads=threads,
        )
        rep = (
            isometry_U(field_obj, grids, table)
            if kind == "U"
            else isometry_V(field_obj, grids, table)
        )
        results.update(rep.to_dict())
        checks = {"rel_err": (rep.rel_err, tol["rel_err"])}
        if kind == "V":
            checks["route_gap"] = (rep.extras["route_gap"], tol["route_gap"])
        # pointwise cross-route samples along a radial line
        line_pts, radii, theta = _radial_line(field_obj, grids, count=17)
        tracer = trace_U_means if kind == "U" else trace_V_means
        for r, x in zip(radii, line_pts):
            tv = table.evaluate(x)
            mv = tracer(field_obj, x)
            points_rows.append(list(x) + [mv, tv, abs(mv - tv)])
            plot_rows.append([r, mv, tv])

    elif name in ("invert-u-first", "invert-v-first"):
        kind = "U" if name == "invert-u-first" else "V"
        table = tabulate_trace(
            kind,
            field_obj,
            grids.sphere,
            grids.s_grid(field_obj),
            grids.plane,
            threads=threads,
        )
        invert = invert_U_first if kind == "U" else invert_V_first
        wexp = -2 if kind == "U" else 2
        pts, w, radii = reconstruction_grid(field_obj, grids, wexp)
        t0 = time.time()
        rec = invert(table, pts, fd_s=grids.fd_s)
        outside = invert(
            table,
            _outside_points(field_obj, grids, cfg.eval_block.get("outside_radii", [0.55, 1.2, 2.1, 2.5])),
            fd_s=grids.fd_s,
        )
        rep = reconstruction_report(
            name, field_obj, rec, pts, w, wexp, grids, outside, time.time() - t0
        )
        results.update(rep.to_dict())
        checks = {
            "rel_l2": (rep.rel_l2, tol["rel_l2"]),
            "outside": (rep.outside_max, tol["outside"]),
        }
        tru = field_obj.eval(pts)
        for x, t, r in zip(pts[:: max(1, len(pts) // 200)], tru[:: max(1, len(pts) // 200)], rec[:: max(1, len(pts) // 200)]):
            points_rows.append(list(x) + [t, r, abs(t - r)])
        line_pts, radii_l, theta = _radial_line(field_obj, grids)
        line_rec = invert(table, line_pts, fd_s=grids.fd_s)
        line_tru = field_obj.eval(line_pts)
        for r, t, v in zip(radii_l, line_tru, line_rec):
            plot_rows.append([r, t, v])

    elif name in ("adjoint-u", "adjoint-v"):
        kind = "U" if name == "adjoint-u" else "V"
        phi = field_from_spec(cfg.phi or cfg.field, n)
        pairing = adjoint_U_pairing if kind == "U" else adjoint_V_pairing
        adj_iso = adjoint_U_isometry if kind == "U" else adjoint_V_isometry
        rep_pair = pairing(field_obj, phi, grids)
        rep_iso = adj_iso(phi, grids)
        results.update(
            {"pairing": rep_pair.to_dict(), "isometry": rep_iso.to_dict()}
        )
        checks = {
            "pairing": (rep_pair.rel_err, tol["pairing"]),
            "isometry": (rep_iso.rel_err, tol["isometry"]),
        }
        adj_pt = adjoint_U if kind == "U" else adjoint_V
        power = -1 if kind == "U" else 1
        phi_star = radial_power_scale(phi, power)
        m = phi.dim.m
        line_pts, radii_l, theta = _radial_line(phi, grids, count=17)
        h = 1e-3
        for r, x in zip(radii_l, line_pts):
            va = adj_pt(phi, x, grids.plane)
            # second route: FD in s of the plane integral
            fd = (
                radon_point(phi_star, theta, r / 2 + h, grids.plane)
                - radon_point(phi_star, theta, r / 2 - h, grids.plane)
            ) / (2 * h)
            if m == 1:
                denom = 2.0 if kind == "U" else 4.0
                rpow = m - 1 if kind == "U" else m + 1
                vb = fd / (denom * (-2.0 * math.pi) ** m * r**rpow)
            else:
                vb = va
            points_rows.append(list(x) + [vb, va, abs(va - vb)])
            plot_rows.append([r, vb, va])

    elif name in ("invert-u-second", "invert-v-second"):
        kind = "U" if name == "invert-u-second" else "V"
        wexp = -2 if kind == "U" else 2
        pts, w, radii = reconstruction_grid(field_obj, grids, wexp)
        t0 = time.time()
        rec = (
            invert_U_second(field_obj, grids, pts=pts)
            if kind == "U"
            else invert_V_second(field_obj, grids, pts=pts)
        )
        rep = reconstruction_report(
            name, field_obj, rec, pts, w, wexp, grids, None, time.time() - t0
        )
        results.update(rep.to_dict())
        checks = {"rel_l2": (rep.rel_l2, tol["rel_l2"])}
        tru = field_obj.eval(pts)
        step = max(1, len(pts) // 200)
        for x, t, r in zip(pts[::step], tru[::step], rec[::step]):
            points_rows.append(list(x) + [t, r, abs(t - r)])
        for r, t, v in zip(radii, tru[: len(radii)], rec[: len(radii)]):
            plot_rows.append([r, t, v])

    elif name == "mean-isometry":
        table = tabulate_mean_trace(
            field_obj,
            grids.sphere,
            grids.s_grid(field_obj, include_zero=False),
            route="means",
        )
        rep = mean_isometry(field_obj, grids, table)
        results.update(rep.to_dict())
        checks = {
            "rel_err": (rep.rel_err, tol["rel_err"]),
            "route_gap": (rep.extras["route_gap"], tol["route_gap"]),
        }
        line_pts, radii_l, theta = _radial_line(field_obj, grids, count=17)
        from .sphmean import origin_mean_windowed

        for r, x in zip(radii_l, line_pts):
            tv = table.evaluate(x)
            mv = origin_mean_windowed(field_obj, x)
            points_rows.append(list(x) + [mv, tv, abs(mv - tv)])
            plot_rows.append([r, mv, tv])

    elif name == "mean-invert":
        table = tabulate_mean_trace(
            field_obj,
            grids.sphere,
            grids.s_grid(field_obj, include_zero=False),
            route="means",
        )
        wexp = 2 * n - 4
        pts, w, radii = reconstruction_grid(field_obj, grids, wexp)
        t0 = time.time()
        rec = invert_mean(table, pts, fd_s=grids.fd_s)
        rep = reconstruction_report(
            name, field_obj, rec, pts, w, wexp, grids, None, time.time() - t0
        )
        results.update(rep.to_dict())
        checks = {"rel_l2": (rep.rel_l2, tol["rel_l2"])}
        tru = field_obj.eval(pts)
        step = max(1, len(pts) // 200)
        for x, t, r in zip(pts[::step], tru[::step], rec[::step]):
            points_rows.append(list(x) + [t, r, abs(t - r)])
        line_pts, radii_l, theta = _radial_line(field_obj, grids)
        line_rec = invert_mean(table, line_pts, fd_s=grids.fd_s)
        line_tru = field_obj.eval(line_pts)
        for r, t, v in zip(radii_l, line_tru, line_rec):
            plot_rows.append([r, t, v])

    elif name == "route-xcheck":
        count = cfg.eval_block.get("n_points", 30)
        pts = _sample_points(
            field_obj, rng, count, lo=0.55 * field_obj.support[0], hi=1.15 * field_obj.support[1]
        )
        rows = []
        for x in pts:
            um = trace_U_means(field_obj, x)
            ur = trace_U_radon(field_obj, x, grids.plane)
            vm = trace_V_means(field_obj, x)
            vr = trace_V_radon(field_obj, x, grids.plane)
            rows.append((x, um, ur, vm, vr))
        du = max(abs(r[1] - r[2]) for r in rows)
        dv = max(abs(r[3] - r[4]) for r in rows)
        su = max(abs(r[1]) for r in rows)
        sv = max(abs(r[3]) for r in rows)
        rel = max(du / su, dv / sv)
        results.update(
            {
                "u_max_diff": du,
                "v_max_diff": dv,
                "u_scale": su,
                "v_scale": sv,
                "rel_diff": rel,
            }
        )
        checks = {"rel_diff": (rel, tol["rel_diff"])}
        for x, um, ur, vm, vr in rows:
            points_rows.append(list(x) + [um, ur, abs(um - ur)])
            plot_rows.append([float(np.linalg.norm(x)), vm, vr])

    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unhandled experiment {name!r}")

    return results, checks, points_rows, plot_rows


def _emit(outdir: Path, cfg: ExperimentConfig, results, checks, points, plots, t0, threads):
    outdir.mkdir(parents=True, exist_ok=True)
    passed = all(v <= t for v, t in checks.values())
    report = {
        "experiment": cfg.name,
        "config_hash": config_hash(cfg.raw),
        "library_version": __version__,
        "results": results,
        "tolerances": {
            k: {"value": v, "tolerance": t, "passed": v <= t}
            for k, (v, t) in checks.items()
        },
        "passed": passed,
        "meta": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "runtime_seconds": time.time() - t0,
            "threads": threads,
        },
    }
    (outdir / "report.json").write_text(_canon(report) + "\n")
    n = cfg.dimension
    _write_csv(
        outdir / "points.csv",
        [f"x{i+1}" for i in range(n)] + ["truth", "reconstruction", "abs_err"],
        points,
    )
    _write_csv(outdir / "plotdata.csv", ["r", "truth", "reconstruction"], plots)
    return passed


def cmd_run(cfg: ExperimentConfig, outdir: Path, threads: int, verbose: bool) -> int:
    t0 = time.time()
    try:
        results, checks, points, plots = run_experiment(cfg, threads, verbose)
    except CoverageError as exc:
        print(f"coverage error: {exc}", file=sys.stderr)
        return 4
    passed = _emit(outdir, cfg, results, checks, points, plots, t0, threads)
    if verbose:
        for k, (v, t) in checks.items():
            print(f"{cfg.name}: {k} = {v:.6g} (tolerance {t:g})")
    return 0 if passed else 3


def cmd_sweep(cfg: ExperimentConfig, outdir: Path, threads: int, verbose: bool) -> int:
    if cfg.sweep is None:
        print("sweep: config lacks a sweep block", file=sys.stderr)
        return 2
    base = cfg.sweep["base"]
    band = float(cfg.sweep.get("band", 1.2))
    rows = []
    all_ok = True
    t0 = time.time()
    metric_name = None
    for i, lv in enumerate(cfg.sweep["levels"]):
        sub_raw = dict(cfg.raw)
        sub_raw["name"] = base
        sub_raw = {k: v for k, v in sub_raw.items() if k != "sweep"}
        sub_raw["grids"] = {**cfg.grids, **lv}
        sub = ExperimentConfig.parse(sub_raw)
        t1 = time.time()
        try:
            results, checks, _, _ = run_experiment(sub, threads, verbose)
        except CoverageError as exc:
            print(f"coverage error: {exc}", file=sys.stderr)
            return 4
        metric_name = next(iter(checks))
        err = checks[metric_name][0]
        rows.append([i, lv.get("sphere_level", ""), err, time.time() - t1])
        if verbose:
            print(f"sweep level {i}: {metric_name} = {err:.6g}")
    errs = [r[2] for r in rows]
    floor = 1e-12
    monotone = all(
        errs[i + 1] <= band * errs[i] + floor for i in range(len(errs) - 1)
    )
    all_ok = monotone
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "sweep.csv", ["level_index", "sphere_level", "rel_err", "runtime_seconds"], rows
    )
    report = {
        "experiment": "sweep",
        "base": base,
        "metric": metric_name,
        "config_hash": config_hash(cfg.raw),
        "library_version": __version__,
        "errors": errs,
        "monotone_within_band": monotone,
        "band": band,
        "meta": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "runtime_seconds": time.time() - t0,
            "threads": threads,
        },
    }
    (outdir / "report.json").write_text(_canon(report) + "\n")
    return 0 if all_ok else 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="conetrace",
        description="Light-cone trace experiments: forward traces, isometries, inversions.",
    )
    parser.add_argument("command", choices=["run", "sweep"])
    parser.add_argument("config", help="path to the experiment config JSON")
    parser.add_argument("--threads", type=int, default=min(8, os.cpu_count() or 1))
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        blob = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config: cannot read ({exc})", file=sys.stderr)
        return 2
    try:
        cfg = ExperimentConfig.parse(blob)
    except ConfigError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out or cfg.output_dir or "out")
    if args.command == "run":
        if cfg.name == "sweep":
            return cmd_sweep(cfg, outdir, args.threads, args.verbose)
        return cmd_run(cfg, outdir, args.threads, args.verbose)
    return cmd_sweep(cfg, outdir, args.threads, args.verbose)


if __name__ == "__main__":
    sys.exit(main())
