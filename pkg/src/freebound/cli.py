"""Command-line entry point.

Subcommands: generate, analyze-surface, curve-energy, optimize, verify.
Exit codes: 0 success, 1 a verdict failed, 2 bad input, 3 inadmissible
mesh, 4 optimizer line-search failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import geometry as geo
from .config import ConfigError, load_config, resolve_workers
from .geometry import ShapeError, ShapeSpec, TopologyError
from .io import (ParseError, load_curve, load_mesh, make_report, save_curve, save_off, save_profile_csv,
                 save_report, save_trace_csv, verdict)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_ADMISSIBILITY, EXIT_OPTIMIZER = 0, 1, 2, 3, 4
RADIUS_GATE = 1e-6
ANGLE_GATE_DEG = 2.0


class InputError(Exception):
    pass


class Inadmissible(Exception):
    def __init__(self, message, defects):
        super().__init__(message)
        self.defects = defects


def _settings(args, keys, defaults):
    """Explicit flags win over the config file, which wins over defaults."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for k in keys:
        v = getattr(args, k, None)
        out[k] = v if v is not None else cfg.get(k, defaults.get(k))
    if getattr(args, "reproducible", False):
        out["workers"] = 1
    else:
        out["workers"] = resolve_workers(getattr(args, "workers", None) or cfg.get("workers"))
    return out


def _vector(text):
    try:
        v = np.array([float(t) for t in str(text).replace(" ", "").split(",")])
    except ValueError:
        raise InputError(f"center must be three comma-separated numbers, got {text!r}") from None
    if v.shape != (3,):
        raise InputError(f"center must have three coordinates, got {text!r}")
    return v


def parse_radii(text):
    """``start:stop:count`` (geometric spacing) or a comma-separated list."""
    text = str(text).strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
            if not (0 < a < b and n >= 2):
                raise InputError(f"radius grid {text!r} needs 0 < start < stop and count >= 2")
            radii = np.geomspace(a, b, n)
        else:
            radii = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"cannot parse radius grid {text!r}") from None
    if radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise InputError(f"radius grid must be positive and strictly increasing, got {text!r}")
    return radii


def _p_list(text):
    try:
        ps = [float(t) for t in str(text).split(",")]
    except ValueError:
        raise InputError(f"cannot parse p list {text!r}") from None
    for p in ps:
        if not 1.0 < p <= 8.0:
            raise InputError(f"p must lie in (1, 8], got {p}")
    return ps


def _positive(name, value):
    value = float(value)
    if not value > 0:
        raise InputError(f"{name} must be > 0, got {value}")
    return value


def _out(message):
    print(message, flush=True)


# generate --------------------------------------------------------------------


def cmd_generate(args):
    s = _settings(args, ["kind", "resolution", "r", "radius", "a", "b", "amplitude", "mode", "phase", "seed",
                         "n_modes", "output"], {"resolution": 64})
    if not s["kind"]:
        raise InputError("--kind is required")
    fields = {k: s[k] for k in ShapeSpec.__dataclass_fields__ if k in s and s[k] is not None}
    spec = ShapeSpec(**fields)
    shape = geo.generate_shape(spec)
    out = s["output"] or (f"{spec.kind}.off" if spec.kind in geo.SURFACE_KINDS else f"{spec.kind}.json")
    if isinstance(shape, geo.TriangleMesh):
        save_off(shape, out)
        msg = f"wrote {out}: {shape.n_vertices} vertices, {shape.n_faces} faces, area {shape.area():.5f}"
        if spec.kind == "spherical-cap":
            msg += f" (analytic area {geo.cap_geometry(spec.r)['area']:.5f})"
        elif spec.kind == "flat-disk":
            msg += f" (analytic area {math.pi:.5f})"
    else:
        save_curve(shape, out)
        msg = f"wrote {out}: {shape.n} vertices, length {shape.length():.5f}"
    _out(msg)
    return EXIT_OK


# analyze-surface ---------------------------------------------------------------


def _support(kind, axes):
    from .support import Ellipsoid

    if kind in (None, "unit-sphere"):
        return None
    if kind == "ellipsoid":
        a, b, c = (_positive("ellipsoid axis", t) for t in str(axes or "2,1,1").split(","))
        return Ellipsoid(a, b, c)
    raise InputError(f"unknown support {kind!r} (expected unit-sphere or ellipsoid)")


def _gate(data, descriptor):
    from .support import support_admissibility
    from .willmore import admissibility

    if descriptor is None:
        adm = admissibility(data.mesh, data.B)
        dist = adm["max_boundary_radius_defect"]
    else:
        adm = support_admissibility(data, descriptor)
        dist = adm["max_support_distance"]
    angle_tol = max(ANGLE_GATE_DEG, math.degrees(data.h))
    adm.update(distance_tolerance=RADIUS_GATE, angle_tolerance_deg=angle_tol)
    if dist > RADIUS_GATE or adm["max_conormal_angle_deg"] > angle_tol:
        raise Inadmissible(f"mesh is not a free-boundary surface: boundary distance {dist:.3e} "
                           f"(limit {RADIUS_GATE:g}), conormal angle {adm['max_conormal_angle_deg']:.3f} deg "
                           f"(limit {angle_tol:.3f})", adm)
    return adm


def cmd_analyze_surface(args):
    from .monotonicity import g_profile, monotonicity_check
    from .support import support_inequality_check
    from .willmore import li_yau_check, surface_data, willmore_check, willmore_energy

    s = _settings(args, ["mesh", "centers", "radii", "output", "profile_dir", "tol", "support", "support_axes",
                         "format"], {"radii": "0.1:2.5:24"})
    mesh = load_mesh(s["mesh"], s["format"])
    if not mesh.boundary_loops:
        raise InputError(f"{s['mesh']}: mesh has no boundary")
    centers = s["centers"] if isinstance(s["centers"], list) else [s["centers"] or "0,0,0"]
    centers = [_vector(c) for c in centers]
    radii = parse_radii(s["radii"])
    data = surface_data(mesh)
    descriptor = _support(s["support"], s["support_axes"])
    results = {"admissibility": _gate(data, descriptor)}
    tol = _positive("tol", s["tol"]) if s["tol"] is not None else data.h
    mono_tol = 10 * data.h

    rep = willmore_energy(data)
    results["willmore"] = rep.to_dict()
    results["willmore_energy"] = rep.willmore
    results["h"] = data.h
    verdicts = [willmore_check(rep, tol), li_yau_check(rep, tol)]
    profiles = []
    for k, c in enumerate(centers):
        prof = g_profile(data, c, radii)
        chk = monotonicity_check(prof, mono_tol)
        profiles.append({"center": c, "min_increment": chk["min_increment"],
                         "max_identity_residual": chk["max_identity_residual"]})
        verdicts.append(verdict(f"monotonicity[{k}]", chk["monotone"], chk["min_increment"], 0.0, mono_tol,
                                center=c))
        verdicts.append(verdict(f"annulus_identity[{k}]", chk["identity"], chk["max_identity_residual"], 0.0,
                                mono_tol, center=c))
        if s["profile_dir"]:
            os.makedirs(s["profile_dir"], exist_ok=True)
            save_profile_csv(prof, os.path.join(s["profile_dir"], f"profile_{k}.csv"))
    results["profiles"] = profiles
    if descriptor is not None:
        sup = support_inequality_check(data, descriptor)
        results["support_inequality"] = sup
        verdicts.append(sup)

    report = make_report({"mesh": os.path.abspath(s["mesh"]), "vertices": mesh.n_vertices,
                          "faces": mesh.n_faces, "radii": radii}, results, verdicts)
    if s["output"]:
        save_report(report, s["output"])
    _out(f"willmore {rep.willmore:.6f}  (2 pi = {2 * math.pi:.6f}, h = {data.h:.4f})")
    _out(f"max tilde density {rep.max_tilde_density:.4f}  equality defect {rep.equality_defect:.4g}")
    return _summarize(verdicts)


def _summarize(verdicts):
    ok = True
    for v in verdicts:
        ok &= bool(v["pass"])
        _out(f"[{'PASS' if v['pass'] else 'FAIL'}] {v['name']}: measured {v['measured']!r} "
             f"expected {v['expected']!r} tol {v['tolerance']!r}")
    return EXIT_OK if ok else EXIT_FAIL


# curves -----------------------------------------------------------------------


def cmd_curve_energy(args):
    from .tangent_point import curve_energy

    s = _settings(args, ["curve", "p", "tol", "output"], {"p": "2", "tol": 1e-3})
    curve = load_curve(s["curve"])
    if curve.n < 8:
        raise InputError(f"{s['curve']}: need at least 8 vertices, got {curve.n}")
    rep = curve_energy(curve, _p_list(s["p"]), tol=_positive("tol", s["tol"]), workers=s["workers"])
    report = make_report({"curve": os.path.abspath(s["curve"]), "vertices": curve.n},
                         {"curve_energy": rep.to_dict()}, rep.verdicts)
    if s["output"]:
        save_report(report, s["output"])
    _out(f"length {rep.length:.6f}  E_1 {rep.e1:.6f}  (2 pi L = {2 * math.pi * rep.length:.6f})")
    for p, v in rep.normalized_ep.items():
        _out(f"normalized E_{p:g} {v:.6f}")
    return _summarize(rep.verdicts)


def cmd_optimize(args):
    from .optimizer import OptimizerConfig, minimize

    keys = ["p", "max_iters", "initial_step", "shrink", "armijo", "threshold", "resample_every", "max_backtracks",
            "seed"]
    s = _settings(args, keys + ["curve", "trace", "output"], {})
    cfg_fields = {k: s[k] for k in keys if s[k] is not None}
    try:
        cfg = OptimizerConfig(**cfg_fields).validate()
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid optimizer configuration: {exc}") from None
    curve = load_curve(s["curve"])
    if curve.n < 8:
        raise InputError(f"{s['curve']}: need at least 8 vertices, got {curve.n}")
    trace = minimize(curve, cfg)
    if s["trace"]:
        save_trace_csv(trace, s["trace"])
    if s["output"]:
        save_curve(trace.final_curve, s["output"])
    _out(f"{trace.message} after {trace.iterations} iterations: objective {trace.objective[-1]:.8f} "
         f"(2 pi = {2 * math.pi:.8f})")
    return EXIT_OPTIMIZER if trace.line_search_failed else EXIT_OK


def cmd_verify(args):
    from .verify import run_suite

    only = None
    if args.only:
        try:
            only = {int(t) for t in args.only.split(",")}
        except ValueError:
            raise InputError(f"--only expects comma-separated criterion numbers, got {args.only!r}") from None
        if not only <= set(range(1, 12)):
            raise InputError("criterion numbers run from 1 to 11")
    results = run_suite(args.suite, echo=_out, only=only)
    n_ok = sum(r.passed for r in results)
    _out(f"{n_ok}/{len(results)} criteria passed")
    return EXIT_OK if n_ok == len(results) else EXIT_FAIL


# parser -----------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="freebound", description="Free-boundary Willmore and tangent-point tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file; explicit flags take precedence")
        p.add_argument("--workers", type=int, help=f"parallelism width (env {'FREEBOUND_WORKERS'} overrides)")
        p.add_argument("--reproducible", action="store_true", help="single worker, fixed summation order")

    g = sub.add_parser("generate", help="write a fixture mesh (OFF) or curve (JSON)")
    g.add_argument("--kind", choices=geo.SURFACE_KINDS + geo.CURVE_KINDS)
    g.add_argument("--resolution", type=int)
    for name in ("r", "radius", "a", "b", "amplitude", "phase"):
        g.add_argument(f"--{name}", type=float)
    for name in ("mode", "seed", "n-modes"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("-o", "--output")
    common(g)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze-surface", help="Willmore, density, monotonicity and Li-Yau report")
    a.add_argument("mesh")
    a.add_argument("--format", choices=("off", "obj"))
    a.add_argument("--center", dest="centers", action="append", help="x,y,z (repeatable)")
    a.add_argument("--radii", help="start:stop:count (geometric) or r1,r2,...")
    a.add_argument("--tol", type=float, help="tolerance of the Willmore and Li-Yau verdicts (default h)")
    a.add_argument("--support", choices=("unit-sphere", "ellipsoid"))
    a.add_argument("--support-axes", help="ellipsoid semi-axes a,b,c")
    a.add_argument("--profile-dir", help="directory for per-center profile CSVs")
    a.add_argument("-o", "--output")
    common(a)
    a.set_defaults(func=cmd_analyze_surface)

    c = sub.add_parser("curve-energy", help="tangent-point energies of a closed curve")
    c.add_argument("curve")
    c.add_argument("--p", help="comma-separated exponents in (1, 8]")
    c.add_argument("--tol", type=float)
    c.add_argument("-o", "--output")
    common(c)
    c.set_defaults(func=cmd_curve_energy)

    o = sub.add_parser("optimize", help="minimize the normalized tangent-point energy")
    o.add_argument("curve")
    o.add_argument("--p", type=float)
    o.add_argument("--max-iters", type=int)
    o.add_argument("--initial-step", type=float)
    o.add_argument("--shrink", type=float)
    o.add_argument("--armijo", type=float)
    o.add_argument("--threshold", type=float)
    o.add_argument("--resample-every", type=int)
    o.add_argument("--max-backtracks", type=int)
    o.add_argument("--seed", type=int)
    o.add_argument("--trace", help="trace CSV path")
    o.add_argument("-o", "--output", help="final curve JSON path")
    common(o)
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("suite", help="quick or full")
    v.add_argument("--only", help="comma-separated criterion numbers")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify" and args.suite not in ("quick", "full"):
        print(f"error: unknown suite {args.suite!r}; choose quick or full", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except Inadmissible as exc:
        print(f"error: {exc}", file=sys.stderr)
        for k, v in exc.defects.items():
            print(f"  {k}: {v}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (InputError, ParseError, ConfigError, ShapeError, TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
