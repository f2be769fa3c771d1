"""File formats: OFF/OBJ meshes, curve and point-cloud JSON, profile and
trace CSV, and the JSON report envelope."""

from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone

import numpy as np

from .geometry import ClosedPolyline, TriangleMesh

TOOL_VERSION = "0.1.0"
PROFILE_HEADER = ["r", "g", "g_hat", "sum", "lhs_residual", "rhs_diff"]
TRACE_HEADER = ["iter", "objective", "grad_norm", "length"]


class ParseError(ValueError):
    """Malformed input file."""


def _tokens(path):
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                yield line


def _fan(poly):
    return [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]


def _read_off(path):
    lines = list(_tokens(path))
    if not lines or not lines[0].startswith("OFF"):
        raise ParseError(f"{path}: missing OFF header")
    head = lines[0][3:].split()
    body = lines[1:]
    if not head:
        if not body:
            raise ParseError(f"{path}: missing OFF counts")
        head, body = body[0].split(), body[1:]
    try:
        nv, nf = int(head[0]), int(head[1])
    except (IndexError, ValueError):
        raise ParseError(f"{path}: bad OFF counts line") from None
    if nv < 0 or nf < 0 or len(body) < nv + nf:
        raise ParseError(f"{path}: expected {nv} vertices and {nf} faces, file is too short")
    try:
        verts = np.array([[float(t) for t in body[i].split()[:3]] for i in range(nv)])
    except ValueError:
        raise ParseError(f"{path}: non-numeric vertex coordinate") from None
    if verts.shape != (nv, 3):
        raise ParseError(f"{path}: every vertex needs three coordinates")
    faces = []
    for k in range(nf):
        try:
            parts = [int(t) for t in body[nv + k].split()]
        except ValueError:
            raise ParseError(f"{path}: non-integer face index in face {k}") from None
        if not parts or len(parts) < parts[0] + 1 or parts[0] < 3:
            raise ParseError(f"{path}: malformed face {k}")
        faces += _fan(parts[1:parts[0] + 1])
    return verts, faces


def _read_obj(path):
    verts, faces = [], []
    for line in _tokens(path):
        parts = line.split()
        if parts[0] == "v":
            try:
                verts.append([float(t) for t in parts[1:4]])
            except ValueError:
                raise ParseError(f"{path}: bad vertex line {line!r}") from None
            if len(verts[-1]) != 3:
                raise ParseError(f"{path}: vertex needs three coordinates: {line!r}")
        elif parts[0] == "f":
            try:
                idx = [int(t.split("/")[0]) for t in parts[1:]]
            except ValueError:
                raise ParseError(f"{path}: bad face line {line!r}") from None
            if len(idx) < 3:
                raise ParseError(f"{path}: face with fewer than 3 vertices: {line!r}")
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            faces += _fan(idx)
    return np.array(verts, dtype=float).reshape(-1, 3), faces


def load_mesh(path, fmt=None) -> TriangleMesh:
    """Read an ASCII OFF or OBJ triangle mesh (polygons are fan-split)."""
    fmt = (fmt or os.path.splitext(str(path))[1].lstrip(".")).lower()
    if fmt == "off":
        verts, faces = _read_off(path)
    elif fmt == "obj":
        verts, faces = _read_obj(path)
    else:
        raise ParseError(f"unknown mesh format {fmt!r} (expected OFF or OBJ)")
    if not faces:
        raise ParseError(f"{path}: mesh has no faces")
    faces = np.array(faces, dtype=np.int64)
    if faces.min() < 0 or faces.max() >= len(verts):
        raise ParseError(f"{path}: face index out of range")
    return TriangleMesh(verts, faces)


def save_off(mesh: TriangleMesh, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"OFF\n{mesh.n_vertices} {mesh.n_faces} 0\n")
        for v in mesh.vertices:
            fh.write(" ".join(repr(float(c)) for c in v) + "\n")
        for f in mesh.faces:
            fh.write("3 " + " ".join(str(int(i)) for i in f) + "\n")


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None


def _point_array(obj, key, path):
    try:
        arr = np.array(obj[key], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise ParseError(f"{path}: field {key!r} must be a list of [x, y, z] points") from None
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ParseError(f"{path}: field {key!r} must have shape (n, 3)")
    return arr


def load_curve(path) -> ClosedPolyline:
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if obj.get("closed", True) is not True:
        raise ParseError(f"{path}: only closed curves are supported")
    return ClosedPolyline(_point_array(obj, "points", path))


def save_curve(curve: ClosedPolyline, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"closed": True, "points": np.asarray(curve.vertices).tolist()}, fh)


def load_support_points(path):
    """(points, normals) from {"points": [...], "normals": [...]}."""
    obj = _load_json(path)
    pts = _point_array(obj, "points", path)
    nrm = _point_array(obj, "normals", path)
    if nrm.shape != pts.shape:
        raise ParseError(f"{path}: points and normals differ in length")
    return pts, nrm


def profile_rows(profile):
    """CSV rows; lhs_residual is annulus_lhs - delta_rhs, rhs_diff is delta_rhs."""
    return [(r, g, gh, g + gh, lhs - rhs, rhs) for r, g, gh, lhs, rhs in
            zip(profile.radii, profile.g, profile.g_hat, profile.annulus_lhs, profile.delta_rhs)]


def _fmt(x):
    return repr(float(x))


def save_profile_csv(profile, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_HEADER)
        for row in profile_rows(profile):
            w.writerow([_fmt(v) for v in row])


def save_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for i, f, g, L in trace.rows():
            w.writerow([i, _fmt(f), _fmt(g), _fmt(L)])


def to_jsonable(obj):
    """Recursively convert numpy containers and scalars; non-finite floats
    become strings so the output stays valid JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def verdict(name, passed, measured, expected, tolerance, **extra):
    out = {"name": name, "pass": bool(passed), "measured": measured, "expected": expected, "tolerance": tolerance}
    out.update(extra)
    return out


def make_report(input_desc, results, verdicts, timestamp=None):
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return to_jsonable({"tool_version": TOOL_VERSION, "timestamp": timestamp, "input": input_desc,
                        "results": results, "verdicts": verdicts})


def save_report(report, path):
    """Write a report dict as JSON, or a radial profile as CSV."""
    if hasattr(report, "radii") and hasattr(report, "g_hat"):
        save_profile_csv(report, path)
        return
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
