"""Containers and generators for free-boundary surfaces and closed curves.

Points are stored as ``(n, 3)`` float64 arrays.  Containers are frozen
dataclasses; derived quantities (boundary loops, tangents) are computed once
at construction and the arrays are marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class TopologyError(ValueError):
    """Mesh violates a manifold or orientation invariant."""


class ShapeError(ValueError):
    """Invalid shape parameters."""


# ---------------------------------------------------------------------------
# vector helpers


def norm(v):
    return np.linalg.norm(v, axis=-1)


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def invert(x):
    """Sphere inversion x -> x/|x|^2 (rowwise for arrays)."""
    x = np.asarray(x, dtype=float)
    n2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(n2 == 0):
        raise ValueError("inversion undefined at the origin")
    return x / n2


def rotation_matrix(axis, angle):
    axis = normalize(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# triangle meshes


def _boundary_loops(faces):
    directed = {}
    for f, (a, b, c) in enumerate(faces):
        for e in ((a, b), (b, c), (c, a)):
            if e in directed:
                raise TopologyError(f"inconsistent orientation at edge {e} (face {f})")
            directed[e] = f
    undirected = {}
    for (a, b), f in directed.items():
        undirected.setdefault((min(a, b), max(a, b)), []).append(f)
    for e, fs in undirected.items():
        if len(fs) > 2:
            raise TopologyError(f"non-manifold edge {e} shared by {len(fs)} faces")

    # boundary half-edges: directed edges whose twin is absent
    nxt = {}
    for (a, b) in directed:
        if (b, a) not in directed:
            if a in nxt:
                raise TopologyError(f"boundary vertex {a} is non-manifold")
            nxt[a] = b
    loops = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        v = nxt[start]
        while v != start:
            if v in seen or v not in nxt:
                raise TopologyError("boundary edges do not form closed loops")
            loop.append(v)
            seen.add(v)
            v = nxt[v]
        loops.append(loop)
    return loops


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Oriented triangle mesh with boundary.

    ``boundary_loops`` lists vertex indices in the direction induced by the
    face orientation.
    """

    vertices: np.ndarray
    faces: np.ndarray
    boundary_loops: tuple = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (n, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError("faces must have shape (m, 3)")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinates")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        areas = 0.5 * norm(np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]))
        bad = np.flatnonzero(areas <= 1e-14 * max(1.0, float(np.max(areas, initial=0.0))))
        if bad.size:
            raise TopologyError(f"degenerate (zero-area) face {int(bad[0])}")
        loops = _boundary_loops([tuple(int(i) for i in row) for row in f])
        object.__setattr__(self, "vertices", _frozen(v))
        object.__setattr__(self, "faces", _frozen(f, np.int64))
        object.__setattr__(self, "boundary_loops", tuple(tuple(l) for l in loops))

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def corners(self):
        """Face corner coordinates, shape (m, 3, 3)."""
        return self.vertices[self.faces]

    def face_areas(self):
        p = self.corners
        return 0.5 * norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]))

    def face_normals(self):
        p = self.corners
        return normalize(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]))

    def area(self):
        return float(np.sum(self.face_areas()))

    def edges(self):
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def edge_lengths(self):
        e = self.edges()
        return norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]])

    def median_edge_length(self):
        return float(np.median(self.edge_lengths()))

    @property
    def boundary_vertices(self):
        if not self.boundary_loops:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(l, dtype=np.int64) for l in self.boundary_loops])

    def is_boundary_vertex(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = True
        return mask

    def boundary_length(self):
        total = 0.0
        for loop in self.boundary_loops:
            p = self.vertices[list(loop)]
            total += float(np.sum(norm(np.roll(p, -1, axis=0) - p)))
        return total

    def transformed(self, matrix=None, scale=1.0, shift=(0.0, 0.0, 0.0)):
        m = np.eye(3) if matrix is None else np.asarray(matrix, dtype=float)
        v = scale * (self.vertices @ m.T) + np.asarray(shift, dtype=float)
        return TriangleMesh(v, self.faces)


def mesh_union(*meshes):
    """Disjoint union; coincident geometry is allowed (multiplicity > 1)."""
    verts, faces, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        offset += m.n_vertices
    return TriangleMesh(np.concatenate(verts), np.concatenate(faces))


# ---------------------------------------------------------------------------
# closed polylines


@dataclass(frozen=True, eq=False)
class ClosedPolyline:
    """Closed polygon in R^3.  ``tangents`` are normalized sums of the two
    adjacent unit edge vectors."""

    vertices: np.ndarray
    closed: bool = True
    tangents: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (n, 3)")
        if not self.closed:
            raise ValueError("only closed polylines are supported")
        if len(v) < 3:
            raise ValueError("a closed polyline needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinates")
        e = np.roll(v, -1, axis=0) - v
        lengths = norm(e)
        if np.any(lengths <= 1e-14 * max(1.0, float(lengths.max()))):
            raise ShapeError("consecutive vertices coincide")
        u = e / lengths[:, None]
        t = u + np.roll(u, 1, axis=0)
        tn = norm(t)
        if np.any(tn < 1e-12):
            raise ShapeError("polyline folds back on itself")
        object.__setattr__(self, "vertices", _frozen(v))
        object.__setattr__(self, "tangents", _frozen(t / tn[:, None]))

    @property
    def n(self):
        return len(self.vertices)

    def edge_lengths(self):
        """Length of edge i -> i+1."""
        return norm(np.roll(self.vertices, -1, axis=0) - self.vertices)

    def dual_lengths(self):
        """Half the sum of the two edges incident to each vertex."""
        e = self.edge_lengths()
        return 0.5 * (e + np.roll(e, 1))

    def length(self):
        return float(np.sum(self.edge_lengths()))

    def transformed(self, matrix=None, scale=1.0, shift=(0.0, 0.0, 0.0)):
        m = np.eye(3) if matrix is None else np.asarray(matrix, dtype=float)
        return ClosedPolyline(scale * (self.vertices @ m.T) + np.asarray(shift, dtype=float))


# ---------------------------------------------------------------------------
# generators

SURFACE_KINDS = ("flat-disk", "spherical-cap", "perturbed-cap", "disk-pair", "elliptic-disk")
CURVE_KINDS = ("circle", "ellipse", "trefoil", "fourier-random", "perturbed-circle")
_MIN_RESOLUTION = {"flat-disk": 6, "disk-pair": 6, "elliptic-disk": 6, "spherical-cap": 6, "perturbed-cap": 6, "circle": 8,
                   "ellipse": 8, "trefoil": 8, "fourier-random": 8, "perturbed-circle": 8}


@dataclass(frozen=True)
class ShapeSpec:
    """Parameters for :func:`generate_shape`.

    ``resolution`` is the number of boundary vertices for surfaces and the
    number of vertices for curves.
    """

    kind: str
    resolution: int = 64
    r: float = 1.0
    radius: float = 1.0
    a: float = 2.0
    b: float = 1.0
    amplitude: float = 0.05
    mode: int = 3
    phase: float = 0.0
    seed: int = 0
    n_modes: int = 5

    def validate(self):
        if self.kind not in SURFACE_KINDS + CURVE_KINDS:
            raise ShapeError(f"unknown kind {self.kind!r}")
        if int(self.resolution) < _MIN_RESOLUTION[self.kind]:
            raise ShapeError(
                f"resolution must be >= {_MIN_RESOLUTION[self.kind]} for {self.kind}, got {self.resolution}")
        if self.kind in ("spherical-cap", "perturbed-cap") and not self.r > 0:
            raise ShapeError(f"cap radius r must be > 0, got {self.r}")
        if self.kind in ("circle", "perturbed-circle") and not self.radius > 0:
            raise ShapeError(f"radius must be > 0, got {self.radius}")
        if self.kind == "ellipse" and not (self.a > 0 and self.b > 0):
            raise ShapeError("ellipse semi-axes must be > 0")
        if self.kind == "elliptic-disk" and not (self.a > 0 and self.b > 0):
            raise ShapeError("elliptic disk semi-axes must be > 0")
        if self.kind in ("perturbed-cap", "perturbed-circle") and self.mode < 1:
            raise ShapeError("mode must be >= 1")
        if self.kind == "perturbed-circle" and not abs(self.amplitude) < 1:
            raise ShapeError("radial perturbation amplitude must be < 1")
        if self.kind == "fourier-random" and self.n_modes < 2:
            raise ShapeError("n_modes must be >= 2")
        return self


def generate_shape(spec: ShapeSpec):
    spec.validate()
    n = int(spec.resolution)
    if spec.kind == "flat-disk":
        return flat_disk(n)
    if spec.kind == "spherical-cap":
        return spherical_cap(spec.r, n)
    if spec.kind == "perturbed-cap":
        return perturbed_cap(spec.r, n, spec.amplitude, spec.mode, spec.phase)
    if spec.kind == "disk-pair":
        return disk_pair(n)
    if spec.kind == "elliptic-disk":
        return elliptic_disk(n, spec.a, spec.b)
    if spec.kind == "circle":
        return circle(n, spec.radius)
    if spec.kind == "ellipse":
        return ellipse(n, spec.a, spec.b)
    if spec.kind == "trefoil":
        return trefoil(n)
    if spec.kind == "perturbed-circle":
        return perturbed_circle(n, spec.amplitude, spec.mode, spec.radius)
    return fourier_random(n, spec.seed, spec.n_modes)


def _ring_counts(n_boundary):
    m = max(1, int(round(n_boundary / 6)))
    return [1] + [max(3, int(round(n_boundary * k / m))) for k in range(1, m + 1)]


def _ring_disk(n_boundary):
    """Polar ring triangulation of the unit parameter disk.

    Returns (s, theta, faces) with s in [0, 1] the normalized radius.  Each
    ring starts at angle 0, so every ring has a vertex on the positive
    s-axis.
    """
    counts = _ring_counts(n_boundary)
    m = len(counts) - 1
    s, th, start = [0.0], [0.0], [0]
    for k in range(1, m + 1):
        start.append(len(s))
        for j in range(counts[k]):
            s.append(k / m)
            th.append(2 * np.pi * j / counts[k])
    faces = []
    for j in range(counts[1]):
        faces.append((0, start[1] + j, start[1] + (j + 1) % counts[1]))
    for k in range(2, m + 1):
        na, nb = counts[k - 1], counts[k]
        ia = ib = 0
        # zipper between ring k-1 (inner) and ring k (outer), by angle
        while ia < na or ib < nb:
            ta = (ia + 1) / na if ia < na else np.inf
            tb = (ib + 1) / nb if ib < nb else np.inf
            a0, b0 = start[k - 1] + ia % na, start[k] + ib % nb
            if tb <= ta:
                faces.append((a0, b0, start[k] + (ib + 1) % nb))
                ib += 1
            else:
                faces.append((a0, b0, start[k - 1] + (ia + 1) % na))
                ia += 1
    return np.array(s), np.array(th), np.array(faces, dtype=np.int64)


def flat_disk(resolution=64, radius=1.0):
    s, th, faces = _ring_disk(resolution)
    v = np.stack([radius * s * np.cos(th), radius * s * np.sin(th), np.zeros_like(s)], axis=1)
    return TriangleMesh(v, faces)


def cap_geometry(r):
    """Center height, opening angle and closed-form area/boundary length of the
    free-boundary spherical cap of radius r."""
    d = np.sqrt(1 + r * r)
    cos_max = r / d
    return {
        "center": np.array([0.0, 0.0, d]),
        "phi_max": float(np.arccos(cos_max)),
        "area": 2 * np.pi * r * r * (1 - cos_max),
        "boundary_length": 2 * np.pi * r / d,
    }


def _cap_points(r, s, th):
    geo = cap_geometry(r)
    phi = geo["phi_max"] * s
    return geo["center"] + r * np.stack(
        [np.sin(phi) * np.cos(th), np.sin(phi) * np.sin(th), -np.cos(phi)], axis=1)


def spherical_cap(r=1.0, resolution=64):
    """Part of the sphere |x - c| = r, |c| = sqrt(1+r^2), inside the closed
    unit ball; apex at (0, 0, sqrt(1+r^2) - r)."""
    if not r > 0:
        raise ShapeError(f"cap radius r must be > 0, got {r}")
    s, th, faces = _ring_disk(resolution)
    v = _cap_points(r, s, th)
    on_bdry = s == 1.0
    v[on_bdry] /= norm(v[on_bdry])[:, None]
    return TriangleMesh(v, faces)


def perturbed_cap(r=1.0, resolution=64, amplitude=0.05, mode=3, phase=0.0):
    """Spherical cap with interior vertices pushed along the sphere normal by
    amplitude * w(s) * sin(mode * theta + phase).

    The profile w(s) = 64 s^3 (1 - s)^3 (max 1 at s = 1/2) keeps the
    displacement smooth at the apex and vanishes to third order at the
    boundary, so the boundary stays on the unit sphere and the collar
    faces stay close to orthogonal (about 1.8 degrees at resolution 96).
    """
    if not r > 0:
        raise ShapeError(f"cap radius r must be > 0, got {r}")
    s, th, faces = _ring_disk(resolution)
    v = _cap_points(r, s, th)
    geo = cap_geometry(r)
    nrm = (v - geo["center"]) / r
    w = 64 * s ** 3 * (1 - s) ** 3
    v = v + (amplitude * w * np.sin(mode * th + phase))[:, None] * nrm
    on_bdry = s == 1.0
    v[on_bdry] /= norm(v[on_bdry])[:, None]
    return TriangleMesh(v, faces)


def seeded_perturbed_cap(seed, resolution=96):
    """Perturbed cap with parameters drawn from ``seed``: r in {0.5, 1, 2},
    amplitude in [0.03, 0.08], mode in {2, 3, 4}, uniform phase."""
    rng = np.random.default_rng(seed)
    amplitude = rng.uniform(0.03, 0.08)
    mode = int(rng.integers(2, 5))
    phase = rng.uniform(0.0, 2 * np.pi)
    r = float(rng.choice([0.5, 1.0, 2.0]))
    return perturbed_cap(r, resolution, amplitude, mode, phase)


def elliptic_disk(resolution=64, a=2.0, b=1.0):
    """Planar region x^2/a^2 + y^2/b^2 <= 1; free boundary for the
    ellipsoid with semi-axes (a, b, c) for any c."""
    return flat_disk(resolution).transformed(np.diag([a, b, 1.0]))


def disk_pair(resolution=64, angle=0.0):
    """Two flat free-boundary unit disks sharing the x-axis, the second one
    rotated by ``angle`` about it (angle=0 gives a multiplicity-2 disk)."""
    d = flat_disk(resolution)
    return mesh_union(d, d.transformed(rotation_matrix([1, 0, 0], angle)))


def icosphere(subdivisions=3, radius=1.0):
    """Closed calibration sphere."""
    t = (1 + np.sqrt(5)) / 2
    v = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    f = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(p, float) / np.linalg.norm(p) for p in v]
    faces = f
    for _ in range(subdivisions):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                p = verts[i] + verts[j]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return TriangleMesh(radius * np.array(verts), np.array(faces))


def circle(n=256, radius=1.0, center=(0.0, 0.0, 0.0)):
    t = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(np.asarray(center) + radius * np.stack([np.cos(t), np.sin(t), 0 * t], axis=1))


def ellipse(n=256, a=2.0, b=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(np.stack([a * np.cos(t), b * np.sin(t), 0 * t], axis=1))


def perturbed_circle(n=128, amplitude=0.2, mode=4, radius=1.0):
    t = 2 * np.pi * np.arange(n) / n
    rho = radius * (1 + amplitude * np.sin(mode * t))
    return ClosedPolyline(np.stack([rho * np.cos(t), rho * np.sin(t), 0 * t], axis=1))


def trefoil(n=256):
    """(2,3) torus knot: (sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)."""
    t = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(np.stack(
        [np.sin(t) + 2 * np.sin(2 * t), np.cos(t) - 2 * np.cos(2 * t), -np.sin(3 * t)], axis=1))


def fourier_random(n=256, seed=0, n_modes=5, decay=2.0):
    """Truncated Fourier curve with coefficients ~ N(0, 1) / k^decay, built on
    a unit circle so that low seeds do not produce near-degenerate curves."""
    rng = np.random.default_rng(seed)
    t = 2 * np.pi * np.arange(n) / n
    pts = np.stack([np.cos(t), np.sin(t), 0 * t], axis=1)
    for k in range(2, n_modes + 1):
        a, b = rng.normal(size=3), rng.normal(size=3)
        pts = pts + (np.outer(np.cos(k * t), a) + np.outer(np.sin(k * t), b)) / k ** decay
    tilt = rng.normal(size=3) / 3
    pts = pts + np.outer(np.sin(t), tilt)
    return ClosedPolyline(pts)


def polyline_from_function(f, n):
    t = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(np.asarray(f(t)).T)


def random_rotation(seed: Optional[int] = None):
    q, r = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
