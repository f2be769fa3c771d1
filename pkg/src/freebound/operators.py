"""Discrete mean curvature, vertex measures, boundary conormal and the
first-variation residual on triangle meshes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import TriangleMesh, normalize, norm


@dataclass(frozen=True, eq=False)
class VertexField:
    """Per-vertex mean curvature vectors together with the vertex areas.

    ``H`` is the pointwise estimate used in curvature integrals.
    ``variational`` is the generalized mean curvature of the mesh read off
    its first variation: the raw cotan vector at interior vertices and, at
    boundary vertices, whatever remains of the area gradient after the
    conormal term is removed.  With it the first-variation identity holds
    exactly for affine fields.
    """

    H: np.ndarray
    area: np.ndarray
    normals: np.ndarray
    raw: np.ndarray
    tangential_defect: float
    variational: np.ndarray = None

    def __len__(self):
        return len(self.area)


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Conormal and length weight at each boundary vertex."""

    index: np.ndarray
    eta: np.ndarray
    weight: np.ndarray

    @property
    def length(self):
        return float(np.sum(self.weight))


def vertex_areas(mesh: TriangleMesh):
    """Barycentric areas: one third of each incident triangle."""
    a = np.zeros(mesh.n_vertices)
    fa = mesh.face_areas() / 3
    for k in range(3):
        np.add.at(a, mesh.faces[:, k], fa)
    return a


def vertex_normals(mesh: TriangleMesh):
    p = mesh.corners
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    out = np.zeros((mesh.n_vertices, 3))
    for k in range(3):
        np.add.at(out, mesh.faces[:, k], n)
    return normalize(out)


def cotan_laplacian(mesh: TriangleMesh):
    """sum_j (cot a_ij + cot b_ij)/2 (x_j - x_i), i.e. minus the area gradient."""
    p = mesh.corners
    f = mesh.faces
    out = np.zeros((mesh.n_vertices, 3))
    for k in range(3):
        i, j, l = k, (k + 1) % 3, (k + 2) % 3
        # angle at corner l is opposite edge (i, j)
        u, v = p[:, i] - p[:, l], p[:, j] - p[:, l]
        cot = np.sum(u * v, axis=1) / norm(np.cross(u, v))
        w = 0.5 * cot[:, None] * (p[:, j] - p[:, i])
        np.add.at(out, f[:, i], w)
        np.add.at(out, f[:, j], -w)
    return out


def _neighbors(mesh):
    nb = [set() for _ in range(mesh.n_vertices)]
    for a, b, c in mesh.faces:
        nb[a].update((b, c))
        nb[b].update((a, c))
        nb[c].update((a, b))
    return nb


def mean_curvature(mesh: TriangleMesh, project=True) -> VertexField:
    """Mean curvature vector H_i = (cotan Laplacian of x)_i / A_i.

    With this sign H points toward the concave side (H = -2x on the unit
    sphere), matching  int div X = -int H.X  for tangentially supported X.
    Boundary vertices get the average of their interior neighbours' values.
    With ``project`` each H_i is projected onto the vertex normal.
    """
    areas = vertex_areas(mesh)
    raw = cotan_laplacian(mesh) / areas[:, None]
    normals = vertex_normals(mesh)
    H = raw.copy()
    if project:
        H = np.sum(H * normals, axis=1)[:, None] * normals
    interior = ~mesh.is_boundary_vertex()
    tang = raw - np.sum(raw * normals, axis=1)[:, None] * normals
    w = areas * interior
    defect = float(np.sqrt(np.sum(w * norm(tang) ** 2) / max(np.sum(w * norm(raw) ** 2), 1e-300)))
    variational = raw.copy()
    if mesh.boundary_loops:
        B = conormal(mesh)
        lap = raw * areas[:, None]
        variational[B.index] = (lap[B.index] + B.weight[:, None] * B.eta) / areas[B.index, None]
        nb = _neighbors(mesh)
        for b in mesh.boundary_vertices:
            inner = [j for j in nb[b] if interior[j]]
            if not inner:
                # second ring fallback (coarse meshes)
                inner = [k for j in nb[b] for k in nb[j] if interior[k]]
            H[b] = H[inner].mean(axis=0) if inner else 0.0
            if project:
                H[b] = np.dot(H[b], normals[b]) * normals[b]
    return VertexField(H=H, area=areas, normals=normals, raw=raw, tangential_defect=defect,
                       variational=variational)


def conormal(mesh: TriangleMesh) -> BoundaryField:
    """Outward unit conormal at boundary vertices.

    Each boundary edge contributes the in-face unit normal pointing away from
    its triangle, weighted by the edge length; the weight of a vertex is half
    the length of its two boundary edges.
    """
    if not mesh.boundary_loops:
        raise ValueError("mesh has no boundary")
    v = mesh.vertices
    third = {}
    for f in mesh.faces:
        for k in range(3):
            third[(int(f[k]), int(f[(k + 1) % 3]))] = int(f[(k + 2) % 3])
    idx, eta, wts = [], [], []
    for loop in mesh.boundary_loops:
        loop = list(loop)
        m = len(loop)
        acc = np.zeros((m, 3))
        wt = np.zeros(m)
        for k in range(m):
            a, b = loop[k], loop[(k + 1) % m]
            # loops follow the face orientation, so (a, b) is a half-edge
            c = third[(a, b)]
            e = v[b] - v[a]
            el = np.linalg.norm(e)
            t = e / el
            w = v[c] - v[a]
            out = -(w - np.dot(w, t) * t)
            out /= np.linalg.norm(out)
            acc[k] += el * out
            acc[(k + 1) % m] += el * out
            wt[k] += el / 2
            wt[(k + 1) % m] += el / 2
        idx.extend(loop)
        eta.append(normalize(acc))
        wts.append(wt)
    return BoundaryField(np.array(idx, dtype=np.int64), np.concatenate(eta), np.concatenate(wts))


# quadrature on the reference triangle: edge midpoints, exact for quadratics
_MID = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])


def face_projectors(mesh: TriangleMesh):
    n = mesh.face_normals()
    return np.eye(3)[None] - n[:, :, None] * n[:, None, :]


def first_variation_terms(mesh, H: VertexField, B: BoundaryField, field, jacobian):
    """Return (int div_S X, int H.X, int X.eta dsigma).

    ``int H.X`` uses the variational mean curvature when it is available.

    ``field(x)`` maps (k, 3) points to (k, 3) vectors and ``jacobian(x)`` to
    (k, 3, 3) with J[.., i, j] = dX_i/dx_j.  The tangential divergence is
    tr(P J) on each face, integrated with the edge-midpoint rule.
    """
    p = mesh.corners
    area = mesh.face_areas()
    P = face_projectors(mesh)
    div = 0.0
    for w in _MID:
        q = np.einsum("k,fkd->fd", w, p)
        J = jacobian(q)
        div += np.sum(area * np.einsum("fij,fji->f", P, J)) / 3
    Hv = H.H if H.variational is None else H.variational
    hx = float(np.sum(H.area * np.sum(Hv * field(mesh.vertices), axis=1)))
    bx = float(np.sum(B.weight * np.sum(field(mesh.vertices[B.index]) * B.eta, axis=1)))
    return float(div), hx, bx


def first_variation_residual(mesh, H: VertexField, B: BoundaryField, field, jacobian):
    div, hx, bx = first_variation_terms(mesh, H, B, field, jacobian)
    return abs(div + hx - bx)


# common test fields ---------------------------------------------------------


def constant_field(c):
    c = np.asarray(c, dtype=float)
    return (lambda x: np.broadcast_to(c, np.shape(x)).copy(),
            lambda x: np.zeros((len(x), 3, 3)))


def linear_field(A, c=(0.0, 0.0, 0.0)):
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    return (lambda x: np.asarray(x) @ A.T + c,
            lambda x: np.broadcast_to(A, (len(x), 3, 3)).copy())


def position_field():
    return linear_field(np.eye(3))


def quadratic_field(a=(0.3, -0.2, 0.5)):
    """X(x) = |x|^2 a + (a.x) x, a generic degree-2 field."""
    a = np.asarray(a, dtype=float)

    def X(x):
        x = np.asarray(x)
        return np.sum(x * x, axis=1)[:, None] * a + (x @ a)[:, None] * x

    def J(x):
        x = np.asarray(x)
        return (2 * a[None, :, None] * x[:, None, :] + (x @ a)[:, None, None] * np.eye(3)
                + x[:, :, None] * a[None, None, :])

    return X, J
