"""Area and integrals of a triangle mesh restricted to a ball.

Two independent routes are provided for the area: an exact planar formula
(triangle clipped by the disk the ball cuts out of the triangle's plane) and
recursive 4-way subdivision with a fragment-area tolerance.  Integrals of
smooth integrands use subdivision near the sphere with the exact area on the
leaf fragments.
"""

from __future__ import annotations

import numpy as np

from .geometry import norm


def _cross_dot(p, q, n):
    return np.sum(np.cross(p, q) * n, axis=-1)


def _segment_pieces(a, b, rho2, n):
    """Signed area of (disk centered at 0) intersect (triangle 0, a, b).

    a, b: (k, 3) points relative to the projected center, lying in the plane
    with unit normal n; rho2: squared disk radius.
    """
    d = b - a
    A = np.sum(d * d, axis=1)
    B = np.sum(a * d, axis=1)
    C = np.sum(a * a, axis=1) - rho2
    disc = B * B - A * C
    has = disc > 0
    sq = np.sqrt(np.where(has, disc, 0.0))
    t1 = np.where(has, (-B - sq) / A, 0.0)
    t2 = np.where(has, (-B + sq) / A, 0.0)
    s1 = np.clip(t1, 0.0, 1.0)
    s2 = np.clip(t2, 0.0, 1.0)
    s2 = np.maximum(s1, s2)
    s1 = np.where(has, s1, 1.0)
    s2 = np.where(has, s2, 1.0)
    p1 = a + s1[:, None] * d
    p2 = a + s2[:, None] * d

    def sector(p, q):
        return 0.5 * rho2 * np.arctan2(_cross_dot(p, q, n), np.sum(p * q, axis=1))

    return sector(a, p1) + 0.5 * _cross_dot(p1, p2, n) + sector(p2, b)


def triangle_ball_area(tri, center, radius):
    """Exact area of each triangle intersected with the open ball.

    tri: (k, 3, 3) corner coordinates.
    """
    tri = np.asarray(tri, dtype=float)
    if len(tri) == 0:
        return np.zeros(0)
    e1, e2 = tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]
    nv = np.cross(e1, e2)
    n = nv / norm(nv)[:, None]
    h = np.sum((np.asarray(center) - tri[:, 0]) * n, axis=1)
    rho2 = radius * radius - h * h
    out = np.zeros(len(tri))
    ok = rho2 > 0
    if not np.any(ok):
        return out
    c = np.asarray(center) - h[:, None] * n
    rel = tri[ok] - c[ok][:, None, :]
    nn, r2 = n[ok], rho2[ok]
    tot = (_segment_pieces(rel[:, 0], rel[:, 1], r2, nn) + _segment_pieces(rel[:, 1], rel[:, 2], r2, nn)
           + _segment_pieces(rel[:, 2], rel[:, 0], r2, nn))
    full = 0.5 * norm(nv[ok])
    out[ok] = np.clip(tot, 0.0, full)
    return out


def _split4(tri):
    m01 = 0.5 * (tri[:, 0] + tri[:, 1])
    m12 = 0.5 * (tri[:, 1] + tri[:, 2])
    m20 = 0.5 * (tri[:, 2] + tri[:, 0])
    kids = np.stack([
        np.stack([tri[:, 0], m01, m20], 1),
        np.stack([m01, tri[:, 1], m12], 1),
        np.stack([m20, m12, tri[:, 2]], 1),
        np.stack([m01, m12, m20], 1),
    ], 1)
    return kids.reshape(-1, 3, 3)


def point_triangle_distance(tri, point):
    """Euclidean distance from ``point`` to each (closed) triangle."""
    p = np.asarray(point, dtype=float)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    n = np.cross(b - a, c - a)
    n = n / norm(n)[:, None]
    h = np.sum((p - a) * n, axis=1)
    q = p - h[:, None] * n
    inside = np.ones(len(tri), bool)
    for u, v in ((a, b), (b, c), (c, a)):
        inside &= _cross_dot(v - u, q - u, n) >= 0
    best = np.abs(h)

    def seg(u, v):
        d = v - u
        t = np.clip(np.sum((p - u) * d, axis=1) / np.sum(d * d, axis=1), 0.0, 1.0)
        return norm(p - (u + t[:, None] * d))

    edge = np.minimum(np.minimum(seg(a, b), seg(b, c)), seg(c, a))
    return np.where(inside, best, edge)


def _classify(tri, center, radius):
    d = norm(tri - np.asarray(center)[None, None, :])
    inside = d.max(axis=1) < radius
    outside = point_triangle_distance(tri, center) >= radius
    return inside, outside


def subdivision_ball_area(tri, center, radius, tol):
    """Area of triangles intersected with the ball by recursive 4-way
    subdivision.  Fragments still straddling the sphere once their area is
    below ``tol`` count half their area."""
    center = np.asarray(center, dtype=float)
    tri = np.asarray(tri, dtype=float)
    total = 0.0
    while len(tri):
        inside, outside = _classify(tri, center, radius)
        area = 0.5 * norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]))
        total += float(np.sum(area[inside]))
        cross = ~(inside | outside)
        small = cross & (area <= tol)
        total += 0.5 * float(np.sum(area[small]))
        tri = _split4(tri[cross & ~small])
    return total


class BallIntegrator:
    """Integrate per-point integrands over mesh intersect ball.

    Integrands are callables ``f(points, bary, face_index)`` returning one
    value per point; ``bary`` holds barycentric coordinates in the parent
    face so vertex data (e.g. H) can be interpolated linearly.  Faces fully
    inside use the edge-midpoint rule; faces straddling the sphere are
    subdivided ``depth`` times and the leaf fragments use their exact
    inside area with the integrand at the fragment centroid.
    """

    def __init__(self, mesh, depth=3):
        self.mesh = mesh
        self.depth = depth
        self.corners = mesh.corners
        self.areas = mesh.face_areas()
        self.centroids = self.corners.mean(axis=1)
        self.reach = norm(self.corners - self.centroids[:, None, :]).max(axis=1)
        self._mid = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])

    def integrate(self, center, radius, integrands, area_only=False):
        """Return (ball area, [integral of each integrand])."""
        center = np.asarray(center, dtype=float)
        dc = norm(self.centroids - center)
        cand = np.flatnonzero(dc - self.reach < radius)
        if len(cand) == 0:
            return 0.0, [0.0] * len(integrands)
        tri = self.corners[cand]
        dv = norm(tri - center).max(axis=1)
        full = cand[dv < radius]
        part = cand[dv >= radius]
        area = float(np.sum(self.areas[full]))
        vals = [0.0] * len(integrands)
        if len(full) and integrands:
            for w in self._mid:
                pts = np.einsum("k,fkd->fd", w, self.corners[full])
                bary = np.broadcast_to(w, (len(full), 3))
                for k, f in enumerate(integrands):
                    vals[k] += float(np.sum(self.areas[full] * f(pts, bary, full))) / 3
        if len(part):
            exact = triangle_ball_area(self.corners[part], center, radius)
            area += float(np.sum(exact))
            if integrands and not area_only:
                keep = exact > 0
                self._partial(center, radius, part[keep], integrands, vals)
        return area, vals

    def _partial(self, center, radius, faces, integrands, vals):
        if len(faces) == 0:
            return
        tri = self.corners[faces]
        bary = np.broadcast_to(np.eye(3), (len(faces), 3, 3)).copy()
        owner = faces
        for level in range(self.depth + 1):
            if level < self.depth:
                inside, outside = _classify(tri, center, radius)
            else:
                inside = np.zeros(len(tri), bool)
                outside = np.zeros(len(tri), bool)
            farea = 0.5 * norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]))
            if np.any(inside):
                ti, bi, oi, ai = tri[inside], bary[inside], owner[inside], farea[inside]
                for w in self._mid:
                    pts = np.einsum("k,fkd->fd", w, ti)
                    b = np.einsum("k,fkd->fd", w, bi)
                    for k, f in enumerate(integrands):
                        vals[k] += float(np.sum(ai * f(pts, b, oi))) / 3
            cross = ~(inside | outside)
            if level == self.depth:
                tc, bc, oc = tri[cross], bary[cross], owner[cross]
                a = triangle_ball_area(tc, center, radius)
                pts = tc.mean(axis=1)
                b = bc.mean(axis=1)
                for k, f in enumerate(integrands):
                    vals[k] += float(np.sum(a * f(pts, b, oc)))
                return
            tri = _split4(tri[cross])
            bary = _split4(bary[cross])
            owner = np.repeat(owner[cross], 4)


def ball_mass(mesh, center, radius, method="exact", tol=None):
    """Area of mesh intersect open ball B_radius(center)."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    center = np.asarray(center, dtype=float)
    if method == "exact":
        return BallIntegrator(mesh).integrate(center, radius, [], area_only=True)[0]
    if method == "subdivide":
        if tol is None:
            tol = 1e-9 * mesh.area()
        tri = mesh.corners
        cen = tri.mean(axis=1)
        reach = norm(tri - cen[:, None, :]).max(axis=1)
        keep = norm(cen - center) - reach < radius
        return subdivision_ball_area(tri[keep], center, radius, tol)
    raise ValueError(f"unknown method {method!r}")
