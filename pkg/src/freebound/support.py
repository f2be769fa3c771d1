"""General support surfaces: ball curvatures, the boundary-curvature identity
and the support-surface Willmore inequality.

A support surface is a set of sample points with outward unit normals,
optionally backed by an analytic level-set descriptor F = 0 whose gradient
points outward.  Descriptors give exact normals and normal curvatures
v^T D^2F v / |DF|, which is also the diagonal limit of the kernel Z.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .geometry import TriangleMesh, norm, normalize
from .monotonicity import SurfaceData, defect_integral, plain_density

PI = np.pi


# descriptors -----------------------------------------------------------------


class LevelSet:
    """Base class; subclasses implement value, gradient and hessian."""

    closed = False
    convex = False

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def normal(self, x):
        return normalize(self.gradient(np.atleast_2d(x)))

    def residual(self, x):
        """Level-set defect |F| / |DF| (first-order distance to S)."""
        x = np.atleast_2d(x)
        return np.abs(self.value(x)) / norm(self.gradient(x))

    def project(self, x, iters=50, tol=1e-14):
        x = np.array(np.atleast_2d(x), dtype=float)
        for _ in range(iters):
            g = self.gradient(x)
            step = (self.value(x) / np.sum(g * g, axis=1))[:, None] * g
            x -= step
            if np.max(norm(step)) < tol:
                break
        return x

    def normal_curvature(self, x, v):
        """v^T D^2F v / |DF| for unit tangent vectors v (one per point)."""
        x = np.atleast_2d(x)
        v = normalize(np.atleast_2d(v))
        Hs = self.hessian(x)
        return np.einsum("ki,kij,kj->k", v, Hs, v) / norm(self.gradient(x))

    def principal_curvatures(self, x):
        """(k_min, k_max) of the shape operator at each point."""
        x = np.atleast_2d(x)
        n = self.normal(x)
        e1, e2 = tangent_basis(n)
        Hs = self.hessian(x) / norm(self.gradient(x))[:, None, None]
        a = np.einsum("ki,kij,kj->k", e1, Hs, e1)
        b = np.einsum("ki,kij,kj->k", e1, Hs, e2)
        c = np.einsum("ki,kij,kj->k", e2, Hs, e2)
        mid, rad = 0.5 * (a + c), np.sqrt(0.25 * (a - c) ** 2 + b * b)
        return mid - rad, mid + rad

    def curvature_bound(self):
        """Sup of the second fundamental form, if known in closed form."""
        return None

    def sample(self, n):
        raise NotImplementedError


def tangent_basis(n):
    n = np.atleast_2d(n)
    helper = np.where(np.abs(n[:, [0]]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    e1 = normalize(np.cross(n, helper))
    return e1, np.cross(n, e1)


def fibonacci_sphere(n, pole=0):
    """n nearly uniform unit vectors; ``pole`` is the axis of the spiral."""
    k = np.arange(n) + 0.5
    h = 1 - 2 * k / n
    rho = np.sqrt(np.clip(1 - h * h, 0.0, None))
    phi = k * PI * (3 - np.sqrt(5))
    pts = np.stack([h, rho * np.cos(phi), rho * np.sin(phi)], axis=1)
    return np.roll(pts, pole, axis=1)


@dataclass(frozen=True)
class Sphere(LevelSet):
    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    closed = True
    convex = True

    def value(self, x):
        d = np.atleast_2d(x) - np.asarray(self.center)
        return np.sum(d * d, axis=1) - self.radius ** 2

    def gradient(self, x):
        return 2 * (np.atleast_2d(x) - np.asarray(self.center))

    def hessian(self, x):
        return np.broadcast_to(2 * np.eye(3), (len(np.atleast_2d(x)), 3, 3))

    def normal(self, x):
        return (np.atleast_2d(x) - np.asarray(self.center)) / self.radius

    def curvature_bound(self):
        return 1.0 / self.radius

    def sample(self, n):
        return np.asarray(self.center) + self.radius * fibonacci_sphere(n)


@dataclass(frozen=True)
class Ellipsoid(LevelSet):
    a: float = 2.0
    b: float = 1.0
    c: float = 1.0
    closed = True
    convex = True

    @property
    def axes(self):
        return np.array([self.a, self.b, self.c], dtype=float)

    def value(self, x):
        return np.sum((np.atleast_2d(x) / self.axes) ** 2, axis=1) - 1

    def gradient(self, x):
        return 2 * np.atleast_2d(x) / self.axes ** 2

    def hessian(self, x):
        return np.broadcast_to(np.diag(2 / self.axes ** 2), (len(np.atleast_2d(x)), 3, 3))

    def curvature_bound(self):
        ax = self.axes
        return float(max(ax[i] / ax[j] ** 2 for i in range(3) for j in range(3) if i != j))

    def sample(self, n):
        # spiral around the x axis so the two most curved tips are well covered
        return self.project(fibonacci_sphere(n, pole=0) * self.axes)


@dataclass(frozen=True)
class Plane(LevelSet):
    point: tuple = (0.0, 0.0, 0.0)
    normal_vector: tuple = (0.0, 0.0, 1.0)

    def _n(self):
        n = np.asarray(self.normal_vector, dtype=float)
        return n / np.linalg.norm(n)

    def value(self, x):
        return (np.atleast_2d(x) - np.asarray(self.point)) @ self._n()

    def gradient(self, x):
        return np.broadcast_to(self._n(), np.atleast_2d(x).shape).copy()

    def hessian(self, x):
        return np.zeros((len(np.atleast_2d(x)), 3, 3))

    def curvature_bound(self):
        return 0.0

    def sample(self, n, extent=1.0):
        m = max(2, int(np.ceil(np.sqrt(n))))
        u, v = np.meshgrid(np.linspace(-extent, extent, m), np.linspace(-extent, extent, m))
        e1, e2 = tangent_basis(self._n()[None])
        pts = np.asarray(self.point) + u.reshape(-1, 1) * e1 + v.reshape(-1, 1) * e2
        return pts[:n]


class Graph(LevelSet):
    """z = f(x, y) with F = z - f, so the normal points to increasing z.

    ``grad`` returns (fx, fy) and ``hess`` returns (fxx, fxy, fyy), each as
    arrays over the points.
    """

    def __init__(self, f, grad, hess):
        self.f, self.grad, self.hess = f, grad, hess

    def value(self, x):
        x = np.atleast_2d(x)
        return x[:, 2] - self.f(x[:, 0], x[:, 1])

    def gradient(self, x):
        x = np.atleast_2d(x)
        fx, fy = self.grad(x[:, 0], x[:, 1])
        return np.stack([-np.broadcast_to(fx, len(x)), -np.broadcast_to(fy, len(x)), np.ones(len(x))], axis=1)

    def hessian(self, x):
        x = np.atleast_2d(x)
        fxx, fxy, fyy = (np.broadcast_to(t, len(x)) for t in self.hess(x[:, 0], x[:, 1]))
        out = np.zeros((len(x), 3, 3))
        out[:, 0, 0], out[:, 0, 1], out[:, 1, 0], out[:, 1, 1] = -fxx, -fxy, -fxy, -fyy
        return out

    def project(self, x, iters=50, tol=1e-14):
        x = np.array(np.atleast_2d(x), dtype=float)
        x[:, 2] = self.f(x[:, 0], x[:, 1])
        return x

    def sample(self, n, extent=1.0):
        m = max(2, int(np.ceil(np.sqrt(n))))
        u, v = np.meshgrid(np.linspace(-extent, extent, m), np.linspace(-extent, extent, m))
        pts = np.stack([u.ravel(), v.ravel(), np.zeros(m * m)], axis=1)[:n]
        return self.project(pts)


def descriptor_from_config(kind, **params):
    """Build a descriptor from a kind name and float parameters."""
    kind = kind.lower()
    if kind == "sphere":
        center = tuple(float(params.get(k, 0.0)) for k in ("cx", "cy", "cz"))
        return Sphere(float(params.get("radius", 1.0)), center)
    if kind == "ellipsoid":
        return Ellipsoid(float(params.get("a", 2.0)), float(params.get("b", 1.0)), float(params.get("c", 1.0)))
    if kind == "plane":
        return Plane()
    raise ValueError(f"unknown support descriptor {kind!r}")


# support surface -------------------------------------------------------------


class SupportSurface:
    """Sample points on S with outward unit normals.

    With a descriptor, the samples are checked against the level-set
    equation (``level_tol``; pass None to skip for imported data).
    """

    def __init__(self, points, normals=None, descriptor: LevelSet | None = None, level_tol=1e-10):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("support points must have shape (n, 3)")
        if normals is None:
            if descriptor is None:
                raise ValueError("a point-cloud support surface needs normals")
            normals = descriptor.normal(pts)
        nrm = np.array(normals, dtype=float)
        if nrm.shape != pts.shape:
            raise ValueError("normals must match points")
        lens = norm(nrm)
        if np.any(lens < 1e-12):
            raise ValueError("zero normal vector in support surface")
        if descriptor is not None and level_tol is not None and len(pts):
            res = float(np.max(descriptor.residual(pts)))
            if res > level_tol:
                raise ValueError(f"samples are off the level set by {res:.3e} (> {level_tol:g})")
        self.points = pts
        self.normals = nrm / lens[:, None]
        self.descriptor = descriptor
        self._tree = None

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_descriptor(cls, descriptor: LevelSet, n):
        pts = descriptor.project(descriptor.sample(n))
        return cls(pts, descriptor.normal(pts), descriptor)

    def spacing(self):
        """Median nearest-neighbour distance of the samples."""
        d, _ = self.tree().query(self.points, k=2)
        return float(np.median(d[:, 1]))

    def tree(self):
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def normal_at(self, x):
        """Normal at arbitrary points: exact with a descriptor, else nearest sample."""
        x = np.atleast_2d(x)
        if self.descriptor is not None:
            return self.descriptor.normal(x)
        _, idx = self.tree().query(x)
        return self.normals[idx]

    def transformed(self, scale=1.0, shift=(0.0, 0.0, 0.0)):
        """Scaled and translated copy (point-cloud form, descriptor dropped)."""
        return SupportSurface(self.points * scale + np.asarray(shift), self.normals)


# ball curvature ---------------------------------------------------------------


def z_kernel(x, gx, y):
    """Z(x, y) = 2 (x - y).gamma(x) / |x - y|^2, vectorized over rows."""
    x, gx, y = (np.asarray(a, dtype=float) for a in (x, gx, y))
    d = x - y
    d2 = np.sum(d * d, axis=-1)
    if np.any(d2 == 0):
        raise ValueError("Z(x, y) is undefined for coincident points")
    return 2 * np.sum(d * gx, axis=-1) / d2


@dataclass(frozen=True, eq=False)
class BallCurvatureReport:
    at: np.ndarray
    kappa_bar: np.ndarray
    kappa_under: np.ndarray
    kappa: np.ndarray
    sup_kappa_bar: float
    argmax_pair: tuple
    inf_kappa_under: float
    argmin_pair: tuple
    polished_sup: float
    exclusion: float

    def to_dict(self):
        return {"n": int(len(self.at)), "sup_kappa_bar": self.sup_kappa_bar,
                "argmax_pair": list(self.argmax_pair), "inf_kappa_under": self.inf_kappa_under,
                "argmin_pair": list(self.argmin_pair), "polished_sup": self.polished_sup,
                "max_kappa": float(np.max(self.kappa)), "exclusion": self.exclusion}


def _z_rows(X, G, Y, ids_x, ids_y, exclusion):
    d2 = np.zeros((len(X), len(Y)))
    num = np.zeros((len(X), len(Y)))
    for k in range(3):
        dk = X[:, k, None] - Y[None, :, k]
        d2 += dk * dk
        num += dk * G[:, k, None]
    num *= 2
    bad = (ids_x[:, None] == ids_y[None, :]) | (d2 == 0)
    if exclusion:
        bad |= d2 < exclusion * exclusion
    with np.errstate(divide="ignore", invalid="ignore"):
        Z = num / d2
    hi = np.where(bad, -np.inf, Z)
    lo = np.where(bad, np.inf, Z)
    jmax, jmin = hi.argmax(axis=1), lo.argmin(axis=1)
    r = np.arange(len(X))
    return hi[r, jmax], jmax, lo[r, jmin], jmin


def ball_curvatures(S: SupportSurface, subset=None, at=None, tangents=None, diagonal=True,
                    polish=False, exclusion=None, chunk=128, workers=1) -> BallCurvatureReport:
    """Sample ball curvatures kappa_bar_A(x), kappa_under_A(x) for x in ``at``
    (default: A) with A = ``subset`` (default: all samples).

    With a descriptor and ``diagonal``, the diagonal limit y -> x is included:
    the normal curvature along ``tangents`` when given (A a curve), else the
    principal curvature extremes (A a surface patch).  Point clouds get an
    exclusion radius of twice the sample spacing unless one is given.
    ``polish`` maximizes Z(x*, .) over the continuous descriptor surface from
    the best sample pair.
    """
    A = np.arange(len(S)) if subset is None else np.asarray(subset, dtype=np.int64)
    if len(A) < 2:
        raise ValueError("ball curvature needs at least two points in A")
    at = A if at is None else np.asarray(at, dtype=np.int64)
    if exclusion is None:
        exclusion = 2 * S.spacing() if S.descriptor is None else 0.0
    X, G, Y = S.points[at], S.normals[at], S.points[A]
    blocks = [slice(i, i + chunk) for i in range(0, len(at), chunk)]

    def run(b):
        return _z_rows(X[b], G[b], Y, at[b], A, exclusion)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    kbar = np.concatenate([p[0] for p in parts])
    jbar = A[np.concatenate([p[1] for p in parts])]
    kund = np.concatenate([p[2] for p in parts])
    jund = A[np.concatenate([p[3] for p in parts])]
    diag_hi = diag_lo = None
    if diagonal and S.descriptor is not None:
        if tangents is not None:
            diag_hi = diag_lo = S.descriptor.normal_curvature(X, np.asarray(tangents, dtype=float))
        else:
            diag_lo, diag_hi = S.descriptor.principal_curvatures(X)
        jd = at
        kbar_new = np.maximum(kbar, diag_hi)
        jbar = np.where(diag_hi > kbar, jd, jbar)
        kund_new = np.minimum(kund, diag_lo)
        jund = np.where(diag_lo < kund, jd, jund)
        kbar, kund = kbar_new, kund_new
    i_max, i_min = int(np.argmax(kbar)), int(np.argmin(kund))
    sup = float(kbar[i_max])
    polished = sup
    if polish and S.descriptor is not None and jbar[i_max] != at[i_max]:
        polished = max(sup, _polish(S, at[i_max], jbar[i_max]))
    return BallCurvatureReport(
        at=at, kappa_bar=kbar, kappa_under=kund, kappa=np.maximum(kbar, -kund),
        sup_kappa_bar=sup, argmax_pair=(int(at[i_max]), int(jbar[i_max])),
        inf_kappa_under=float(kund[i_min]), argmin_pair=(int(at[i_min]), int(jund[i_min])),
        polished_sup=float(polished), exclusion=float(exclusion))


def _polish(S: SupportSurface, i, j):
    """Local maximization of Z(x_i, y) over y on the descriptor surface."""
    desc = S.descriptor
    x, gx, y0 = S.points[i], S.normals[i], S.points[j]
    e1, e2 = tangent_basis(desc.normal(y0))
    scale = np.linalg.norm(x - y0)

    def neg(u):
        y = desc.project(y0 + scale * (u[0] * e1[0] + u[1] * e2[0]))[0]
        d = x - y
        d2 = d @ d
        if d2 < 1e-20:
            return 0.0
        return -2 * (d @ gx) / d2

    res = minimize(neg, np.zeros(2), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return float(-res.fun)


# identities on meshes -----------------------------------------------------------


def _surface_data(mesh_or_data):
    if isinstance(mesh_or_data, SurfaceData):
        return mesh_or_data
    from .willmore import surface_data
    return surface_data(mesh_or_data)


def _as_support(S):
    return S if isinstance(S, SupportSurface) else SupportSurface(np.zeros((0, 3)), np.zeros((0, 3)), S)


def boundary_tangents(mesh: TriangleMesh):
    """Unit tangents at boundary vertices in the order of ``conormal``."""
    out = []
    V = mesh.vertices
    for loop in mesh.boundary_loops:
        loop = np.asarray(loop)
        out.append(normalize(V[np.roll(loop, -1)] - V[np.roll(loop, 1)]))
    return np.concatenate(out)


def support_admissibility(mesh_or_data, S):
    """Level-set distance of boundary vertices and the angle between the
    conormal and the support normal (free boundary: eta = gamma)."""
    data = _surface_data(mesh_or_data)
    S = _as_support(S)
    xb = data.mesh.vertices[data.B.index]
    gam = S.normal_at(xb)
    if S.descriptor is not None:
        dist = float(np.max(S.descriptor.residual(xb)))
    else:
        dist = float(np.max(S.tree().query(xb)[0]))
    cosang = np.clip(np.sum(gam * data.B.eta, axis=1), -1.0, 1.0)
    return {"max_support_distance": dist, "max_conormal_angle_deg": float(np.degrees(np.max(np.arccos(cosang))))}


def _spt_kernel(data, S):
    """Boundary points, support normals there, weights and tangents."""
    xb = data.mesh.vertices[data.B.index]
    return xb, S.normal_at(xb), data.B.weight, boundary_tangents(data.mesh)


def boundary_curvature_identity(mesh_or_data, S, x0, density=None):
    """Both sides of
        2 theta^2(x0) + (2/pi) int |H/4 + (x-x0)^perp/|x-x0|^2|^2
          = (1/8pi) int |H|^2 + (1/2pi) int Z(x, x0) dsigma(x)
    at a boundary vertex x0.  The x = x0 term of the boundary quadrature
    uses the diagonal limit (normal curvature of S along the boundary
    tangent) when S has a descriptor, else the mean of its two neighbours.
    """
    data = _surface_data(mesh_or_data)
    S = _as_support(S)
    x0 = np.asarray(x0, dtype=float)
    xb, gam, w, tan = _spt_kernel(data, S)
    dist = norm(xb - x0)
    k0 = int(np.argmin(dist))
    if dist[k0] > 1e-9 * max(1.0, float(np.max(norm(xb)))):
        raise ValueError("x0 is not a vertex of the boundary support")
    others = np.arange(len(xb)) != k0
    Z = np.zeros(len(xb))
    Z[others] = z_kernel(xb[others], gam[others], x0)
    if S.descriptor is not None:
        Z[k0] = S.descriptor.normal_curvature(xb[[k0]], tan[[k0]])[0]
    else:
        Z[k0] = 0.5 * (Z[k0 - 1] + Z[(k0 + 1) % len(Z)])
    bterm = float(np.sum(w * Z))
    if density is None:
        density = plain_density(data, x0).estimate
    defect = defect_integral(data, x0)
    h2 = data.vertex_integral(np.sum(data.H.H ** 2, axis=1))
    lhs = 2 * density + 2 * defect / PI
    rhs = h2 / (8 * PI) + bterm / (2 * PI)
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs), "density": density,
            "defect_integral": defect, "h2": h2, "boundary_term": bterm}


def support_inequality_check(mesh_or_data, S, tol=None, diagonal=True):
    """2 pi <= (1/4) int |H|^2 + int kappa_bar_spt(sigma) dsigma, plus the
    convex bound 2 pi <= (1/4) int |H|^2 + k sigma(R^n) when S is a convex
    descriptor with curvature bound k.  ``tol`` defaults to 1% of 2 pi."""
    data = _surface_data(mesh_or_data)
    S = _as_support(S)
    tol = 0.01 * 2 * PI if tol is None else tol
    xb, gam, w, tan = _spt_kernel(data, S)
    spt = SupportSurface(xb, gam, S.descriptor, level_tol=None)
    rep = ball_curvatures(spt, tangents=tan, diagonal=diagonal, exclusion=0.0)
    quarter = 0.25 * data.vertex_integral(np.sum(data.H.H ** 2, axis=1))
    kint = float(np.sum(w * rep.kappa_bar))
    total = quarter + kint
    out = {"name": "support_inequality", "pass": bool(2 * PI <= total + tol), "measured": total,
           "expected": 2 * PI, "tolerance": tol, "margin": total - 2 * PI,
           "equality_defect": abs(total - 2 * PI) / (2 * PI), "quarter_h2": quarter,
           "kappa_bar_integral": kint, "sigma_mass": float(np.sum(w)),
           "max_kappa": float(np.max(rep.kappa))}
    k = S.descriptor.curvature_bound() if S.descriptor is not None and S.descriptor.convex else None
    if k is not None:
        conv = quarter + k * float(np.sum(w))
        out.update(convex_bound=conv, convex_pass=bool(2 * PI <= conv + tol))
        out["pass"] = out["pass"] and out["convex_pass"]
    return out
