"""Willmore energy of free-boundary surfaces in the unit ball, the Li-Yau
type density bound and equality diagnostics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .geometry import norm
from .monotonicity import SurfaceData, defect_integral, density_ratio, tilde_density
from .operators import conormal, mean_curvature

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class WillmoreReport:
    quarter_h2: float
    boundary_term: float
    willmore: float
    max_tilde_density: float
    li_yau_lhs: float
    embedded_flag_threshold: bool
    equality_defect: float
    quadrature_uncertainty: float
    max_boundary_radius_defect: float
    max_conormal_angle_deg: float
    argmax_density_vertex: int

    def to_dict(self):
        return asdict(self)


def surface_data(mesh, project=True):
    return SurfaceData(mesh, mean_curvature(mesh, project=project), conormal(mesh))


def admissibility(mesh, B=None):
    """Distance of boundary vertices from the unit sphere and the angle
    between the conormal and the sphere normal (free boundary: eta = x)."""
    B = conormal(mesh) if B is None else B
    x = mesh.vertices[B.index]
    rad = float(np.max(np.abs(norm(x) - 1.0)))
    cosang = np.clip(np.sum(B.eta * x, axis=1) / norm(x), -1.0, 1.0)
    ang = float(np.degrees(np.max(np.arccos(cosang))))
    return {"max_boundary_radius_defect": rad, "max_conormal_angle_deg": ang}


def max_tilde_density(data: SurfaceData, coarse=5.0, decile=0.1):
    """Coarse density ratio at every vertex, ladder estimate on the top
    decile; returns (max estimate, vertex index)."""
    V = data.mesh.vertices
    r = coarse * data.h
    coarse_vals = np.array([density_ratio(data, v, r) for v in V])
    k = max(1, int(np.ceil(decile * len(V))))
    top = np.argsort(coarse_vals)[::-1][:k]
    est = np.array([tilde_density(data, V[i]).estimate for i in top])
    j = int(np.argmax(est))
    return float(est[j]), int(top[j])


def equality_diagnostics(data: SurfaceData, center, method="face"):
    """mu-weighted L2 norm of H/4 + (x - x0)^perp/|x - x0|^2."""
    return float(np.sqrt(defect_integral(data, center, method=method)))


def _sample_vertices(mesh, k=8):
    interior = np.flatnonzero(~mesh.is_boundary_vertex())
    if len(interior) <= k:
        return interior
    return interior[np.linspace(0, len(interior) - 1, k).round().astype(int)]


def willmore_energy(data_or_mesh, search_density=True) -> WillmoreReport:
    """Willmore energy (1/4) int |H|^2 + int x.eta dsigma with diagnostics.

    The boundary-vertex share of the |H|^2 quadrature (where H is
    extrapolated from the interior) is reported as ``quadrature_uncertainty``.
    """
    data = data_or_mesh if isinstance(data_or_mesh, SurfaceData) else surface_data(data_or_mesh)
    mesh = data.mesh
    if not mesh.boundary_loops:
        raise ValueError("mesh has no boundary; the free-boundary Willmore energy is undefined")
    h2 = np.sum(data.H.H ** 2, axis=1)
    quarter = 0.25 * data.vertex_integral(h2)
    bmask = mesh.is_boundary_vertex()
    unc = 0.25 * float(np.sum((data.H.area * h2)[bmask]))
    W = quarter + data.x_eta
    if search_density:
        theta, arg = max_tilde_density(data)
    else:
        theta, arg = float("nan"), -1
    eq = max(equality_diagnostics(data, mesh.vertices[i]) for i in _sample_vertices(mesh))
    adm = admissibility(mesh, data.B)
    return WillmoreReport(
        quarter_h2=float(quarter), boundary_term=float(data.x_eta), willmore=float(W),
        max_tilde_density=theta, li_yau_lhs=TWO_PI * theta, embedded_flag_threshold=bool(W < 2 * TWO_PI),
        equality_defect=eq, quadrature_uncertainty=unc, argmax_density_vertex=arg, **adm)


def li_yau_check(report: WillmoreReport, tol=1e-3):
    lhs, rhs = report.li_yau_lhs, report.willmore
    return {
        "name": "li_yau",
        "pass": bool(lhs <= rhs + tol),
        "measured": lhs,
        "expected": rhs,
        "tolerance": tol,
        "margin": rhs - lhs,
        "equality": bool(abs(rhs - lhs) <= tol),
        "embedded_flag_threshold": report.embedded_flag_threshold,
    }


def li_yau_origin_check(data: SurfaceData, tol=1e-2):
    """2 pi theta^2(0) + (1/8) int |H|^2 <= W, meaningful when 0 lies on the surface."""
    theta0 = tilde_density(data, np.zeros(3)).estimate
    h2 = data.vertex_integral(np.sum(data.H.H ** 2, axis=1))
    lhs = TWO_PI * theta0 + h2 / 8
    W = 0.25 * h2 + data.x_eta
    return {"name": "li_yau_origin", "pass": bool(lhs <= W + tol), "measured": lhs, "expected": W,
            "tolerance": tol, "theta0": theta0}


def willmore_check(report: WillmoreReport, tol):
    return {"name": "willmore_lower_bound", "pass": bool(report.willmore >= TWO_PI - tol),
            "measured": report.willmore, "expected": TWO_PI, "tolerance": tol,
            "margin": report.willmore - TWO_PI}
