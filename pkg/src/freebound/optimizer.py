"""Backtracking gradient descent on the normalized tangent-point energy
E_p^(1/p) L^(1 - 2/p) of closed polylines.

The gradient is the exact derivative of the discrete sum in
:mod:`freebound.tangent_point`, including the dependence of the dual
lengths, the vertex tangents and the Menger curvatures on the vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ClosedPolyline, ShapeError, norm
from .tangent_point import MIN_VERTICES, near_mask


@dataclass(frozen=True)
class OptimizerConfig:
    p: float = 2.0
    max_iters: int = 2000
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    threshold: float = 1e-12
    resample_every: int = 50
    max_backtracks: int = 60
    seed: int = 0

    def validate(self):
        if not 1.0 < self.p <= 8.0:
            raise ValueError(f"p must lie in (1, 8], got {self.p}")
        if self.max_iters < 0 or self.max_backtracks < 1:
            raise ValueError("iteration limits must be positive")
        if not (self.initial_step > 0 and self.armijo > 0 and self.threshold > 0):
            raise ValueError("step, Armijo constant and threshold must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.resample_every < 0:
            raise ValueError("resample_every must be >= 0 (0 disables resampling)")
        return self


@dataclass
class OptimizerTrace:
    objective: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    length: list = field(default_factory=list)
    resamples: list = field(default_factory=list)
    final_curve: ClosedPolyline | None = None
    converged: bool = False
    line_search_failed: bool = False
    message: str = ""

    @property
    def iterations(self):
        return len(self.objective) - 1

    def rows(self):
        return [(i, f, g, L) for i, (f, g, L) in enumerate(zip(self.objective, self.grad_norm, self.length))]


def _edges(V):
    e = np.roll(V, -1, axis=0) - V
    le = norm(e)
    return e, le


def objective_and_gradient(curve, p=2.0, with_gradient=True):
    """Normalized energy and its gradient with respect to the vertices."""
    V = np.asarray(curve.vertices if isinstance(curve, ClosedPolyline) else curve, dtype=float)
    n = len(V)
    if n < MIN_VERTICES:
        raise ValueError(f"need at least {MIN_VERTICES} vertices, got {n}")
    e, le = _edges(V)
    if np.any(le <= 1e-14 * le.max()):
        raise ShapeError("degenerate curve: repeated vertices")
    eh = e / le[:, None]
    u = eh + np.roll(eh, 1, axis=0)           # u_i = e_hat_{i-1} + e_hat_i
    un = norm(u)
    T = u / un[:, None]
    l = 0.5 * (le + np.roll(le, 1))
    L = float(np.sum(le))

    # Menger curvature at i from a = e_{i-1}, b = e_i
    a, b = np.roll(e, 1, axis=0), e
    c = a + b
    cr = np.cross(a, b)
    A = norm(cr)
    la, lb, lc = np.roll(le, 1), le, norm(c)
    kap = 2 * A / (la * lb * lc)

    d = V[None, :, :] - V[:, None, :]         # d[i, j] = x_j - x_i
    d2 = np.sum(d * d, axis=2)
    s = np.einsum("ijk,ik->ij", d, T)
    D = np.sqrt(np.maximum(d2 - s * s, 0.0))
    mask = near_mask(n)
    safe2 = np.where(mask, 1.0, d2)
    K = np.where(mask, 0.0, 2 * D / safe2)
    W = np.where(mask, kap[:, None] ** p, K ** p)
    E = float(l @ W @ l)
    f = E ** (1 / p) * L ** (1 - 2 / p)
    if not with_gradient:
        return f, None

    g = np.zeros_like(V)
    lw = l[:, None] * l[None, :]
    # far pairs: dE/dd and dE/dT_i
    far = ~mask & (D > 0)
    coef = np.where(far, lw * p * np.where(far, K, 1.0) ** (p - 1), 0.0)
    safeD = np.where(far, D, 1.0)
    q = d - s[:, :, None] * T[:, None, :]
    dK_dd = 2 * q / (safeD * safe2)[:, :, None] - 4 * (D / safe2 ** 2)[:, :, None] * d
    gd = coef[:, :, None] * dK_dd
    g += np.sum(gd, axis=0)                   # x_j
    g -= np.sum(gd, axis=1)                   # x_i
    dK_dT = (-2 * s / (safeD * safe2))[:, :, None] * d
    gT = np.sum(coef[:, :, None] * dK_dT, axis=1)
    # near band: dE/dkappa_i
    band = lw * mask
    gk = p * kap ** (p - 1) * np.sum(band, axis=1) if p != 1 else np.sum(band, axis=1)
    # dual lengths
    gl = W @ l + W.T @ l
    # chain: T_i = u_i/|u_i|
    gu = (gT - np.sum(gT * T, axis=1)[:, None] * T) / un[:, None]
    ge = np.zeros_like(V)                     # gradient w.r.t. edge vectors e_i
    # u_i depends on e_hat_{i-1} and e_hat_i
    geh = gu + np.roll(gu, -1, axis=0)
    ge += (geh - np.sum(geh * eh, axis=1)[:, None] * eh) / le[:, None]
    # l_i = (|e_{i-1}| + |e_i|)/2
    gle = 0.5 * (gl + np.roll(gl, -1))
    ge += gle[:, None] * eh
    # kappa_i from a = e_{i-1}, b = e_i
    ok = A > 0
    safeA = np.where(ok, A, 1.0)
    ab = np.sum(a * b, axis=1)
    dA_da = (lb[:, None] ** 2 * a - ab[:, None] * b) / safeA[:, None]
    dA_db = (la[:, None] ** 2 * b - ab[:, None] * a) / safeA[:, None]
    dk_da = kap[:, None] * (dA_da / safeA[:, None] - a / la[:, None] ** 2 - c / lc[:, None] ** 2)
    dk_db = kap[:, None] * (dA_db / safeA[:, None] - b / lb[:, None] ** 2 - c / lc[:, None] ** 2)
    gk = np.where(ok, gk, 0.0)
    ge += np.roll(gk[:, None] * dk_da, -1, axis=0)
    ge += gk[:, None] * dk_db
    # e_i = x_{i+1} - x_i
    g += np.roll(ge, 1, axis=0) - ge
    gL = np.roll(eh, 1, axis=0) - eh
    grad = f * (g / (p * E) + (1 - 2 / p) * gL / L)
    return f, grad


def finite_difference_check(curve, p=2.0, step=1e-6):
    """Max |analytic - central difference| relative to max |gradient|."""
    V = np.array(curve.vertices, dtype=float)
    _, g = objective_and_gradient(V, p)
    fd = np.zeros_like(V)
    for i in range(V.shape[0]):
        for k in range(3):
            Vp, Vm = V.copy(), V.copy()
            Vp[i, k] += step
            Vm[i, k] -= step
            fd[i, k] = (objective_and_gradient(Vp, p, False)[0] - objective_and_gradient(Vm, p, False)[0]) / (2 * step)
    return float(np.max(np.abs(g - fd)) / np.max(np.abs(fd)))


def resample(curve: ClosedPolyline, n=None):
    """Uniform-arclength resampling by periodic linear interpolation."""
    V = np.asarray(curve.vertices)
    n = len(V) if n is None else n
    closed = np.vstack([V, V[:1]])
    s = np.concatenate([[0.0], np.cumsum(norm(np.diff(closed, axis=0)))])
    t = np.linspace(0.0, s[-1], n, endpoint=False)
    return ClosedPolyline(np.stack([np.interp(t, s, closed[:, k]) for k in range(3)], axis=1))


def roundness(curve: ClosedPolyline):
    """max/min distance to the least-squares circle center in the best-fit plane."""
    V = np.asarray(curve.vertices)
    c0 = V.mean(axis=0)
    _, _, vt = np.linalg.svd(V - c0)
    P = (V - c0) @ vt[:2].T
    M = np.column_stack([2 * P, np.ones(len(P))])
    sol = np.linalg.lstsq(M, np.sum(P * P, axis=1), rcond=None)[0]
    r = norm(P - sol[:2])
    return float(r.max() / r.min())


def minimize(curve: ClosedPolyline, cfg: OptimizerConfig | None = None, callback=None) -> OptimizerTrace:
    """Backtracking (Armijo) gradient descent.  Steps are taken along the
    negative gradient scaled by L^2 so the step size is dimensionless."""
    cfg = (cfg or OptimizerConfig()).validate()
    trace = OptimizerTrace()
    cur = curve
    f, g = objective_and_gradient(cur, cfg.p)
    trace.objective.append(f)
    trace.grad_norm.append(float(np.linalg.norm(g)))
    trace.length.append(cur.length())
    step = cfg.initial_step
    for it in range(1, cfg.max_iters + 1):
        L = cur.length()
        direction = -g * L * L
        slope = float(np.sum(g * direction))
        if -slope <= cfg.threshold * f:
            trace.converged = True
            trace.message = "gradient below threshold"
            break
        accepted = False
        for _ in range(cfg.max_backtracks):
            try:
                trial = ClosedPolyline(cur.vertices + step * direction)
                ft, _ = objective_and_gradient(trial, cfg.p, False)
            except (ShapeError, ValueError):
                ft = np.inf
            if ft <= f + cfg.armijo * step * slope and ft < f:
                accepted = True
                break
            step *= cfg.shrink
        if not accepted:
            trace.line_search_failed = True
            trace.message = "line search failed"
            break
        cur = trial
        if cfg.resample_every and it % cfg.resample_every == 0:
            new = resample(cur)
            fn, _ = objective_and_gradient(new, cfg.p, False)
            trace.resamples.append({"iter": it, "length_change": new.length() / cur.length() - 1,
                                    "objective_change": fn / ft - 1})
            # keep the resampled curve only when it does not raise the objective
            if fn <= ft:
                cur, ft = new, fn
        f_prev, f = f, ft
        f, g = objective_and_gradient(cur, cfg.p)
        trace.objective.append(f)
        trace.grad_norm.append(float(np.linalg.norm(g)))
        trace.length.append(cur.length())
        step = min(step / cfg.shrink, cfg.initial_step * 1e3)
        if callback is not None:
            callback(it, f, cur)
        if f_prev - f <= cfg.threshold * f:
            trace.converged = True
            trace.message = "objective change below threshold"
            break
    else:
        trace.message = "max_iters reached"
    trace.final_curve = cur
    return trace
