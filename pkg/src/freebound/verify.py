"""The acceptance suite as plain functions.

Each ``criterion_k`` returns a list of verdict dicts (name, pass, measured,
expected, tolerance).  ``run_suite`` times them and prints one line per
criterion.  The "full" suite runs every check at the stated sizes and
tolerances; "quick" trims seeds and fixture lists so it finishes well under
two minutes, but keeps every tolerance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ellipe

from . import geometry as geo
from .io import verdict
from .monotonicity import g_profile, integral_identity, monotonicity_check
from .operators import constant_field, first_variation_residual, first_variation_terms, position_field, quadratic_field
from .optimizer import OptimizerConfig, finite_difference_check, minimize
from .support import Ellipsoid, Sphere, SupportSurface, ball_curvatures, support_inequality_check
from .tangent_point import curve_energy, energy, kernel_matrix, normalized_energy
from .willmore import li_yau_check, surface_data, willmore_energy

TWO_PI = 2 * np.pi
ROUNDOFF = 1e-10


@dataclass
class CriterionResult:
    number: int
    title: str
    verdicts: list
    seconds: float
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(v["pass"] for v in self.verdicts)

    def line(self):
        n_ok = sum(v["pass"] for v in self.verdicts)
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] C{self.number:<2d} {self.title} ({n_ok}/{len(self.verdicts)} checks, {self.seconds:.1f} s)"


def _decreasing(name, fine, coarse, **extra):
    """fine < coarse, or both already at round-off."""
    ok = fine < coarse or max(fine, coarse) < ROUNDOFF
    return verdict(name, ok, fine, f"< {coarse:.3e}", 0.0, **extra)


# 1 ---------------------------------------------------------------------------


def _equality_fixtures(n):
    return [("flat-disk", geo.flat_disk(n))] + [(f"cap r={r:g}", geo.spherical_cap(r, n)) for r in (0.5, 1.0, 2.0)]


def criterion_1(quick=False):
    out = []
    t0 = time.perf_counter()
    errs = {}
    for n in (96, 128):
        for name, mesh in _equality_fixtures(n):
            W = willmore_energy(mesh, search_density=False).willmore
            errs[name, n] = abs(W - TWO_PI) / TWO_PI
    for name, _ in _equality_fixtures(8):
        out.append(verdict(f"{name} |W-2pi|/2pi at 96", errs[name, 96] < 0.008, errs[name, 96], 0.0, 0.008))
        out.append(_decreasing(f"{name} error decreases 96->128", errs[name, 128], errs[name, 96]))
    dt = time.perf_counter() - t0
    out.append(verdict("runtime", dt < 30, dt, "< 30 s", 30.0))
    return out


# 2 ---------------------------------------------------------------------------


def criterion_2(quick=False):
    out = []
    seeds = range(3) if quick else range(10)
    for s in seeds:
        rep = willmore_energy(geo.seeded_perturbed_cap(s, 96))
        chk = li_yau_check(rep, tol=1e-3)
        out.append(verdict(f"seed {s} 2pi*theta <= W + 1e-3", chk["pass"], chk["measured"], chk["expected"], 1e-3))
        out.append(verdict(f"seed {s} W - 2pi > 0.05", rep.willmore - TWO_PI > 0.05, rep.willmore - TWO_PI, "> 0.05", 0.05))
    rep = willmore_energy(geo.disk_pair(96))
    out.append(verdict("disk pair theta_max ~ 2", abs(rep.max_tilde_density - 2) <= 0.05 * 2,
                       rep.max_tilde_density, 2.0, 0.1))
    out.append(verdict("disk pair W ~ 4pi", abs(rep.willmore - 2 * TWO_PI) <= 0.01 * 2 * TWO_PI,
                       rep.willmore, 2 * TWO_PI, 0.01 * 2 * TWO_PI))
    return out


# 3 ---------------------------------------------------------------------------

MONO_RADII = np.geomspace(0.1, 2.5, 24)


def monotonicity_centers(kind):
    """Analytic centers shared across resolutions: origin, interior,
    boundary and near-exterior (just outside the unit ball)."""
    if kind == "disk":
        b = np.array([np.cos(0.7), np.sin(0.7), 0.0])
        return {"origin": np.zeros(3), "interior": np.array([0.3, 0.2, 0.0]), "boundary": b,
                "near-exterior": 1.1 * b}
    g = geo.cap_geometry(1.0)
    c, phi = g["center"], g["phi_max"]

    def on_cap(f, th):
        a = f * phi
        return c + np.array([np.sin(a) * np.cos(th), np.sin(a) * np.sin(th), -np.cos(a)])

    b = on_cap(1.0, 0.7)
    return {"origin": np.zeros(3), "interior": on_cap(0.45, 1.3), "boundary": b / np.linalg.norm(b),
            "near-exterior": 1.1 * b / np.linalg.norm(b)}


def criterion_3(quick=False):
    out = []
    fixtures = {"disk": geo.flat_disk, "cap": lambda n: geo.spherical_cap(1.0, n)}
    for kind, make in fixtures.items():
        data = {n: surface_data(make(n)) for n in (48, 96)}
        for cname, x0 in monotonicity_centers(kind).items():
            res = {}
            for n, d in data.items():
                prof = g_profile(d, x0, MONO_RADII)
                chk = monotonicity_check(prof, tol=10 * d.h)
                res[n] = chk["max_identity_residual"]
            tol = chk["tolerance"]
            label = f"{kind} {cname}"
            out.append(verdict(f"{label} min increment >= -10h", chk["monotone"], chk["min_increment"], ">= -tol", tol))
            out.append(verdict(f"{label} identity residual <= 10h", chk["identity"], res[96], "<= tol", tol))
            ratio = res[96] / res[48] if res[48] > 0 else 0.0
            ok = ratio <= 0.65 or res[96] < ROUNDOFF
            out.append(verdict(f"{label} residual ratio 96/48", ok, ratio, "<= 0.65 (halving, 30% slack)", 0.15))
    return out


# 4 ---------------------------------------------------------------------------


def criterion_4(quick=False):
    out = []
    d = surface_data(geo.flat_disk(96))
    I = integral_identity(d, np.zeros(3))
    out.append(verdict("disk x0=0: 0 = 0 + 1 - 1", I["defect"] < 1e-2, I["defect"], 0.0, 1e-2,
                       lhs=I["lhs"], rhs=I["rhs"], density=I["density"]))
    radii = (1.0,) if quick else (0.5, 1.0, 2.0)
    for r in radii:
        defects = {}
        for n in (96, 192):
            m = geo.spherical_cap(r, n)
            dd = surface_data(m)
            for cname, x0 in (("apex", m.vertices[0]), ("origin", np.zeros(3))):
                defects[cname, n] = integral_identity(dd, x0)["defect"]
        for cname in ("apex", "origin"):
            out.append(verdict(f"cap r={r:g} {cname} defect at 96", defects[cname, 96] < 2e-2,
                               defects[cname, 96], 0.0, 2e-2))
            out.append(_decreasing(f"cap r={r:g} {cname} defect decreases 96->192",
                                   defects[cname, 192], defects[cname, 96]))
    return out


# 5 ---------------------------------------------------------------------------

CAP1_COMPONENTS = (3.68061, 0.76227, 4.44288)


def criterion_5(quick=False):
    out = []
    fields = {"constant": constant_field([0.3, -0.5, 0.7]), "position": position_field(),
              "quadratic": quadratic_field()}
    fixtures = {"disk": geo.flat_disk, "cap r=1": lambda n: geo.spherical_cap(1.0, n)}
    for fname, make in fixtures.items():
        res = {}
        for n in (96, 192):
            m = make(n)
            d = surface_data(m)
            for xname, X in fields.items():
                res[xname, n] = first_variation_residual(m, d.H, d.B, *X)
            if fname == "cap r=1" and n == 96:
                div, hx, bx = first_variation_terms(m, d.H, d.B, *position_field())
                for label, got, want in zip(("2 Area", "int H.x", "int x.eta"), (div, hx, bx), CAP1_COMPONENTS):
                    out.append(verdict(f"cap r=1 {label}", abs(got - want) <= 0.01 * want, got, want, 0.01 * want))
        for xname in fields:
            out.append(verdict(f"{fname} {xname} residual at 96", res[xname, 96] < 1e-2, res[xname, 96], 0.0, 1e-2))
            out.append(_decreasing(f"{fname} {xname} residual decreases", res[xname, 192], res[xname, 96]))
    return out


# 6 ---------------------------------------------------------------------------


def ellipsoid_curvature_oracle(a, b, c, m=600):
    """Max principal curvature over a dense (theta, phi) grid from the closed
    forms of the Gauss and mean curvature of an ellipsoid."""
    th, ph = np.meshgrid(np.linspace(0, np.pi, m), np.linspace(0, 2 * np.pi, 2 * m))
    x = a * np.sin(th) * np.cos(ph)
    y = b * np.sin(th) * np.sin(ph)
    z = c * np.cos(th)
    s = x ** 2 / a ** 4 + y ** 2 / b ** 4 + z ** 2 / c ** 4
    K = 1.0 / ((a * b * c) ** 2 * s ** 2)
    H = abs(x ** 2 + y ** 2 + z ** 2 - a * a - b * b - c * c) / (2 * (a * b * c) ** 2 * s ** 1.5)
    return float(np.max(H + np.sqrt(np.maximum(H * H - K, 0.0))))


def criterion_6(quick=False):
    out = []
    S = SupportSurface.from_descriptor(Sphere(), 2000)
    rep = ball_curvatures(S, diagonal=False)
    err = float(max(np.max(np.abs(rep.kappa_bar - 1)), np.max(np.abs(rep.kappa_under - 1)),
                    np.max(np.abs(rep.kappa - 1))))
    out.append(verdict("unit sphere Z = kappa_bar = 1", err < 1e-12, err, 0.0, 1e-12))
    E = SupportSurface.from_descriptor(Ellipsoid(2.0, 1.0, 1.0), 10_000)
    rep = ball_curvatures(E, diagonal=False)
    oracle = ellipsoid_curvature_oracle(2.0, 1.0, 1.0)
    rel = abs(rep.sup_kappa_bar - oracle) / oracle
    out.append(verdict("ellipsoid (2,1,1) sample sup kappa_bar vs principal max", rel < 0.01,
                       rep.sup_kappa_bar, oracle, 0.01 * oracle))
    out.append(verdict("ellipsoid kappa finite", float(np.max(rep.kappa)) < 1e6, float(np.max(rep.kappa)), "< 1e6", 0.0))
    return out


# 7 ---------------------------------------------------------------------------


def criterion_7(quick=False):
    out = []
    for name, mesh in (("disk", geo.flat_disk(96)), ("cap r=1", geo.spherical_cap(1.0, 96))):
        chk = support_inequality_check(mesh, Sphere())
        out.append(verdict(f"{name} vs unit sphere: inequality", chk["pass"], chk["measured"], TWO_PI, chk["tolerance"]))
        out.append(verdict(f"{name} vs unit sphere: equality defect < 1%", chk["equality_defect"] < 0.01,
                           chk["equality_defect"], 0.0, 0.01))
    chk = support_inequality_check(geo.elliptic_disk(96), Ellipsoid(2.0, 1.0, 1.0))
    out.append(verdict("elliptic disk vs ellipsoid (2,1,1): strict margin", chk["pass"] and chk["margin"] > 0,
                       chk["margin"], "> 0", 0.0))
    return out


# 8 ---------------------------------------------------------------------------

P_LIST = (1.5, 2.0, 3.0, 4.0)


def ellipse_length(a, b):
    """Perimeter from the complete elliptic integral of the second kind."""
    a, b = max(a, b), min(a, b)
    return 4 * a * float(ellipe(1 - (b / a) ** 2))


def criterion_8(quick=False):
    out = []
    t0 = time.perf_counter()
    rep = curve_energy(geo.circle(512), P_LIST)
    out.append(verdict("circle E1 = 4pi^2", abs(rep.e1 / (4 * np.pi ** 2) - 1) < 0.002, rep.e1, 4 * np.pi ** 2,
                       0.002 * 4 * np.pi ** 2))
    for p, v in rep.normalized_ep.items():
        out.append(verdict(f"circle normalized E_{p:g} = 2pi", abs(v / TWO_PI - 1) < 0.002, v, TWO_PI, 0.002 * TWO_PI))
    L = ellipse_length(2.0, 1.0)
    rep = curve_energy(geo.ellipse(512, 2.0, 1.0), (2.0,))
    out.append(verdict("ellipse E1 = 2pi L", abs(rep.e1 / (TWO_PI * L) - 1) < 0.005, rep.e1, TWO_PI * L,
                       0.005 * TWO_PI * L))
    out.append(verdict("ellipse normalized E2 > 2pi + 0.05", rep.normalized_ep[2.0] > TWO_PI + 0.05,
                       rep.normalized_ep[2.0], "> 2pi + 0.05", 0.05))
    rep = curve_energy(geo.trefoil(512), (2.0,))
    ratio = rep.e1 / (TWO_PI * rep.length)
    out.append(verdict("trefoil E1/(2pi L) > 1.1", ratio > 1.1, ratio, "> 1.1", 0.1))
    seeds = range(5) if quick else range(20)
    for s in seeds:
        rep = curve_energy(geo.fourier_random(256, s), P_LIST, tol=1e-3)
        for v in rep.verdicts:
            out.append(verdict(f"random seed {s} {v['name']}", v["pass"], v["measured"], v["expected"], 1e-3))
    dt = time.perf_counter() - t0
    out.append(verdict("runtime", dt < 60, dt, "< 60 s", 60.0))
    return out


# 9 ---------------------------------------------------------------------------


def curve_corpus(quick=False):
    """(name, curve, planar_convex) triples."""
    corpus = [("circle", geo.circle(512), True), ("ellipse", geo.ellipse(512, 2.0, 1.0), True),
              ("perturbed circle", geo.perturbed_circle(128, 0.2, 4), False),
              ("trefoil", geo.trefoil(512), False)]
    seeds = range(5) if quick else range(20)
    corpus += [(f"random {s}", geo.fourier_random(256, s), False) for s in seeds]
    return corpus


def criterion_9(quick=False):
    out = []
    for name, curve, convex in curve_corpus(quick):
        n = curve.n
        tol = 10.0 / n
        w = curve.dual_lengths() @ kernel_matrix(curve)
        out.append(verdict(f"{name} per-point >= 2pi - 10/n", float(np.min(w)) >= TWO_PI - tol,
                           float(np.min(w)), TWO_PI, tol))
        dev = float(np.max(np.abs(w - TWO_PI)))
        if convex:
            out.append(verdict(f"{name} equality (planar convex)", dev <= tol, dev, 0.0, tol))
        else:
            out.append(verdict(f"{name} strict somewhere (not planar convex)", dev > tol, dev, f"> {tol:.3g}", tol))
    return out


# 10 --------------------------------------------------------------------------


def criterion_10(quick=False):
    out = []
    for s in range(5):
        err = finite_difference_check(geo.fourier_random(32, s), p=2.0)
        out.append(verdict(f"gradient vs central differences seed {s}", err < 1e-5, err, 0.0, 1e-5))
    t0 = time.perf_counter()
    trace = minimize(geo.perturbed_circle(128, 0.2, 4), OptimizerConfig(p=2.0, max_iters=2000))
    dt = time.perf_counter() - t0
    obj = np.asarray(trace.objective)
    mono = bool(np.all(np.diff(obj) <= 0))
    hit = np.flatnonzero(obj <= 1.01 * TWO_PI)
    first = int(hit[0]) if hit.size else -1
    out.append(verdict("optimizer trace monotone", mono, float(np.max(np.diff(obj))) if len(obj) > 1 else 0.0, "<= 0", 0.0))
    out.append(verdict("within 1% of 2pi in <= 2000 iterations", 0 <= first <= 2000, first, "<= 2000", 0.0,
                       final_objective=float(obj[-1])))
    out.append(verdict("no line-search failure", not trace.line_search_failed, trace.message, "", 0.0))
    out.append(verdict("runtime", dt < 300, dt, "< 300 s", 300.0))
    return out


# 11 --------------------------------------------------------------------------


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def criterion_11(quick=False):
    out = []
    tol = 1e-10
    curve = geo.fourier_random(128, 3)
    lam = 3.7
    big = curve.transformed(scale=lam)
    for p in P_LIST:
        e, eb = energy(curve, p), energy(big, p)
        out.append(verdict(f"scaling law E_{p:g}", _rel(eb, lam ** (2 - p) * e) < tol, _rel(eb, lam ** (2 - p) * e), 0.0, tol))
        nv = normalized_energy(e, curve.length(), p)
        nb = normalized_energy(eb, big.length(), p)
        out.append(verdict(f"normalized E_{p:g} scale invariance", _rel(nb, nv) < tol, _rel(nb, nv), 0.0, tol))
    Q = geo.random_rotation(11)
    for p in (1.0, 2.0):
        e, er = energy(curve, p), energy(curve.transformed(Q), p)
        out.append(verdict(f"rotation invariance E_{p:g}", _rel(er, e) < tol, _rel(er, e), 0.0, tol))
    mesh = geo.perturbed_cap(1.0, 64, 0.05, 3)
    W = willmore_energy(mesh, search_density=False).willmore
    Wr = willmore_energy(mesh.transformed(Q), search_density=False).willmore
    out.append(verdict("rotation invariance W", _rel(Wr, W) < tol, _rel(Wr, W), 0.0, tol))
    return out


CRITERIA = [
    (1, "Willmore equality cases", criterion_1),
    (2, "Li-Yau inequality", criterion_2),
    (3, "monotonicity of g + g_hat", criterion_3),
    (4, "integral identity", criterion_4),
    (5, "first-variation residuals", criterion_5),
    (6, "ball curvature", criterion_6),
    (7, "support-surface inequality", criterion_7),
    (8, "tangent-point energies", criterion_8),
    (9, "per-point tangent-point integral", criterion_9),
    (10, "optimizer sharpness", criterion_10),
    (11, "exact invariances", criterion_11),
]

SUITES = ("quick", "full")


def run_criterion(number, quick=False):
    num, title, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    verdicts = fn(quick=quick)
    return CriterionResult(num, title, verdicts, time.perf_counter() - t0)


def run_suite(name="full", echo=print, only=None):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    quick = name == "quick"
    results = []
    for num, _, _ in CRITERIA:
        if only and num not in only:
            continue
        res = run_criterion(num, quick)
        results.append(res)
        if echo:
            echo(res.line())
            for v in res.verdicts:
                if not v["pass"]:
                    echo(f"       failed: {v['name']}: measured {v['measured']!r}, expected {v['expected']!r}, "
                         f"tolerance {v['tolerance']!r}")
    return results
