import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freebound import geometry as geo
from freebound.support import (Ellipsoid, Graph, Plane, Sphere, SupportSurface, ball_curvatures,
                               boundary_curvature_identity, descriptor_from_config, fibonacci_sphere,
                               support_admissibility, support_inequality_check, z_kernel)

TWO_PI = 2 * np.pi
angles = st.tuples(st.floats(0.05, np.pi - 0.05), st.floats(0, 2 * np.pi))


def _on_sphere(th, ph):
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


@given(angles, angles)
def test_z_is_one_on_the_unit_sphere(a, b):
    x, y = _on_sphere(*a), _on_sphere(*b)
    if np.linalg.norm(x - y) < 1e-4:
        return
    assert z_kernel(x, x, y) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0.2, 5.0), angles, angles)
def test_z_on_sphere_of_radius_R(R, a, b):
    x, y = R * _on_sphere(*a), R * _on_sphere(*b)
    if np.linalg.norm(x - y) < 1e-3 * R:
        return
    assert z_kernel(x, x / R, y) == pytest.approx(1.0 / R, rel=1e-8)


def test_z_rejects_coincident_points():
    with pytest.raises(ValueError):
        z_kernel(np.ones(3), np.ones(3), np.ones(3))


def test_sphere_ball_curvatures_are_one():
    S = SupportSurface.from_descriptor(Sphere(), 500)
    rep = ball_curvatures(S)
    assert np.max(np.abs(rep.kappa_bar - 1)) < 1e-12
    assert np.max(np.abs(rep.kappa_under - 1)) < 1e-12


@pytest.fixture(scope="module")
def cloud():
    E = SupportSurface.from_descriptor(Ellipsoid(1.5, 1.0, 0.8), 600)
    return SupportSurface(E.points, E.normals)


@given(st.integers(0, 10_000))
def test_kappa_bar_is_monotone_in_the_set(seed):
    E = SupportSurface.from_descriptor(Ellipsoid(1.5, 1.0, 0.8), 300)
    S = SupportSurface(E.points, E.normals)
    rng = np.random.default_rng(seed)
    big = np.sort(rng.choice(len(S), 150, replace=False))
    small = big[:60]
    at = small[:20]
    a = ball_curvatures(S, subset=small, at=at, exclusion=0.0)
    b = ball_curvatures(S, subset=big, at=at, exclusion=0.0)
    assert np.all(a.kappa_bar <= b.kappa_bar + 1e-12)
    assert np.all(a.kappa_under >= b.kappa_under - 1e-12)


@given(st.floats(0.25, 4.0))
def test_ball_curvature_scales_inversely(lam):
    E = SupportSurface.from_descriptor(Ellipsoid(1.5, 1.0, 0.8), 200)
    S = SupportSurface(E.points, E.normals)
    a = ball_curvatures(S, exclusion=0.0)
    b = ball_curvatures(S.transformed(scale=lam), exclusion=0.0)
    assert np.allclose(b.kappa_bar, a.kappa_bar / lam, rtol=1e-10)


def test_point_cloud_exclusion_defaults_to_twice_spacing(cloud):
    rep = ball_curvatures(cloud)
    assert rep.exclusion == pytest.approx(2 * cloud.spacing())


def test_ellipsoid_principal_curvatures_at_axes():
    E = Ellipsoid(2.0, 1.0, 1.0)
    kmin, kmax = E.principal_curvatures(np.array([[2.0, 0, 0], [0, 1.0, 0]]))
    assert kmax[0] == pytest.approx(2.0)
    assert kmin[1] == pytest.approx(0.25)
    assert kmax[1] == pytest.approx(1.0)
    assert E.curvature_bound() == pytest.approx(2.0)


def test_ellipsoid_sup_kappa_bar_reaches_max_curvature():
    S = SupportSurface.from_descriptor(Ellipsoid(2.0, 1.0, 1.0), 3000)
    rep = ball_curvatures(S, polish=True)
    assert rep.sup_kappa_bar == pytest.approx(2.0, rel=1e-2)
    assert rep.polished_sup >= rep.sup_kappa_bar


def test_plane_and_graph_descriptors():
    P = Plane()
    pts = P.sample(10)
    assert np.max(P.residual(pts)) < 1e-14
    G = Graph(lambda x, y: 0.5 * (x * x + y * y), lambda x, y: (x, y), lambda x, y: (1.0, 0.0, 1.0))
    kmin, kmax = G.principal_curvatures(np.zeros((1, 3)))
    assert abs(kmin[0]) == pytest.approx(1.0)
    assert abs(kmax[0]) == pytest.approx(1.0)


def test_descriptor_from_config():
    assert isinstance(descriptor_from_config("Sphere", radius=2.0), Sphere)
    assert descriptor_from_config("ellipsoid", a=3).axes[0] == 3.0
    with pytest.raises(ValueError):
        descriptor_from_config("torus")


def test_support_surface_validation():
    with pytest.raises(ValueError):
        SupportSurface(np.array([[2.0, 0, 0]]), descriptor=Sphere())
    with pytest.raises(ValueError):
        SupportSurface(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        SupportSurface(np.ones((2, 3)), np.zeros((2, 3)))


def test_fibonacci_sphere_is_on_sphere():
    p = fibonacci_sphere(100)
    assert np.allclose(np.linalg.norm(p, axis=1), 1.0)


@pytest.mark.parametrize("mesh", [geo.flat_disk(64), geo.spherical_cap(1.0, 64)])
def test_support_inequality_is_equality_for_unit_sphere(mesh):
    chk = support_inequality_check(mesh, Sphere())
    assert chk["pass"]
    assert chk["equality_defect"] < 0.01
    assert chk["convex_pass"]


def test_elliptic_disk_against_ellipsoid():
    m = geo.elliptic_disk(64)
    adm = support_admissibility(m, Ellipsoid(2.0, 1.0, 1.0))
    assert adm["max_support_distance"] < 1e-12
    chk = support_inequality_check(m, Ellipsoid(2.0, 1.0, 1.0))
    assert chk["pass"] and chk["margin"] > 0


def test_boundary_identity_on_disk():
    m = geo.flat_disk(96)
    x0 = m.vertices[m.boundary_vertices[0]]
    I = boundary_curvature_identity(m, Sphere(), x0)
    assert I["residual"] < 0.05
    with pytest.raises(ValueError):
        boundary_curvature_identity(m, Sphere(), np.zeros(3))
