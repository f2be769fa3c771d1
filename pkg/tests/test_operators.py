import numpy as np
import pytest

from freebound import geometry as geo
from freebound.operators import (conormal, constant_field, cotan_laplacian, first_variation_residual,
                                 first_variation_terms, linear_field, mean_curvature, position_field,
                                 quadratic_field, vertex_areas)


def test_vertex_areas_partition_the_mesh():
    m = geo.spherical_cap(1.0, 32)
    assert np.sum(vertex_areas(m)) == pytest.approx(m.area())


def test_cotan_laplacian_kills_affine_functions_in_the_interior():
    m = geo.flat_disk(32)
    lap = cotan_laplacian(m)
    interior = ~m.is_boundary_vertex()
    assert np.max(np.abs(lap[interior])) < 1e-12


def test_flat_disk_has_zero_mean_curvature():
    H = mean_curvature(geo.flat_disk(48))
    assert np.max(np.abs(H.H)) < 1e-12


def test_sphere_mean_curvature_magnitude():
    # |H| = 2/R on a sphere of radius R, pointing inward
    R = 1.7
    m = geo.icosphere(4, R)
    H = mean_curvature(m)
    mag = np.linalg.norm(H.H, axis=1)
    assert np.median(mag) == pytest.approx(2 / R, rel=1e-2)
    assert np.all(np.sum(H.H * m.vertices, axis=1) < 0)


def test_cap_mean_curvature_l2_converges():
    errs = []
    for n in (48, 96):
        r = 1.0
        m = geo.spherical_cap(r, n)
        H = mean_curvature(m)
        mag = np.linalg.norm(H.H, axis=1)
        errs.append(np.sqrt(np.sum(H.area * (mag - 2 / r) ** 2)))
    assert errs[1] < errs[0]
    assert errs[1] < 0.05


def test_conormal_matches_position_on_free_boundary():
    for m in (geo.flat_disk(64), geo.spherical_cap(1.0, 64)):
        B = conormal(m)
        x = m.vertices[B.index]
        assert np.max(np.linalg.norm(B.eta - x, axis=1)) < 0.05
        assert np.sum(B.weight) == pytest.approx(m.boundary_length())


def test_first_variation_exact_for_affine_fields():
    m = geo.spherical_cap(0.7, 48)
    H = mean_curvature(m)
    B = conormal(m)
    A = np.array([[0.2, -1.0, 0.4], [0.3, 0.5, 0.0], [1.0, 0.1, -0.6]])
    for X in (constant_field([1.0, 2.0, -0.5]), linear_field(A), position_field()):
        assert first_variation_residual(m, H, B, *X) < 1e-10


def test_first_variation_quadratic_on_flat_disk_is_round_off():
    m = geo.flat_disk(48)
    assert first_variation_residual(m, mean_curvature(m), conormal(m), *quadratic_field()) < 1e-12


@pytest.mark.parametrize("r", [0.5, 2.0])
def test_first_variation_quadratic_refines_on_caps(r):
    res = [first_variation_residual(m, mean_curvature(m), conormal(m), *quadratic_field())
           for m in (geo.spherical_cap(r, 48), geo.spherical_cap(r, 96))]
    assert res[1] < res[0] < 5e-2


def test_position_field_components_cap_r1():
    m = geo.spherical_cap(1.0, 96)
    div, hx, bx = first_variation_terms(m, mean_curvature(m), conormal(m), *position_field())
    g = geo.cap_geometry(1.0)
    assert div == pytest.approx(2 * g["area"], rel=5e-3)
    assert bx == pytest.approx(g["boundary_length"], rel=5e-3)
    assert div == pytest.approx(bx - hx, abs=1e-10)
