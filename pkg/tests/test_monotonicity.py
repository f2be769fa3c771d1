import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freebound import geometry as geo
from freebound.monotonicity import (density_ratio, g_profile, integral_identity, monotonicity_check,
                                    plain_density, tilde_density)
from freebound.willmore import surface_data

RADII = np.geomspace(0.1, 2.5, 24)


@pytest.fixture(scope="module")
def disk():
    return surface_data(geo.flat_disk(64))


@pytest.fixture(scope="module")
def cap():
    return surface_data(geo.spherical_cap(1.0, 64))


@pytest.mark.parametrize("x0", [(0, 0, 0), (0.3, 0.2, 0), (1, 0, 0), (1.1, 0, 0)])
def test_disk_profile_is_monotone(disk, x0):
    prof = g_profile(disk, np.array(x0, float), RADII)
    chk = monotonicity_check(prof, 10 * disk.h)
    assert chk["pass"]
    assert np.allclose(prof.sum, prof.g + prof.g_hat)


def test_cap_profile_is_monotone_at_interior_point(cap):
    x0 = cap.mesh.vertices[10]
    prof = g_profile(cap, x0, RADII)
    assert monotonicity_check(prof, 10 * cap.h)["pass"]


def test_profile_identity_residual_is_small_for_disk(disk):
    prof = g_profile(disk, np.array([0.3, 0.2, 0.0]), RADII)
    assert np.max(prof.identity_residual[1:]) < 1e-2


def test_large_radius_limit_counts_the_whole_surface(disk):
    # beyond every point the area ratio part of g vanishes like 1/r^2
    prof = g_profile(disk, np.zeros(3), [50.0, 100.0])
    assert abs(prof.sum[1] - prof.sum[0]) < 1e-3


def test_radii_must_increase(disk):
    with pytest.raises(ValueError):
        g_profile(disk, np.zeros(3), [0.5, 0.2])
    with pytest.raises(ValueError):
        g_profile(disk, np.zeros(3), [-0.1, 0.2])


def test_density_one_at_interior_points(disk, cap):
    for d, x0 in ((disk, np.array([0.2, -0.1, 0.0])), (cap, cap.mesh.vertices[0])):
        assert tilde_density(d, x0).estimate == pytest.approx(1.0, abs=0.02)


def test_density_at_boundary_is_one_after_reflection(disk):
    assert tilde_density(disk, np.array([1.0, 0.0, 0.0])).estimate == pytest.approx(1.0, abs=0.03)


def test_density_zero_away_from_surface(disk):
    assert tilde_density(disk, np.array([0.2, 0.0, 0.5])).estimate == pytest.approx(0.0, abs=1e-9)


def test_double_disk_has_density_two():
    d = surface_data(geo.disk_pair(48))
    assert tilde_density(d, np.array([0.1, 0.2, 0.0])).estimate == pytest.approx(2.0, abs=0.05)


def test_plain_density_interior_and_boundary():
    d = surface_data(geo.flat_disk(128))
    # ladder radii stay inside the disk around the origin
    assert plain_density(d, np.zeros(3)).estimate == pytest.approx(1.0, abs=1e-9)
    # a boundary point sees a half disk
    assert plain_density(d, np.array([1.0, 0.0, 0.0])).estimate == pytest.approx(0.5, abs=0.02)


@given(st.floats(0.05, 0.4))
def test_density_ratio_on_flat_disk_interior(r):
    d = surface_data(geo.flat_disk(32))
    # ball fully inside the disk: mu(B_r)/(pi r^2) = 1 exactly, plus a reflected part
    x0 = np.array([0.05, 0.0, 0.0])
    val = density_ratio(d, x0, r)
    assert val >= 1.0 - 1e-9


def test_integral_identity_disk_origin(disk):
    I = integral_identity(disk, np.zeros(3))
    assert I["defect"] < 1e-2
    assert I["density"] == pytest.approx(1.0, abs=1e-2)


def test_integral_identity_cap_apex_refines():
    defects = []
    for n in (48, 96):
        d = surface_data(geo.spherical_cap(1.0, n))
        defects.append(integral_identity(d, d.mesh.vertices[0])["defect"])
    assert defects[1] < defects[0] < 5e-2
