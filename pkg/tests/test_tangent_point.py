import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freebound import geometry as geo
from freebound.tangent_point import (pointwise_check, pointwise_integrals, curve_energy, energy, kernel_matrix,
                                     menger_curvature, near_mask, normalized_energy, tangent_point_radius)

TWO_PI = 2 * np.pi


@given(st.floats(0.1, 10.0), st.floats(0.1, 2 * np.pi - 0.1))
def test_tangent_point_radius_on_a_circle(R, t):
    # the circle through x tangent to t_x and through y is the circle itself
    x = np.array([R, 0.0, 0.0])
    y = R * np.array([np.cos(t), np.sin(t), 0.0])
    assert tangent_point_radius(x, np.array([0.0, 1.0, 0.0]), y) == pytest.approx(R, rel=1e-9)


def test_tangent_point_radius_edge_cases():
    assert tangent_point_radius(np.zeros(3), np.array([1.0, 0, 0]), np.array([2.0, 0, 0])) == np.inf
    with pytest.raises(ValueError):
        tangent_point_radius(np.zeros(3), np.array([1.0, 0, 0]), np.zeros(3))


def test_menger_curvature_is_exact_on_polygons():
    assert np.allclose(menger_curvature(geo.circle(17, 2.5).vertices), 1 / 2.5)


def test_near_mask_band():
    m = near_mask(8)
    assert m.sum() == 24
    assert m[0, 7] and m[7, 0] and not m[0, 2]


def test_kernel_needs_eight_vertices():
    with pytest.raises(ValueError):
        kernel_matrix(geo.circle(7))


def test_kernel_independent_of_workers():
    c = geo.fourier_random(300, 2)
    assert np.array_equal(kernel_matrix(c, workers=1, block=64), kernel_matrix(c, workers=4, block=64))


def test_circle_energies():
    rep = curve_energy(geo.circle(512), (1.5, 2.0, 3.0, 4.0))
    assert rep.e1 == pytest.approx(4 * np.pi ** 2, rel=2e-3)
    for v in rep.normalized_ep.values():
        assert v == pytest.approx(TWO_PI, rel=2e-3)
    assert all(v["pass"] for v in rep.verdicts)


def test_ellipse_equality_and_strictness():
    rep = curve_energy(geo.ellipse(512), (2.0,))
    assert rep.e1 == pytest.approx(TWO_PI * rep.length, rel=5e-3)
    assert rep.normalized_ep[2.0] > TWO_PI + 0.05


@given(st.floats(0.2, 5.0), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_energy_scaling_law(lam, p):
    c = geo.fourier_random(64, 1)
    e, eb = energy(c, p), energy(c.transformed(scale=lam), p)
    assert eb == pytest.approx(lam ** (2 - p) * e, rel=1e-10)
    assert normalized_energy(eb, lam * c.length(), p) == pytest.approx(normalized_energy(e, c.length(), p), rel=1e-10)


@given(st.integers(0, 1000))
def test_energy_rotation_and_translation_invariance(seed):
    c = geo.fourier_random(64, 5)
    Q = geo.random_rotation(seed)
    moved = c.transformed(Q, shift=(1.0, -2.0, 0.5))
    assert energy(moved, 2.0) == pytest.approx(energy(c, 2.0), rel=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_random_curves_satisfy_both_inequalities(seed):
    rep = curve_energy(geo.fourier_random(128, seed), (1.5, 2.0, 4.0))
    assert all(v["pass"] for v in rep.verdicts)


def test_p_out_of_range():
    with pytest.raises(ValueError):
        curve_energy(geo.circle(32), (1.0,))
    with pytest.raises(ValueError):
        curve_energy(geo.circle(32), (9.0,))


def test_per_point_integral_sums_to_e1():
    c = geo.trefoil(128)
    rep = curve_energy(c)
    assert np.dot(c.dual_lengths(), rep.per_point_integral) == pytest.approx(rep.e1, rel=1e-12)


def test_pointwise_integrals_on_ellipse():
    c = geo.ellipse(256)
    w, dual = pointwise_integrals(c, 0)
    assert w == pytest.approx(TWO_PI, abs=10 / 256)
    chk = pointwise_check(c, equality_tol=10 / 256)
    assert chk["pass"] and chk["equality"]
    with pytest.raises(IndexError):
        pointwise_integrals(c, 256)


def test_pointwise_strict_on_trefoil():
    chk = pointwise_check(geo.trefoil(256), equality_tol=10 / 256)
    assert chk["pass"] and not chk["equality"]
