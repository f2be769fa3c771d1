import numpy as np
import pytest

from freebound import geometry as geo
from freebound.optimizer import (OptimizerConfig, finite_difference_check, minimize, objective_and_gradient,
                                 resample, roundness)

TWO_PI = 2 * np.pi


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_gradient_matches_central_differences(p):
    assert finite_difference_check(geo.fourier_random(24, 7), p) < 1e-5


def test_objective_agrees_with_energy_module():
    from freebound.tangent_point import curve_energy
    c = geo.trefoil(64)
    f, _ = objective_and_gradient(c, 2.0, with_gradient=False)
    assert f == pytest.approx(curve_energy(c, (2.0,)).normalized_ep[2.0], rel=1e-12)


def test_gradient_is_scale_covariant():
    c = geo.fourier_random(32, 1)
    _, g = objective_and_gradient(c, 2.0)
    _, g2 = objective_and_gradient(c.transformed(scale=3.0), 2.0)
    assert np.allclose(g2, g / 3.0, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("kw", [dict(p=1.0), dict(p=9.0), dict(shrink=1.0), dict(initial_step=0.0),
                                dict(resample_every=-1), dict(max_backtracks=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        OptimizerConfig(**kw).validate()


def test_circle_converges_immediately():
    tr = minimize(geo.circle(64))
    assert tr.converged and tr.iterations <= 1


def test_short_run_decreases_monotonically():
    tr = minimize(geo.perturbed_circle(64, 0.2, 3), OptimizerConfig(max_iters=60, resample_every=20))
    obj = np.array(tr.objective)
    assert np.all(np.diff(obj) <= 0)
    assert obj[-1] < obj[0]
    assert len(tr.resamples) >= 1
    assert tr.rows()[0][0] == 0 and len(tr.rows()) == len(obj)


def test_resample_uniform_arclength():
    c = resample(geo.perturbed_circle(64, 0.3, 2))
    e = c.edge_lengths()
    assert np.max(e) / np.min(e) < 1.05


def test_roundness():
    assert roundness(geo.circle(40)) == pytest.approx(1.0)
    assert roundness(geo.ellipse(40)) == pytest.approx(2.0, rel=1e-6)


def test_too_few_vertices():
    with pytest.raises(ValueError):
        objective_and_gradient(geo.circle(6))
