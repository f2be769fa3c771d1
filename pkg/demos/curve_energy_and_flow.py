"""Tangent-point energies of closed curves and a descent toward the circle.

The normalized energy E_p^(1/p) L^(1-2/p) is at least 2 pi for every closed
curve, with equality for round circles.  We evaluate it on a few shapes and
then run backtracking gradient descent from a wobbly circle.  The objective
falls toward 2 pi and the curve rounds out.
"""

import numpy as np

from freebound import geometry as geo
from freebound.optimizer import OptimizerConfig, minimize, roundness
from freebound.tangent_point import curve_energy

TWO_PI = 2 * np.pi

for name, c in [("circle", geo.circle(512)), ("ellipse 2:1", geo.ellipse(512)), ("trefoil", geo.trefoil(512)),
                ("random seed 0", geo.fourier_random(256, 0))]:
    rep = curve_energy(c, (2.0, 4.0))
    print(f"{name:>14}: E_1/(2pi L) = {rep.e1 / (TWO_PI * rep.length):.4f}, "
          f"normalized E_2 = {rep.normalized_ep[2.0]:.4f}, E_4 = {rep.normalized_ep[4.0]:.4f}")

start = geo.perturbed_circle(128, 0.2, 4)
checkpoints = {0, 10, 50, 100, 250, 500, 1000}


def report(it, f, curve):
    if it in checkpoints:
        print(f"iter {it:5d}: objective {f:.6f} (gap {f - TWO_PI:.2e}), roundness {roundness(curve):.4f}")


print(f"\nstart: roundness {roundness(start):.4f}")
trace = minimize(start, OptimizerConfig(p=2.0, max_iters=1000), callback=report)
print(f"{trace.message}: final objective {trace.objective[-1]:.6f}, 2 pi = {TWO_PI:.6f}")
