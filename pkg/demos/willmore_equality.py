"""Free-boundary surfaces in the unit ball and the 2 pi lower bound.

Flat disks through the origin and spherical caps that meet the unit sphere
at right angles all have Willmore energy exactly 2 pi.  We check this on
meshes of increasing resolution, then bump a cap and watch the energy rise
while the density bound 2 pi theta^2 <= W keeps holding.
"""

import numpy as np

from freebound import geometry as geo
from freebound.willmore import li_yau_check, willmore_energy

TWO_PI = 2 * np.pi

print("equality cases: W / 2pi by resolution")
print(f"{'fixture':>12} {'n=48':>10} {'n=96':>10} {'n=128':>10}")
for name, make in [("flat disk", geo.flat_disk),
                   ("cap r=0.5", lambda n: geo.spherical_cap(0.5, n)),
                   ("cap r=1", lambda n: geo.spherical_cap(1.0, n)),
                   ("cap r=2", lambda n: geo.spherical_cap(2.0, n))]:
    vals = [willmore_energy(make(n), search_density=False).willmore / TWO_PI for n in (48, 96, 128)]
    print(f"{name:>12} " + " ".join(f"{v:10.6f}" for v in vals))

# The disk gets all of its energy from the boundary term (H = 0), while the
# caps split it between (1/4) int |H|^2 and the boundary.
for name, mesh in [("flat disk", geo.flat_disk(96)), ("cap r=1", geo.spherical_cap(1.0, 96))]:
    rep = willmore_energy(mesh, search_density=False)
    print(f"{name}: (1/4) int |H|^2 = {rep.quarter_h2:.5f}, int x.eta = {rep.boundary_term:.5f}")

print("\nperturbed caps: strict inequality")
for seed in range(3):
    rep = willmore_energy(geo.seeded_perturbed_cap(seed, 64))
    chk = li_yau_check(rep)
    print(f"seed {seed}: W = {rep.willmore:.4f}, 2pi theta^2_max = {rep.li_yau_lhs:.4f}, "
          f"margin {chk['margin']:.4f}, equality defect {rep.equality_defect:.3f}")

# Two copies of the same disk: the density doubles and so does the energy.
rep = willmore_energy(geo.disk_pair(64))
print(f"\ndouble disk: theta^2_max = {rep.max_tilde_density:.4f}, W / 4pi = {rep.willmore / (2 * TWO_PI):.4f}")
