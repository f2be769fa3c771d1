"""Ball curvature of a support surface.

Z(x, y) is the curvature of the sphere tangent to S at x that passes
through y.  On the unit sphere every such sphere is S itself, so Z = 1.  On
an ellipsoid the supremum over pairs recovers the largest principal
curvature, and the support-surface inequality
2 pi <= (1/4) int |H|^2 + int kappa_bar dsigma
picks up a strict margin for a planar elliptic disk.
"""

import numpy as np

from freebound import geometry as geo
from freebound.support import Ellipsoid, Sphere, SupportSurface, ball_curvatures, support_inequality_check

S = SupportSurface.from_descriptor(Sphere(), 1000)
rep = ball_curvatures(S, diagonal=False)
print(f"unit sphere: kappa_bar in [{rep.kappa_bar.min():.15f}, {rep.kappa_bar.max():.15f}]")

for n in (1000, 4000, 10_000):
    E = SupportSurface.from_descriptor(Ellipsoid(2.0, 1.0, 1.0), n)
    rep = ball_curvatures(E, diagonal=False)
    print(f"ellipsoid (2,1,1), {n:6d} samples: sup kappa_bar = {rep.sup_kappa_bar:.5f} (max curvature 2)")

for name, mesh, support in [("disk / unit sphere", geo.flat_disk(96), Sphere()),
                            ("cap / unit sphere", geo.spherical_cap(1.0, 96), Sphere()),
                            ("elliptic disk / ellipsoid", geo.elliptic_disk(96), Ellipsoid(2.0, 1.0, 1.0))]:
    chk = support_inequality_check(mesh, support)
    print(f"{name:>26}: (1/4)int|H|^2 + int kappa_bar = {chk['measured']:.5f}, margin {chk['margin']:+.5f}")
