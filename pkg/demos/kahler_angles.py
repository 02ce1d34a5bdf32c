"""
Kahler angles along a surface
=============================

Compare the angle functions of a totally real torus with those of a
holomorphic curve, and write the pointwise table the CLI exports.
"""

import numpy as np

from hpminimal import ClassifiedSurface, SurfaceMap, angles, gauss_curvature, make_classified
from hpminimal.report import CSV_COLUMNS, grid_table
from hpminimal.surface import Grid, jet_at

##############################################################################
# A totally real torus
# --------------------
#
# On the classified tori ``cos^2 alpha`` vanishes identically.

surface, _ = make_classified(ClassifiedSurface(2, "companion"))
rep = angles(jet_at(surface, surface.grid(5).points, 1))
print("max cos^2 alpha on the companion torus:", f"{np.max(rep.cos_sq_alpha):.1e}")

##############################################################################
# A holomorphic curve
# -------------------
#
# The curve ``(1, 0, z, 0)`` is complex, so ``cos^2 alpha`` is one and the
# Gauss curvature is positive.

curve = SurfaceMap.from_formula(lambda z, zb: [1, 0, z, 0], 4, cell=(-0.5, 0.5, -0.5, 0.5))
pts = Grid(-0.5, 0.5, -0.5, 0.5, 3, 3).points
print("cos^2 alpha on the curve:", np.round(angles(jet_at(curve, pts, 1)).cos_sq_alpha, 12))
print("Gauss curvature:", np.round(gauss_curvature(curve, pts), 6))

##############################################################################
# The pointwise table
# -------------------

print(",".join(CSV_COLUMNS))
for row in grid_table(surface, surface.grid(3)):
    print(",".join(f"{v:.6g}" for v in row))
