"""
Which exponent sets are allowed
===============================

Solve the vanishing-moment conditions on exponential families and inspect
the linear system that a horizontal lift must satisfy.
"""

import numpy as np

from hpminimal import constraint_scan
from hpminimal.scan import vandermonde_full_rank

##############################################################################
# Two exponents
# -------------
#
# With ``n = 1`` and two exponents the only solution is an antipodal pair
# with equal weights.

rep = constraint_scan(1, 1, trials=10)
for case in rep.cases:
    print("angles", np.round(case.thetas, 6), "weights", np.round(case.weights, 6))

##############################################################################
# Roots of unity
# --------------
#
# At the ``2n + 2``-th roots of unity the cyclic relation produces an
# alternating diagonal.

for n in (1, 2):
    m = 2 * n + 1
    rep = constraint_scan(n, m, thetas=np.pi / (n + 1) * np.arange(m + 1))
    cyc = rep.cases[0].cyclic
    print(f"n={n}: diagonal {np.round(cyc.w12.real, 6)}  alternating={cyc.alternating}"
          f"  consistent={rep.cases[0].consistent}")

##############################################################################
# Odd powers
# ----------
#
# The homogeneous odd-power system in random distinct exponents has only
# the trivial solution once there are enough rows.

rng = np.random.default_rng(1)
hits = sum(vandermonde_full_rank(p, q, rng) for p in range(1, 8) for q in range(p // 2, p + 2))
print("full column rank in", hits, "of", sum(len(range(p // 2, p + 2)) for p in range(1, 8)), "draws")
