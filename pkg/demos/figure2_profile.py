"""Difference profile of one Brownian LPP sample.

Samples a field at n = 500, computes Z_n(z) = W_n(1, z) - W_n(-1, z) on [-2, 2],
and prints where it moves.  Z_n is non-decreasing and flat away from a sparse set.
"""
import numpy as np

from alpp.fractal import mesh_reports
from alpp.profile import diff_profile, uniform_zgrid
from alpp.scale import sample_scaled_field

n, M = 500, 2.0
zs = uniform_zgrid(M + 0.25, 0.01)
field = sample_scaled_field(n, n ** (-1 / 3), [-1.0, 1.0], [-M - 0.25, M + 0.25], seed=7)
p = diff_profile(field, n, zs)

steps = np.flatnonzero(np.diff(p.values) > p.tol)
print(f"Z_n ranges over [{p.values.min():.3f}, {p.values.max():.3f}]")
print(f"{steps.size} of {zs.size - 1} grid steps carry an increase")
for rep in mesh_reports(p, [2.0 ** -k for k in range(2, 6)], M):
    print(f"eps = {rep.eps:<8g} marked {rep.count:3d} of {rep.total} mesh intervals")
