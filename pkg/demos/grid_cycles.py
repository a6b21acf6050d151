"""
Square grids: flows around a square cost nothing
================================================

A 1-cochain going once around a unit square has delta(phi) = 0, and such
squares exist arbitrarily far from any finite K.  The probe does not have
to search for them: it counts them with Euler's formula and reports an
exact zero.
"""
import numpy as np

from gblab import ball, delta, delta_kernel_outside, grid, nonparabolicity_constant, place_U

for side in (7, 11, 15, 21):
    g = grid(2, side)
    K = ball(g, g.origin, 2)
    rep = nonparabolicity_constant(g, K, place_U(g, K))
    dim, basis = delta_kernel_outside(g, K)
    worst = max(np.abs(delta(b).values).max() for b in basis)
    print(f"{side}x{side}: C={rep.C}  kernel_dim={rep.kernel_dim}  cycles={dim}  max|delta|={worst:.1e}")
