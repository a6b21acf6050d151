"""
Rays: the constant falls like 1/sqrt(n) but never vanishes
============================================================

A unit-weight ray, K = {0}.  The test set U is the single vertex at distance
n.  The best constant is the energy of the straight ramp from 0 to 1, so
C = 1/sqrt(n) exactly, whatever the truncation length.
"""
import math

from gblab import nonparabolicity_constant, probe_decay, ray

for n in (1, 2, 4, 8, 16, 32):
    rep = nonparabolicity_constant(ray(2 * n + 4), [0], ([n], []))
    print(f"n={n:3d}  C={rep.C:.12f}  1/sqrt(n)={1 / math.sqrt(n):.12f}")

# The default probe watches the first edge past K instead, and C stays 1 at
# every truncation radius: rays pass.
for rep in probe_decay("star-like", range(4, 10)):
    print(rep.radius, rep.M, round(rep.C, 12), rep.verdict)
