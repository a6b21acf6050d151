"""
Classical capacity: Z is parabolic, Z^3 is not
==============================================

cap(o, N) is the Dirichlet energy of the harmonic function that is 1 at o
and 0 outside the ball of radius N.  On Z it is 2/N.  On Z^3 it levels off.
Neither fact says anything about the Dirac-operator probe: Z passes it and
Z^3 fails it, because of cycles.
"""
from gblab import classical_capacity, grid, probe_decay, zline

z = zline(70)
g3 = grid(3, 21)
print(" N   cap on Z   cap on Z^3")
for N in (1, 2, 4, 8, 16, 32, 64):
    c3 = classical_capacity(g3, g3.origin, N) if N <= 9 else float("nan")
    print(f"{N:3d}  {classical_capacity(z, z.origin, N):.6f}  {c3:.6f}")

print([r.verdict for r in probe_decay("zline", range(4, 9))])
print([r.verdict for r in probe_decay("grid3", range(5, 7))])
