"""
Binary trees: a splitting flow that leaks less and less
========================================================

Send +1 into one child of the root and -1 into another, then halve the flow
at each generation.  Cut it off after M generations.  Only the 2^(M+1) leaf
vertices see delta(phi), each 2^-M, so the ratio ||D phi|| / ||phi||_U is
2^(-M/2) and goes to zero.
"""
from gblab import dary_tree, probe_decay, triadic_witness

g = dary_tree(2, 12)
for M in range(1, 11):
    phi, diag = triadic_witness(g, 0, M)
    print(f"M={M:2d}  ratio={diag['ratio']:.6e}  2^(-M/2)={2 ** (-M / 2):.6e}  leaks at {diag['leak_vertices']} vertices")

# The probe finds the same decay on its own.
reps = probe_decay("triadic", range(3, 11))
for r in reps:
    print(r.radius, r.M, f"{r.C:.6f}")
print("fitted log2 slope", round(reps[0].slope, 3), "verdict", reps[0].verdict)

# Three children per vertex: the flow thins by a third, ratio 3^(-M/2).
t = dary_tree(3, 7)
for M in range(1, 6):
    print("b=3", M, triadic_witness(t, 0, M)[1]["ratio"], 3 ** (-M / 2))
