"""
The algebra, checked numerically
================================

d and delta are adjoint, D is symmetric, the two ways of computing delta
agree, and cutting off by the indicator of the complement of K commutes
with d and delta up to terms living on the edge boundary of K.
"""
import numpy as np

from gblab import (
    Cochain0,
    Cochain1,
    ball,
    build_graph,
    check_adjointness,
    combinatorial_neighborhood,
    commutator_chi_d,
    commutator_chi_delta,
    delta,
    grid,
)

rng = np.random.default_rng(7)
g0 = grid(2, 9)
# same grid, random positive weights
g = build_graph(rng.uniform(0.5, 2, g0.n_vertices),
                zip(g0.tail.tolist(), g0.head.tolist(), rng.uniform(0.5, 2, g0.n_edges).tolist()),
                labels=g0.labels, origin=g0.origin)

f = Cochain0(g, rng.standard_normal(g.n_vertices))
phi = Cochain1(g, rng.standard_normal(g.n_edges))
print("adjointness residual", check_adjointness(f, phi))
print("delta two ways", np.abs(delta(phi).values - delta(phi, method="sum").values).max())

K = ball(g, g.origin, 1)
nb = combinatorial_neighborhood(g, K)
cd, cl = commutator_chi_d(K, f), commutator_chi_delta(K, phi)
print("[chi, d] lives on", sorted(cd.support.tolist()), "inside", sorted(nb.edges.tolist()))
print("[chi, delta] lives on", sorted(cl.support.tolist()), "inside", sorted(nb.vertices.tolist()))
