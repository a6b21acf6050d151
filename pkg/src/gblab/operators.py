"""The difference operator d, the coboundary delta and the Gauss-Bonnet operator D.

``delta`` has two independent implementations: the sparse triple product
``C^-1 B^T R`` (fast path, used by the spectral code) and a direct summation
over incoming oriented edges (``method="sum"``).  The residual helpers below
evaluate the algebraic identities edge- or vertex-wise so that tests and the
``identities`` command can report how far from exact they are.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse

from .cochains import (
    Cochain0,
    Cochain1,
    Cutoff,
    Section,
    cutoff,
    inner0,
    inner1,
    mean_value,
    norm0,
    norm1,
    same_graph,
)
from .graph import WeightedGraph

__all__ = [
    "OperatorMatrices",
    "operator_matrices",
    "d",
    "delta",
    "gauss_bonnet",
    "check_adjointness",
    "adjointness_bound",
    "derivation_d",
    "derivation_delta",
    "commutator_chi_d",
    "commutator_chi_delta",
    "commutator_chi_d_direct",
    "commutator_chi_delta_direct",
]


@dataclass(frozen=True)
class OperatorMatrices:
    incidence: sparse.csr_matrix
    C: sparse.dia_matrix
    R: sparse.dia_matrix

    @property
    def d(self) -> sparse.csr_matrix:
        return self.incidence

    @cached_property
    def delta(self) -> sparse.csr_matrix:
        cinv = sparse.diags(1.0 / self.C.diagonal())
        return (cinv @ self.incidence.T @ self.R).tocsr()

    def dirac(self) -> sparse.csr_matrix:
        """Block matrix of D acting on ``[f; phi]`` coordinates."""
        return sparse.bmat([[None, self.delta], [self.incidence, None]], format="csr")

    def metric(self) -> np.ndarray:
        return np.concatenate([self.C.diagonal(), self.R.diagonal()])


@lru_cache(maxsize=64)
def _matrices(g: WeightedGraph) -> OperatorMatrices:
    return OperatorMatrices(g.incidence, sparse.diags(g.c), sparse.diags(g.r))


def operator_matrices(g: WeightedGraph) -> OperatorMatrices:
    return _matrices(g)


def d(f: Cochain0) -> Cochain1:
    """``df(e) = f(e+) - f(e-)``."""
    g = f.graph
    return Cochain1(g, f.values[g.head] - f.values[g.tail])


def _delta_sum(phi: Cochain1) -> np.ndarray:
    g = phi.graph
    out = np.zeros(g.n_vertices)
    for x in range(g.n_vertices):
        acc = 0.0
        # edges with e+ = x are the reverses of the edges leaving x
        for _, j, sign in g.adjacency[x]:
            acc += g.r[j] * (-sign) * phi.values[j]
        out[x] = acc / g.c[x]
    return out


def delta(phi: Cochain1, *, method: str = "matrix") -> Cochain0:
    """Coboundary ``delta phi(x) = (1/c(x)) sum_{e+ = x} r(e) phi(e)``."""
    g = phi.graph
    if method == "sum":
        return Cochain0(g, _delta_sum(phi))
    if method != "matrix":
        raise ValueError(f"unknown method {method!r}")
    return Cochain0(g, operator_matrices(g).delta @ phi.values)


def gauss_bonnet(s: Section) -> Section:
    """``D(f, phi) = (delta phi, df)``."""
    return Section(delta(s.phi), d(s.f))


def check_adjointness(f: Cochain0, phi: Cochain1) -> float:
    """``|<df, phi>_E - <f, delta phi>_V|``."""
    same_graph(f, phi)
    return abs(inner1(d(f), phi) - inner0(f, delta(phi)))


def adjointness_bound(f: Cochain0, phi: Cochain1) -> float:
    return 1e-12 * (1.0 + norm0(f) * norm1(phi))


def derivation_d(f: Cochain0, g_: Cochain0) -> np.ndarray:
    """Residual of ``d(fg)(e) = f(e+) dg(e) + g(e-) df(e)`` on both orientations.

    Returns an array of length ``2 * n_edges`` (canonical edges first).
    """
    g = same_graph(f, g_)
    tails = np.concatenate([g.tail, g.head])
    heads = np.concatenate([g.head, g.tail])
    fv, gv = f.values, g_.values
    lhs = fv[heads] * gv[heads] - fv[tails] * gv[tails]
    rhs = fv[heads] * (gv[heads] - gv[tails]) + gv[tails] * (fv[heads] - fv[tails])
    return lhs - rhs


def derivation_delta(f: Cochain0, phi: Cochain1) -> np.ndarray:
    """Vertexwise residual of the product rule for ``delta(fbar phi)``."""
    g = same_graph(f, phi)
    lhs = delta(Cochain1(g, mean_value(f) * phi.values), method="sum").values
    tails, heads, phi_or = phi.oriented_values()
    df_or = f.values[heads] - f.values[tails]
    corr = np.zeros(g.n_vertices)
    np.add.at(corr, heads, np.concatenate([g.r, g.r]) * df_or * phi_or)
    rhs = f.values * delta(phi).values - corr / (2.0 * g.c)
    return lhs - rhs


def _as_cutoff(g, K) -> Cutoff:
    return K if isinstance(K, Cutoff) else cutoff(g, K)


def commutator_chi_d(K, f: Cochain0) -> Cochain1:
    """Closed form ``[chi, d] f(e) = -1/2 dchi(e) df(e) - f(e-) dchi(e)``."""
    g = f.graph
    cut = _as_cutoff(g, K)
    same_graph(cut.chi, f)
    dchi = cut.dchi.values
    return Cochain1(g, -0.5 * dchi * d(f).values - f.values[g.tail] * dchi)


def commutator_chi_d_direct(K, f: Cochain0) -> Cochain1:
    """``chibar * df - d(chi f)`` evaluated from the definitions."""
    g = f.graph
    cut = _as_cutoff(g, K)
    return Cochain1(g, cut.chibar * d(f).values) - d(cut.chi * f)


def commutator_chi_delta(K, phi: Cochain1) -> Cochain0:
    """Closed form ``[chi, delta] phi(x) = (1/2c(x)) sum_{e+ = x} r(e) dchi(e) phi(e)``."""
    g = phi.graph
    cut = _as_cutoff(g, K)
    same_graph(cut.chi, phi)
    tails, heads, phi_or = phi.oriented_values()
    _, _, dchi_or = cut.dchi.oriented_values()
    out = np.zeros(g.n_vertices)
    np.add.at(out, heads, np.concatenate([g.r, g.r]) * dchi_or * phi_or)
    return Cochain0(g, out / (2.0 * g.c))


def commutator_chi_delta_direct(K, phi: Cochain1) -> Cochain0:
    """``chi * delta(phi) - delta(chibar phi)`` evaluated from the definitions."""
    g = phi.graph
    cut = _as_cutoff(g, K)
    return cut.chi * delta(phi) - delta(Cochain1(g, cut.chibar * phi.values), method="sum")
