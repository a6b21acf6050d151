"""Cochains on a weighted graph and the weighted l2 structure.

0-cochains are dense vectors over vertices.  1-cochains are dense vectors over
canonical edges; evaluating on the reversed orientation returns the negated
value, so skew-symmetry holds by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphMismatch
from .graph import OrientedEdge, Region, WeightedGraph

__all__ = [
    "Cochain0",
    "Cochain1",
    "Section",
    "Cutoff",
    "inner0",
    "norm0",
    "inner1",
    "norm1",
    "inner_section",
    "norm_section",
    "norm_on",
    "mean_value",
    "cutoff",
    "multiply",
    "same_graph",
]


def same_graph(*objs) -> WeightedGraph:
    g = objs[0].graph
    for o in objs[1:]:
        if o.graph is not g:
            raise GraphMismatch("operands live on different graphs")
    return g


class _Cochain:
    __slots__ = ("graph", "values")
    _size_attr = ""

    def __init__(self, graph: WeightedGraph, values=None):
        size = getattr(graph, self._size_attr)
        if values is None:
            arr = np.zeros(size)
        else:
            arr = np.array(values, dtype=float)
            if arr.shape != (size,):
                raise ValueError(f"expected {size} values, got shape {arr.shape}")
        self.graph = graph
        self.values = arr

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values).astype(np.intp)

    def copy(self):
        return type(self)(self.graph, self.values)

    def _wrap(self, other, op):
        if isinstance(other, _Cochain):
            if type(other) is not type(self):
                return NotImplemented
            same_graph(self, other)
            return type(self)(self.graph, op(self.values, other.values))
        return type(self)(self.graph, op(self.values, other))

    def __add__(self, other):
        return self._wrap(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(other, np.subtract)

    def __rsub__(self, other):
        return self._wrap(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._wrap(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(other, np.divide)

    def __neg__(self):
        return type(self)(self.graph, -self.values)

    def __repr__(self):
        return f"{type(self).__name__}({self.values!r})"


class Cochain0(_Cochain):
    """Real function on vertices."""

    __slots__ = ()
    _size_attr = "n_vertices"

    @classmethod
    def indicator(cls, graph, vertices):
        f = cls(graph)
        f.values[graph.vertex_set(vertices)] = 1.0
        return f

    def __call__(self, x: int) -> float:
        return float(self.values[self.graph.check_vertex(x)])


class Cochain1(_Cochain):
    """Skew-symmetric function on oriented edges, stored on canonical edges."""

    __slots__ = ()
    _size_attr = "n_edges"

    def at(self, tail: int, head: int) -> float:
        j, sign = self.graph.edge_index(tail, head)
        return sign * float(self.values[j])

    def __call__(self, e) -> float:
        if isinstance(e, (OrientedEdge, tuple, list)):
            return self.at(e[0], e[1])
        return float(self.values[int(e)])

    def oriented_values(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(tails, heads, values)`` over both orientations of every edge."""
        g = self.graph
        return (
            np.concatenate([g.tail, g.head]),
            np.concatenate([g.head, g.tail]),
            np.concatenate([self.values, -self.values]),
        )


@dataclass
class Section:
    """A pair ``(f, phi)`` in ``l2(V) + l2(E)``."""

    f: Cochain0
    phi: Cochain1

    def __post_init__(self):
        same_graph(self.f, self.phi)

    @property
    def graph(self) -> WeightedGraph:
        return self.f.graph

    @classmethod
    def zeros(cls, graph):
        return cls(Cochain0(graph), Cochain1(graph))

    @classmethod
    def from_vector(cls, graph, vec):
        vec = np.asarray(vec, dtype=float)
        n = graph.n_vertices
        return cls(Cochain0(graph, vec[:n]), Cochain1(graph, vec[n:]))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.f.values, self.phi.values])

    def __add__(self, other):
        return Section(self.f + other.f, self.phi + other.phi)

    def __sub__(self, other):
        return Section(self.f - other.f, self.phi - other.phi)

    def __mul__(self, s):
        return Section(self.f * s, self.phi * s)

    __rmul__ = __mul__

    def __neg__(self):
        return Section(-self.f, -self.phi)


def inner0(f: Cochain0, g: Cochain0) -> float:
    same_graph(f, g)
    return float(np.dot(f.graph.c * f.values, g.values))


def norm0(f: Cochain0) -> float:
    return float(np.sqrt(inner0(f, f)))


def inner1(phi: Cochain1, psi: Cochain1) -> float:
    # half-sum over both orientations == one sum over canonical edges
    same_graph(phi, psi)
    return float(np.dot(phi.graph.r * phi.values, psi.values))


def norm1(phi: Cochain1) -> float:
    return float(np.sqrt(inner1(phi, phi)))


def inner_section(s: Section, t: Section) -> float:
    return inner0(s.f, t.f) + inner1(s.phi, t.phi)


def norm_section(s: Section) -> float:
    return float(np.sqrt(inner0(s.f, s.f) + inner1(s.phi, s.phi)))


def norm_on(s: Section, U: Region) -> float:
    """Seminorm of ``s`` restricted to the couple ``U = (V_U, E_U)``."""
    g = s.graph
    v = g.vertex_set(U.vertices)
    e = g.edge_set(U.edges)
    total = np.dot(g.c[v], s.f.values[v] ** 2) + np.dot(g.r[e], s.phi.values[e] ** 2)
    return float(np.sqrt(total))


def mean_value(f: Cochain0) -> np.ndarray:
    """Symmetric edge function ``(f(e+) + f(e-)) / 2`` on canonical edges."""
    g = f.graph
    return 0.5 * (f.values[g.head] + f.values[g.tail])


@dataclass(frozen=True)
class Cutoff:
    """Indicator ``chi`` of the complement of a finite vertex set ``K``.

    ``chibar`` is the mean value of ``chi`` (0 on ``E_K``, 1/2 on the edge
    boundary, 1 elsewhere) and ``dchi`` its difference, supported on the edge
    boundary of ``K``.  ``complement`` flips to ``1 - chi``.
    """

    K: np.ndarray
    chi: Cochain0
    dchi: Cochain1
    chibar: np.ndarray
    complement: bool = False

    @property
    def graph(self):
        return self.chi.graph

    def flipped(self) -> "Cutoff":
        return Cutoff(self.K, 1.0 - self.chi, -self.dchi, 1.0 - self.chibar, not self.complement)


def cutoff(g: WeightedGraph, K) -> Cutoff:
    K = g.vertex_set(K)
    chi = Cochain0(g, np.ones(g.n_vertices))
    chi.values[K] = 0.0
    dchi = Cochain1(g, chi.values[g.head] - chi.values[g.tail])
    return Cutoff(K, chi, dchi, mean_value(chi))


def multiply(cut: Cutoff, s: Section, *, complement: bool = False) -> Section:
    """``chi.(f, phi) = (chi f, chibar phi)``; ``complement`` uses ``1 - chi``."""
    same_graph(cut.chi, s.f)
    c = cut.flipped() if complement else cut
    return Section(Cochain0(s.graph, c.chi.values * s.f.values), Cochain1(s.graph, c.chibar * s.phi.values))

