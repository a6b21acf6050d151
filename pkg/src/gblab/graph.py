"""Finite weighted graphs and the subgraph combinatorics used by the probes.

A :class:`WeightedGraph` is an immutable, connected, locally finite graph with
positive vertex weights ``c`` and symmetric positive edge weights ``r``.  Each
unoriented edge is stored once, in its canonical orientation ``tail -> head``;
the opposite orientation is implicit.  Infinite graphs are only ever seen
through finite truncations, so a graph may carry a *frontier*: the layer of
vertices whose neighbourhoods were cut off by the truncation.
"""
from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    Disconnected,
    DuplicateEdge,
    GraphError,
    LoopEdge,
    NonPositiveWeight,
    UnknownVertex,
)

__all__ = [
    "OrientedEdge",
    "Region",
    "WeightedGraph",
    "build_graph",
    "degree",
    "vertex_boundary",
    "edge_boundary",
    "induced_edges",
    "combinatorial_neighborhood",
    "is_neighborhood",
    "ball",
    "exhaustion",
    "bfs_distances",
    "shortest_path",
]


class OrientedEdge(NamedTuple):
    """An edge ``e`` with ``e- = tail`` and ``e+ = head``."""

    tail: int
    head: int
    canonical: bool = True

    def reverse(self) -> "OrientedEdge":
        return OrientedEdge(self.head, self.tail, not self.canonical)


class Region(NamedTuple):
    """A finite couple (vertex set, edge set); edges are canonical edge indices."""

    vertices: np.ndarray
    edges: np.ndarray


def _index_array(values) -> np.ndarray:
    arr = np.unique(np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.intp))
    return arr.astype(np.intp)


class WeightedGraph:
    """Immutable weighted graph ``(G, c, r)``; build it with :func:`build_graph`."""

    def __init__(self, c, tail, head, r, frontier=(), labels=None, origin=None, name=""):
        # trusted inputs only; validation lives in build_graph
        self.c = np.array(c, dtype=float)
        self.tail = np.array(tail, dtype=np.intp)
        self.head = np.array(head, dtype=np.intp)
        self.r = np.array(r, dtype=float)
        for arr in (self.c, self.tail, self.head, self.r):
            arr.setflags(write=False)
        n = self.c.size
        self.frontier = np.zeros(n, dtype=bool)
        self.frontier[list(frontier)] = True
        self.frontier.setflags(write=False)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self.origin = origin
        self.name = name
        self._edge_lookup = {}
        adjacency = [[] for _ in range(n)]
        for j, (t, h) in enumerate(zip(self.tail.tolist(), self.head.tolist())):
            self._edge_lookup[(t, h)] = (j, 1)
            self._edge_lookup[(h, t)] = (j, -1)
            adjacency[t].append((h, j, 1))
            adjacency[h].append((t, j, -1))
        # per vertex x: (neighbour y, canonical edge index, sign) for the oriented edge x -> y,
        # sign = +1 when x -> y is the canonical orientation
        self.adjacency = tuple(tuple(sorted(a)) for a in adjacency)

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return (
            f"<WeightedGraph{tag}: {self.n_vertices} vertices, {self.n_edges} edges, "
            f"{int(self.frontier.sum())} frontier>"
        )

    @property
    def n_vertices(self) -> int:
        return self.c.size

    @property
    def n_edges(self) -> int:
        return self.r.size

    @cached_property
    def label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index_of(self, label: Hashable) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            raise UnknownVertex(f"no vertex labelled {label!r}") from None

    def check_vertex(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.n_vertices:
            raise UnknownVertex(f"vertex {x} not in graph with {self.n_vertices} vertices")
        return x

    def edge(self, j: int) -> OrientedEdge:
        return OrientedEdge(int(self.tail[j]), int(self.head[j]), True)

    def edges(self) -> list[OrientedEdge]:
        return [self.edge(j) for j in range(self.n_edges)]

    def edge_index(self, tail: int, head: int) -> tuple[int, int]:
        """Return ``(canonical index, sign)`` of the oriented edge ``tail -> head``."""
        try:
            return self._edge_lookup[(int(tail), int(head))]
        except KeyError:
            raise GraphError(f"({tail}, {head}) is not an edge") from None

    def has_edge(self, u: int, v: int) -> bool:
        return (int(u), int(v)) in self._edge_lookup

    def neighbors(self, x: int) -> list[int]:
        return [y for y, _, _ in self.adjacency[self.check_vertex(x)]]

    def oriented_edges(self, x: int) -> list[OrientedEdge]:
        """All oriented edges ``e`` with ``e- = x``."""
        x = self.check_vertex(x)
        return [OrientedEdge(x, y, s > 0) for y, _, s in self.adjacency[x]]

    @cached_property
    def incidence(self) -> sparse.csr_matrix:
        """Signed incidence, rows = canonical edges, +1 at the head, -1 at the tail."""
        m, n = self.n_edges, self.n_vertices
        rows = np.repeat(np.arange(m), 2)
        cols = np.column_stack([self.head, self.tail]).ravel()
        vals = np.tile([1.0, -1.0], m)
        mat = sparse.csr_matrix((vals, (rows, cols)), shape=(m, n))
        return mat

    @cached_property
    def trusted_vertices(self) -> np.ndarray:
        """Mask of vertices whose full neighbourhood is present (not frontier)."""
        out = ~self.frontier
        out.setflags(write=False)
        return out

    @cached_property
    def trusted_edges(self) -> np.ndarray:
        """Mask of canonical edges with no frontier endpoint."""
        out = ~(self.frontier[self.tail] | self.frontier[self.head])
        out.setflags(write=False)
        return out

    def vertex_set(self, vertices: Iterable[int]) -> np.ndarray:
        arr = _index_array(vertices)
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n_vertices):
            raise UnknownVertex(f"vertex set {arr.tolist()} out of range")
        return arr

    def edge_set(self, edges: Iterable[int]) -> np.ndarray:
        arr = _index_array(edges)
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n_edges):
            raise GraphError(f"edge set {arr.tolist()} out of range")
        return arr

    def vertex_mask(self, vertices: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.vertex_set(vertices)] = True
        return mask

    def region(self, vertices=(), edges=()) -> Region:
        """Build a :class:`Region`; ``edges`` may mix indices and ``(u, v)`` pairs."""
        idx = []
        for e in edges:
            if isinstance(e, (tuple, list, OrientedEdge)):
                idx.append(self.edge_index(e[0], e[1])[0])
            else:
                idx.append(int(e))
        return Region(self.vertex_set(vertices), self.edge_set(idx))


def build_graph(
    vertex_weights: Sequence[float],
    edges: Iterable[tuple[int, int, float]],
    *,
    frontier: Iterable[int] = (),
    labels: Sequence[Hashable] | None = None,
    origin: int | None = None,
    name: str = "",
) -> WeightedGraph:
    """Validate and build a weighted graph.

    ``edges`` holds ``(tail, head, r)`` triples; the orientation given is kept as
    the canonical one.  Raises :class:`NonPositiveWeight`, :class:`LoopEdge`,
    :class:`DuplicateEdge`, :class:`UnknownVertex` or :class:`Disconnected`.
    """
    c = np.asarray(vertex_weights, dtype=float).ravel()
    n = c.size
    if n == 0:
        raise GraphError("graph needs at least one vertex")
    bad = np.flatnonzero(~(np.isfinite(c) & (c > 0)))
    if bad.size:
        raise NonPositiveWeight(f"vertex weight c({bad[0]}) = {c[bad[0]]} is not in ]0, inf[")
    tails, heads, rs = [], [], []
    seen = set()
    for item in edges:
        t, h, w = item
        t, h, w = int(t), int(h), float(w)
        for v in (t, h):
            if not 0 <= v < n:
                raise UnknownVertex(f"edge ({t}, {h}) references unknown vertex {v}")
        if t == h:
            raise LoopEdge(f"loop at vertex {t}")
        if not (np.isfinite(w) and w > 0):
            raise NonPositiveWeight(f"edge weight r({t}, {h}) = {w} is not in ]0, inf[")
        key = (min(t, h), max(t, h))
        if key in seen:
            raise DuplicateEdge(f"edge {key} given twice")
        seen.add(key)
        tails.append(t)
        heads.append(h)
        rs.append(w)
    if labels is not None and len(labels) != n:
        raise GraphError(f"{len(labels)} labels for {n} vertices")
    if labels is not None and len(set(labels)) != n:
        raise GraphError("vertex labels must be unique")
    g = WeightedGraph(c, tails, heads, rs, frontier=(), labels=labels, origin=origin, name=name)
    fr = g.vertex_set(frontier)
    if fr.size:
        g = WeightedGraph(c, tails, heads, rs, frontier=fr, labels=labels, origin=origin, name=name)
    if origin is not None:
        g.check_vertex(origin)
    dist = bfs_distances(g, 0)
    if np.any(dist < 0):
        missing = int(np.flatnonzero(dist < 0)[0])
        raise Disconnected(f"vertex {missing} is not reachable from vertex 0")
    return g


def degree(g: WeightedGraph, x: int) -> int:
    """Number of oriented edges leaving ``x``."""
    return len(g.adjacency[g.check_vertex(x)])


def vertex_boundary(g: WeightedGraph, K) -> np.ndarray:
    """Vertices outside ``K`` adjacent to some vertex of ``K``."""
    inside = g.vertex_mask(K)
    t, h = g.tail, g.head
    hit = np.zeros(g.n_vertices, dtype=bool)
    hit[h[inside[t] & ~inside[h]]] = True
    hit[t[inside[h] & ~inside[t]]] = True
    return np.flatnonzero(hit).astype(np.intp)


def edge_boundary(g: WeightedGraph, K) -> np.ndarray:
    """Canonical edges with exactly one endpoint in ``K``."""
    inside = g.vertex_mask(K)
    return np.flatnonzero(inside[g.tail] != inside[g.head]).astype(np.intp)


def induced_edges(g: WeightedGraph, K) -> np.ndarray:
    """``E_K``: canonical edges with both endpoints in ``K``."""
    inside = g.vertex_mask(K)
    return np.flatnonzero(inside[g.tail] & inside[g.head]).astype(np.intp)


def combinatorial_neighborhood(g: WeightedGraph, K) -> Region:
    """Smallest neighbourhood of ``G_K``: vertices ``K + dK``, edges ``E_K + dE_K``."""
    K = g.vertex_set(K)
    verts = np.union1d(K, vertex_boundary(g, K)).astype(np.intp)
    edges = np.union1d(induced_edges(g, K), edge_boundary(g, K)).astype(np.intp)
    return Region(verts, edges)


def is_neighborhood(g: WeightedGraph, K, nbhd: Region) -> bool:
    """Check the three neighbourhood conditions of ``nbhd`` around ``G_K``."""
    K = g.vertex_set(K)
    verts = set(g.vertex_set(nbhd.vertices).tolist())
    edges = set(g.edge_set(nbhd.edges).tolist())
    if not set(K.tolist()) <= verts:
        return False
    needed = set(induced_edges(g, K).tolist()) | set(edge_boundary(g, K).tolist())
    if not needed <= edges:
        return False
    return all(int(g.tail[j]) in verts and int(g.head[j]) in verts for j in edges)


def bfs_distances(g: WeightedGraph, source, *, within=None) -> np.ndarray:
    """Hop distances from ``source`` (a vertex or a set); -1 marks unreachable.

    ``within`` optionally restricts the walk to a vertex mask.
    """
    if np.ndim(source) == 0:
        sources = [g.check_vertex(source)]
    else:
        sources = g.vertex_set(source).tolist()
    dist = np.full(g.n_vertices, -1, dtype=np.intp)
    queue = deque()
    for s in sources:
        if within is None or within[s]:
            dist[s] = 0
            queue.append(s)
    while queue:
        x = queue.popleft()
        for y, _, _ in g.adjacency[x]:
            if dist[y] < 0 and (within is None or within[y]):
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def ball(g: WeightedGraph, o: int, n: int) -> np.ndarray:
    """Combinatorial ball ``{x : d(o, x) <= n}``."""
    if n < 0:
        raise ValueError("radius must be >= 0")
    dist = bfs_distances(g, g.check_vertex(o))
    return np.flatnonzero((dist >= 0) & (dist <= n)).astype(np.intp)


def exhaustion(g: WeightedGraph, o: int, n_max: int) -> list[np.ndarray]:
    """Balls of radius ``0..n_max`` around ``o``."""
    dist = bfs_distances(g, g.check_vertex(o))
    return [np.flatnonzero((dist >= 0) & (dist <= n)).astype(np.intp) for n in range(n_max + 1)]


def shortest_path(g: WeightedGraph, x: int, y: int) -> list[OrientedEdge]:
    """Minimal-hop path from ``x`` to ``y`` as oriented edges.

    Among shortest paths the one whose vertex sequence is lexicographically
    smallest is returned (at each step the lowest-index admissible neighbour).
    """
    x, y = g.check_vertex(x), g.check_vertex(y)
    dist = bfs_distances(g, y)
    path = []
    cur = x
    while cur != y:
        nxt = min(v for v, _, _ in g.adjacency[cur] if dist[v] == dist[cur] - 1)
        _, sign = g.edge_index(cur, nxt)
        path.append(OrientedEdge(cur, nxt, sign > 0))
        cur = nxt
    return path
