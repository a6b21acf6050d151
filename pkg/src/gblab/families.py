"""Deterministic generators for lattice, tree and star-like truncations.

Every generator marks a frontier (the layer whose neighbourhood was cut off)
and attaches labels that do not depend on the truncation size, so the same
vertex keeps its label across nested truncations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, CoreTooSmall
from .graph import WeightedGraph, build_graph

__all__ = [
    "path_graph",
    "grid",
    "zline",
    "dary_tree",
    "star_like",
    "ray",
    "single_vertex",
    "electrical_weights",
    "FamilySpec",
    "FAMILIES",
    "family_spec",
]


def _require(cond: bool, msg: str):
    if not cond:
        raise BadParameter(msg)


def path_graph(n: int) -> WeightedGraph:
    """Unit-weight path on ``0..n-1`` with frontier ``{0, n-1}``."""
    _require(int(n) == n and n >= 2, f"path needs n >= 2, got {n}")
    n = int(n)
    edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    return build_graph(np.ones(n), edges, frontier=[0, n - 1], origin=0, name=f"path{n}")


def grid(d: int, side: int) -> WeightedGraph:
    """Unit-weight box ``{0..side-1}^d`` of ``Z^d``.

    Labels are integer coordinates shifted so that the centre vertex is the
    origin; the frontier is the whole outer shell.
    """
    _require(d in (1, 2, 3), f"grid dimension must be 1, 2 or 3, got {d}")
    _require(int(side) == side and side >= 2, f"grid side must be >= 2, got {side}")
    side = int(side)
    shift = (side - 1) // 2
    coords = list(itertools.product(range(side), repeat=d))
    index = {p: i for i, p in enumerate(coords)}
    edges = []
    for p, i in index.items():
        for axis in range(d):
            if p[axis] + 1 < side:
                q = p[:axis] + (p[axis] + 1,) + p[axis + 1 :]
                edges.append((i, index[q], 1.0))
    frontier = [i for p, i in index.items() if any(x in (0, side - 1) for x in p)]
    labels = [tuple(x - shift for x in p) for p in coords]
    if d == 1:
        labels = [lab[0] for lab in labels]
    origin = index[(shift,) * d]
    return build_graph(
        np.ones(len(coords)), edges, frontier=frontier, labels=labels, origin=origin, name=f"grid{d}_{side}"
    )


def zline(half: int) -> WeightedGraph:
    """Segment ``-half..half`` of ``Z`` centred at the origin."""
    _require(half >= 1, "zline needs half >= 1")
    return grid(1, 2 * int(half) + 1)


def dary_tree(b: int, depth: int) -> WeightedGraph:
    """Rooted truncation of the regular tree of degree ``b + 1``.

    The root has ``b + 1`` children and every other vertex ``b``, so all
    non-frontier vertices have degree ``b + 1``.  Labels are child-index paths
    (the root is ``()``); vertices are numbered breadth first and the deepest
    generation is the frontier.
    """
    _require(int(b) == b and b >= 2, f"branching must be >= 2, got {b}")
    _require(int(depth) == depth and depth >= 1, f"depth must be >= 1, got {depth}")
    b, depth = int(b), int(depth)
    labels = [()]
    edges = []
    level = [0]
    for gen in range(depth):
        nxt = []
        for parent in level:
            kids = b + 1 if gen == 0 else b
            for k in range(kids):
                idx = len(labels)
                labels.append(labels[parent] + (k,))
                edges.append((parent, idx, 1.0))
                nxt.append(idx)
        level = nxt
    return build_graph(
        np.ones(len(labels)), edges, frontier=level, labels=labels, origin=0, name=f"tree{b}_{depth}"
    )


def single_vertex(c: float = 1.0) -> WeightedGraph:
    return build_graph([c], [], origin=0, name="point")


def star_like(core: WeightedGraph, ray_count: int, ray_length: int, *, distinct: bool = False) -> WeightedGraph:
    """Glue ``ray_count`` unit-weight rays of ``ray_length`` edges onto ``core``.

    Ray ``i`` starts at core vertex ``i mod |core|``; with ``distinct=True``
    every ray needs its own core vertex.  Ray vertices are labelled
    ``("ray", i, position)`` with position ``1..ray_length`` and the ray tips
    form the frontier.  Core vertices keep their indices and labels.
    """
    _require(int(ray_count) == ray_count and ray_count >= 1, f"ray_count must be >= 1, got {ray_count}")
    _require(int(ray_length) == ray_length and ray_length >= 2, f"ray_length must be >= 2, got {ray_length}")
    ray_count, ray_length = int(ray_count), int(ray_length)
    nc = core.n_vertices
    if distinct and ray_count > nc:
        raise CoreTooSmall(f"{ray_count} rays need {ray_count} distinct core vertices, core has {nc}")
    c = list(core.c)
    labels = list(core.labels)
    edges = [(int(t), int(h), float(w)) for t, h, w in zip(core.tail, core.head, core.r)]
    tips = []
    for i in range(ray_count):
        prev = i % nc
        for pos in range(1, ray_length + 1):
            idx = len(c)
            c.append(1.0)
            labels.append(("ray", i, pos))
            edges.append((prev, idx, 1.0))
            prev = idx
        tips.append(prev)
    origin = core.origin if core.origin is not None else 0
    return build_graph(c, edges, frontier=tips, labels=labels, origin=origin, name=f"star{ray_count}_{ray_length}")


def ray(length: int) -> WeightedGraph:
    """Truncated copy of ``N``: vertex ``i`` sits at distance ``i`` from 0."""
    return star_like(single_vertex(), 1, length)


def electrical_weights(g: WeightedGraph) -> WeightedGraph:
    """Same graph with ``c(x)`` replaced by the sum of incident conductances ``1/r``."""
    c = np.zeros(g.n_vertices)
    np.add.at(c, g.tail, 1.0 / g.r)
    np.add.at(c, g.head, 1.0 / g.r)
    return build_graph(
        c,
        zip(g.tail.tolist(), g.head.tolist(), g.r.tolist()),
        frontier=np.flatnonzero(g.frontier),
        labels=g.labels,
        origin=g.origin,
        name=g.name,
    )


@dataclass(frozen=True)
class FamilySpec:
    """A graph family indexed by a truncation radius.

    ``k`` is the default radius of ``K = ball(origin, k)`` used by the probes.
    """

    tag: str
    params: dict = field(default_factory=dict)
    weights: str = "simple"
    k: int = 0
    min_radius: int = 2

    def build(self, radius: int) -> WeightedGraph:
        _require(radius >= self.min_radius, f"{self.tag} needs radius >= {self.min_radius}, got {radius}")
        g = _BUILDERS[self.tag](int(radius), **self.params)
        if self.weights == "electrical":
            g = electrical_weights(g)
        elif self.weights != "simple":
            raise BadParameter(f"unknown weight scheme {self.weights!r}")
        return g

    def origin(self, g: WeightedGraph) -> int:
        return int(g.origin if g.origin is not None else 0)


def _tree(radius, branching=2):
    return dary_tree(branching, radius)


def _star(radius, rays=3):
    return star_like(single_vertex(), rays, radius)


_BUILDERS = {
    "triadic": lambda radius: dary_tree(2, radius),
    "tree": _tree,
    "star-like": _star,
    "ray": lambda radius: ray(radius),
    "path": lambda radius: path_graph(radius),
    "zline": lambda radius: zline(radius),
    "grid2": lambda radius: grid(2, 2 * radius + 1),
    "grid3": lambda radius: grid(3, 2 * radius + 1),
}

FAMILIES = {
    "triadic": FamilySpec("triadic", k=0),
    "tree": FamilySpec("tree", {"branching": 2}, k=0),
    "star-like": FamilySpec("star-like", {"rays": 3}, k=1),
    "ray": FamilySpec("ray", k=0),
    "zline": FamilySpec("zline", k=1, min_radius=3),
    "grid2": FamilySpec("grid2", k=2, min_radius=4),
    "grid3": FamilySpec("grid3", k=1, min_radius=3),
}


def family_spec(tag: str, *, weights: str = "simple", k: int | None = None, **params) -> FamilySpec:
    """Look up a registered family, overriding parameters where given."""
    if tag not in FAMILIES:
        raise BadParameter(f"unknown family {tag!r}; choose from {sorted(FAMILIES)}")
    base = FAMILIES[tag]
    merged = dict(base.params)
    for key, val in params.items():
        if val is None:
            continue
        if key not in merged:
            raise BadParameter(f"family {tag!r} takes no parameter {key!r}")
        merged[key] = val
    return FamilySpec(tag, merged, weights, base.k if k is None else int(k), base.min_radius)

