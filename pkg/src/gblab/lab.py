"""Computable probes: pointwise constants, the W-norm, the constant C(U, K).

Truncation model
----------------
A finite truncation only knows the infinite graph up to its frontier.  A
probe therefore

* lets sections live on *admissible* coordinates: vertices outside ``K`` and
  off the frontier, edges outside ``E_K`` with no frontier endpoint;
* measures ``||D s||`` only on *trusted* coordinates: non-frontier vertices
  and edges without a frontier endpoint.

So ``df`` is never charged on an edge reaching the frontier (``f`` may be
continued past the truncation as a constant), while ``phi`` must stop one step
before the frontier and pays ``delta phi`` wherever it stops.  Both
continuations stay admissible in every larger truncation, which is why C(U, K)
can only decrease as the truncation grows on trees and paths.

``convention="full"`` takes ``||D s||`` in l2 of the whole graph (``delta phi``
is also measured at vertices of ``K``); ``"exterior"`` drops the vertices of
``K``.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .cochains import Cochain0, Cochain1, Section, norm1, norm_on, norm_section
from .errors import BadParameter, FrontierContamination, InsufficientDepth, PreconditionError, SolverBreakdown
from .families import FamilySpec, family_spec
from .graph import (
    Region,
    WeightedGraph,
    ball,
    bfs_distances,
    combinatorial_neighborhood,
    edge_boundary,
    induced_edges,
    shortest_path,
)
from .operators import delta, gauss_bonnet, operator_matrices
from .spectral import QuadraticForm, assemble_D_gram, min_rayleigh_constrained

__all__ = [
    "ProbeReport",
    "PointwiseConstant",
    "lemma2_constant",
    "w_norm",
    "w_norm_equivalence",
    "neighbourhood_lower_bound",
    "admissible_region",
    "trusted_region",
    "exact_kernel",
    "nonparabolicity_constant",
    "place_U",
    "probe_decay",
    "triadic_witness",
    "delta_kernel_outside",
    "classical_capacity",
    "CONVENTIONS",
]

CONVENTIONS = ("full", "exterior")
SLOPE_FAIL = -0.1


class PointwiseConstant(NamedTuple):
    S: float
    C: float


def lemma2_constant(g: WeightedGraph, x: int, x0: int) -> PointwiseConstant:
    """Path constant with ``|f(x)| <= C (|f(x0)| + ||df||)`` for every ``f``."""
    path = shortest_path(g, x, x0)
    S = math.sqrt(sum(1.0 / g.r[g.edge_index(e.tail, e.head)[0]] for e in path))
    return PointwiseConstant(S, max(S, 1.0))


def _as_region(g, U) -> Region:
    if isinstance(U, Region):
        return Region(g.vertex_set(U.vertices), g.edge_set(U.edges))
    verts, edges = U
    return g.region(verts, edges)


def w_norm(s: Section, K, nbhd: Region | None = None) -> float:
    """``sqrt(||s||^2 on the neighbourhood + ||D s||^2)``.

    ``nbhd`` defaults to the combinatorial neighbourhood of ``K``.
    """
    g = s.graph
    if nbhd is None:
        nbhd = combinatorial_neighborhood(g, K)
    return math.sqrt(norm_on(s, nbhd) ** 2 + norm_section(gauss_bonnet(s)) ** 2)


def _full_gram(g: WeightedGraph):
    ops = operator_matrices(g)
    D = ops.dirac()
    return (D.T @ sparse.diags(ops.metric()) @ D).toarray()


def _region_metric(g: WeightedGraph, R: Region) -> np.ndarray:
    w = np.zeros(g.n_vertices + g.n_edges)
    w[R.vertices] = g.c[R.vertices]
    w[g.n_vertices + R.edges] = g.r[R.edges]
    return w


def w_norm_equivalence(g: WeightedGraph, nbhd0: Region, nbhd1: Region) -> float:
    """Smallest ``C`` with ``N_1(s) <= C N_0(s)`` for every section of ``g``.

    Returns ``inf`` when some section has ``N_0(s) = 0 < N_1(s)`` (dense; small
    graphs only).
    """
    A = _full_gram(g)
    Q0 = A + np.diag(_region_metric(g, nbhd0))
    Q1 = A + np.diag(_region_metric(g, nbhd1))
    ev0, V = sla.eigh(Q0)
    tol = 1e-12 * max(ev0[-1], 1.0)
    null = ev0 <= tol
    if null.any() and np.abs(V[:, null].T @ Q1 @ V[:, null]).max() > tol:
        return math.inf
    R = V[:, ~null] / np.sqrt(ev0[~null])
    top = sla.eigvalsh(R.T @ Q1 @ R)[-1]
    return math.sqrt(max(float(top), 0.0))


def neighbourhood_lower_bound(g: WeightedGraph, K, U, nbhd: Region | None = None) -> float:
    """``C'`` with ``C' ||s||_U <= ||D s|| + ||s||_{nbhd}`` for sections off the frontier.

    Computed as the square root of the minimum of
    ``(||D s||^2 + ||s||^2_nbhd) / ||s||^2_U``.
    """
    U = _as_region(g, U)
    if nbhd is None:
        nbhd = combinatorial_neighborhood(g, K)
    adm = Region(np.flatnonzero(g.trusted_vertices), np.flatnonzero(g.trusted_edges))
    form = assemble_D_gram(g, adm)
    w = _region_metric(g, nbhd)
    local = np.concatenate([w[form.vertex_ids], w[g.n_vertices + form.edge_ids]])
    A = (form.matrix + sparse.diags(local)).tocsr()
    aug = QuadraticForm(A, form.metric, g, form.vertex_ids, form.edge_ids)
    res = min_rayleigh_constrained(aug, aug.mask(U))
    return math.sqrt(res.value)


def admissible_region(g: WeightedGraph, K) -> Region:
    """Coordinates a probe section may use: off ``K``, ``E_K`` and the frontier."""
    K = g.vertex_set(K)
    vmask = g.trusted_vertices.copy()
    vmask[K] = False
    emask = g.trusted_edges.copy()
    emask[induced_edges(g, K)] = False
    return Region(np.flatnonzero(vmask).astype(np.intp), np.flatnonzero(emask).astype(np.intp))


def trusted_region(g: WeightedGraph, K, convention: str = "full") -> Region:
    """Coordinates on which ``||D s||`` is measured."""
    if convention not in CONVENTIONS:
        raise BadParameter(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    vmask = g.trusted_vertices.copy()
    emask = g.trusted_edges.copy()
    if convention == "exterior":
        K = g.vertex_set(K)
        vmask[K] = False
        emask[induced_edges(g, K)] = False
    return Region(np.flatnonzero(vmask).astype(np.intp), np.flatnonzero(emask).astype(np.intp))


def _forest_cycles(n_nodes: int, tails, heads, weights):
    """Fundamental cycle basis of a multigraph; yields ``{edge: +-1/r}`` dicts.

    ``tails``/``heads`` are node ids in ``0..n_nodes-1``; edge ``j`` enters the
    cycle with sign +1 when traversed tail -> head.
    """
    adj = [[] for _ in range(n_nodes)]
    for j, (t, h) in enumerate(zip(tails, heads)):
        adj[t].append((h, j))
        adj[h].append((t, j))
    parent = np.full(n_nodes, -1)
    pedge = np.full(n_nodes, -1)
    depth = np.full(n_nodes, -1)
    tree = np.zeros(len(tails), dtype=bool)
    for root in range(n_nodes):
        if depth[root] >= 0 or not adj[root]:
            continue
        depth[root] = 0
        stack = [root]
        head = 0
        while head < len(stack):
            x = stack[head]
            head += 1
            for y, j in adj[x]:
                if depth[y] < 0:
                    depth[y] = depth[x] + 1
                    parent[y] = x
                    pedge[y] = j
                    tree[j] = True
                    stack.append(y)
    cycles = []
    for j in np.flatnonzero(~tree):
        t, h = int(tails[j]), int(heads[j])
        cyc = {int(j): 1.0}
        # walk h back to t through the tree: the cycle is t -> h ~> lca <~ t
        a, b = h, t
        up_a, up_b = [], []
        while a != b:
            if depth[a] >= depth[b]:
                up_a.append(a)
                a = parent[a]
            else:
                up_b.append(b)
                b = parent[b]
        for v in up_a:  # traverse v -> parent(v)
            e = int(pedge[v])
            sign = 1.0 if int(tails[e]) == v else -1.0
            cyc[e] = cyc.get(e, 0.0) + sign
        for v in up_b:  # traverse parent(v) -> v
            e = int(pedge[v])
            sign = 1.0 if int(heads[e]) == v else -1.0
            cyc[e] = cyc.get(e, 0.0) + sign
        cycles.append({e: s / weights[e] for e, s in cyc.items() if s != 0.0})
    return cycles


def exact_kernel(g: WeightedGraph, K, convention: str = "full"):
    """Exact null space of the probe form, built combinatorially.

    Returns ``(f_basis, phi_basis)``: lists of ``{vertex: value}`` and
    ``{edge: value}`` dicts.  ``f`` kernel vectors are indicators of admissible
    components with no trusted edge into ``K``; ``phi`` kernel vectors are
    fundamental cycles of the admissible edges (with ``K`` contracted to one
    node under the exterior convention), scaled by ``1/r``.
    """
    trusted_region(g, K, convention)  # validates convention
    K = g.vertex_set(K)
    adm = admissible_region(g, K)
    avmask = np.zeros(g.n_vertices, dtype=bool)
    avmask[adm.vertices] = True
    inK = g.vertex_mask(K)
    te = g.trusted_edges
    inner = te & avmask[g.tail] & avmask[g.head]
    n = g.n_vertices
    adjm = sparse.coo_matrix((np.ones(inner.sum()), (g.tail[inner], g.head[inner])), shape=(n, n))
    _, comp = connected_components(adjm, directed=False)
    anchored = set(comp[g.tail[te & avmask[g.tail] & inK[g.head]]].tolist())
    anchored |= set(comp[g.head[te & avmask[g.head] & inK[g.tail]]].tolist())
    f_basis = []
    for cid in sorted(set(comp[adm.vertices].tolist()) - anchored):
        verts = adm.vertices[comp[adm.vertices] == cid]
        f_basis.append({int(v): 1.0 for v in verts})

    node = np.arange(n)
    if convention == "exterior" and K.size:
        node = node.copy()
        node[K] = K[0]
    tails = node[g.tail[adm.edges]]
    heads = node[g.head[adm.edges]]
    # contracted edges inside K would be loops; they are never admissible
    cyc_local = _forest_cycles(n, tails, heads, g.r[adm.edges])
    phi_basis = [{int(adm.edges[j]): v for j, v in cyc.items()} for cyc in cyc_local]
    return f_basis, phi_basis


def _kernel_matrix(form: QuadraticForm, f_basis, phi_basis) -> sparse.csc_matrix:
    vpos = {int(v): i for i, v in enumerate(form.vertex_ids)}
    nv = len(form.vertex_ids)
    epos = {int(e): i + nv for i, e in enumerate(form.edge_ids)}
    rows, cols, vals = [], [], []
    for j, vec in enumerate(f_basis):
        for v, x in vec.items():
            rows.append(vpos[v])
            cols.append(j)
            vals.append(x)
    off = len(f_basis)
    for j, vec in enumerate(phi_basis):
        for e, x in vec.items():
            rows.append(epos[e])
            cols.append(off + j)
            vals.append(x)
    shape = (form.size, len(f_basis) + len(phi_basis))
    return sparse.csc_matrix((vals, (rows, cols)), shape=shape)


def _label_list(g: WeightedGraph, idx) -> list:
    return [g.labels[int(i)] for i in idx]


@dataclass
class ProbeReport:
    """Outcome of one C(U, K) computation on one truncation."""

    family: str
    radius: int | None
    K: np.ndarray
    U: Region
    C: float
    kernel_dim: int
    kernel_hit: bool
    witness: Section | None
    convention: str = "full"
    M: int | None = None
    slope: float = math.nan
    verdict: str = ""
    wall_ms: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def graph(self) -> WeightedGraph | None:
        return None if self.witness is None else self.witness.graph

    def describe_K(self) -> str:
        return repr(_label_list(self.graph, self.K))

    def describe_U(self) -> str:
        g = self.graph
        edges = [(g.labels[int(g.tail[j])], g.labels[int(g.head[j])]) for j in self.U.edges]
        return repr({"vertices": _label_list(g, self.U.vertices), "edges": edges})

    def recheck(self) -> float:
        """Recompute the ratio ``||D s|| / ||s||_U`` from the stored witness."""
        if self.witness is None:
            raise ValueError("report carries no witness")
        g = self.graph
        trusted = trusted_region(g, self.K, self.convention)
        num = norm_on(gauss_bonnet(self.witness), trusted)
        return num / norm_on(self.witness, self.U)

    def row(self) -> dict:
        return {
            "family": self.family,
            "radius": self.radius,
            "M": self.M,
            "C": self.C,
            "kernel_dim": self.kernel_dim,
            "slope": self.slope,
            "verdict": self.verdict,
            "wall_ms": self.wall_ms,
        }


def _check_frontier_buffer(g: WeightedGraph, pts: np.ndarray, buffer_radius: int, what: str):
    if not g.frontier.any() or pts.size == 0:
        return
    dist = bfs_distances(g, np.flatnonzero(g.frontier))
    near = int(dist[pts].min())
    if near < max(buffer_radius, 1):
        raise FrontierContamination(
            f"{what} lies {near} step(s) from the frontier; buffer radius is {max(buffer_radius, 1)}"
        )


def nonparabolicity_constant(
    g: WeightedGraph,
    K,
    U,
    buffer_radius: int = 1,
    *,
    convention: str = "full",
    family: str = "",
    radius: int | None = None,
) -> ProbeReport:
    """Best constant ``C`` in ``C ||s||_U <= ||D s||`` over sections off ``K``.

    ``U`` is a :class:`Region` or a ``(vertices, edges)`` pair.  ``C = 0`` is
    only reported when an exact kernel vector of the probe form is visible on
    ``U`` (or the reduced problem is singular to working precision).
    """
    K = g.vertex_set(K)
    U = _as_region(g, U)
    if U.vertices.size + U.edges.size == 0:
        raise PreconditionError("U is empty")
    if np.intersect1d(U.vertices, K).size or np.intersect1d(U.edges, induced_edges(g, K)).size:
        raise PreconditionError("U must be disjoint from K and from the edges inside K")
    ends = np.concatenate([U.vertices, g.tail[U.edges], g.head[U.edges]]).astype(np.intp)
    _check_frontier_buffer(g, K, buffer_radius, "K")
    _check_frontier_buffer(g, ends, buffer_radius, "U")
    adm = admissible_region(g, K)
    trusted = trusted_region(g, K, convention)
    form = assemble_D_gram(g, adm, trusted=trusted)
    f_basis, phi_basis = exact_kernel(g, K, convention)
    form.kernel = _kernel_matrix(form, f_basis, phi_basis)
    res = min_rayleigh_constrained(form, form.mask(U))
    witness = form.to_section(res.witness)
    diag = dict(res.diagnostics)
    diag["kernel_f"] = len(f_basis)
    diag["kernel_phi"] = len(phi_basis)
    return ProbeReport(
        family=family or g.name,
        radius=radius,
        K=K,
        U=U,
        C=math.sqrt(res.value),
        kernel_dim=len(f_basis) + len(phi_basis),
        kernel_hit=res.kernel_hit,
        witness=witness,
        convention=convention,
        diagnostics=diag,
    )


def _min_by_label(g: WeightedGraph, candidates) -> int:
    cands = [int(v) for v in candidates]
    try:
        return min(cands, key=lambda v: g.labels[v])
    except TypeError:
        return min(cands)


def place_U(g: WeightedGraph, K, rule: str = "boundary", distance: int = 1) -> Region:
    """Deterministic test set next to ``K``.

    ``"boundary"``: the edge of the edge boundary of ``K`` whose outer vertex
    has the smallest label, together with that vertex.  ``"vertex"``: the
    smallest-label vertex at distance ``distance`` from ``K``.
    """
    K = g.vertex_set(K)
    inK = g.vertex_mask(K)
    if rule == "boundary":
        eb = edge_boundary(g, K)
        outer = np.where(inK[g.tail[eb]], g.head[eb], g.tail[eb])
        ok = ~g.frontier[outer]
        if not ok.any():
            raise PreconditionError("every boundary edge of K reaches the frontier")
        y = _min_by_label(g, outer[ok])
        j = int(eb[ok][outer[ok] == y].min())
        return Region(np.array([y], dtype=np.intp), np.array([j], dtype=np.intp))
    if rule == "vertex":
        if distance < 1:
            raise BadParameter("U distance must be >= 1")
        dist = bfs_distances(g, K)
        cands = np.flatnonzero((dist == distance) & ~g.frontier)
        if cands.size == 0:
            raise PreconditionError(f"no non-frontier vertex at distance {distance} from K")
        return Region(np.array([_min_by_label(g, cands)], dtype=np.intp), np.zeros(0, dtype=np.intp))
    raise BadParameter(f"unknown U rule {rule!r}")


def _depth_beyond(g: WeightedGraph, K, U: Region) -> int | None:
    """Generations between the outer points of ``U`` and the frontier."""
    if not g.frontier.any():
        return None
    pts = np.concatenate([U.vertices, g.tail[U.edges], g.head[U.edges]]).astype(np.intp)
    pts = np.setdiff1d(pts, g.vertex_set(K))
    dist = bfs_distances(g, np.flatnonzero(g.frontier))
    return int(dist[pts].min()) - 1


def fit_slope(M, C) -> float:
    """Least-squares slope of ``log2 C`` against ``M`` over positive entries."""
    pts = [(m, c) for m, c in zip(M, C) if m is not None and c > 0]
    if len(pts) < 2 or len({m for m, _ in pts}) < 2:
        return math.nan
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.log2([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def verdict(reports, threshold: float) -> tuple[float, str]:
    slope = fit_slope([r.M for r in reports], [r.C for r in reports])
    if any(r.kernel_hit or r.C == 0.0 for r in reports):
        return slope, "FAIL"
    if not math.isnan(slope) and slope < SLOPE_FAIL:
        return slope, "FAIL"
    if min(r.C for r in reports) < threshold:
        return slope, "FAIL"
    return slope, "PASS"


def probe_decay(
    family: FamilySpec | str,
    radii,
    *,
    k: int | None = None,
    u_rule: str = "boundary",
    u_distance: int = 1,
    convention: str = "full",
    threshold: float = 1e-3,
    buffer_radius: int | None = None,
    threads: int = 1,
    timing: bool = False,
) -> list[ProbeReport]:
    """C(U, K) over a sweep of truncation radii with fixed ``K`` and ``U``.

    ``K = ball(origin, k)`` (``k`` defaults to the family's setting) and ``U``
    follows ``u_rule``.  Every report carries the fitted log2-slope against
    the depth ``M`` available beyond ``U`` and the sweep verdict.
    """
    spec = family_spec(family) if isinstance(family, str) else family
    radii = [int(r) for r in radii]
    if not radii:
        raise BadParameter("empty radius list")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise BadParameter("radii must be strictly increasing")
    kk = spec.k if k is None else int(k)

    def one(R: int) -> ProbeReport:
        t0 = time.perf_counter()
        g = spec.build(R)
        o = spec.origin(g)
        K = ball(g, o, kk)
        U = place_U(g, K, u_rule, u_distance)
        buf = R // 2 if buffer_radius is None else buffer_radius
        rep = nonparabolicity_constant(g, K, U, buf, convention=convention, family=spec.tag, radius=R)
        rep.M = _depth_beyond(g, K, U)
        if timing:
            rep.wall_ms = (time.perf_counter() - t0) * 1e3
        return rep

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, radii))
    else:
        reports = [one(R) for R in radii]
    slope, v = verdict(reports, threshold)
    return [replace(r, slope=slope, verdict=v) for r in reports]


def _children_table(g: WeightedGraph):
    dist = bfs_distances(g, g.origin if g.origin is not None else 0)
    kids = [sorted(y for y, _, _ in g.adjacency[x] if dist[y] == dist[x] + 1) for x in range(g.n_vertices)]
    return kids


def triadic_witness(g: WeightedGraph, x: int, M: int):
    """Truncated splitting flow out of ``x`` over ``M`` generations.

    The two lowest-index children ``a, b`` of ``x`` get ``phi(x, a) = 1`` and
    ``phi(x, b) = -1``; every edge below carries its parent value divided by
    the number of children, down to generation ``M``.  Returns the 1-cochain
    and a diagnostics dict (``delta_norm_sq``, ``u_norm_sq``, ``ratio``,
    ``interior_residual`` and the test set ``U``).

    Raises :class:`InsufficientDepth` unless the tree reaches ``M + 2``
    levels below ``x``; ``required_depth`` is counted from ``x``.
    """
    x = g.check_vertex(x)
    if M < 0:
        raise BadParameter("M must be >= 0")
    kids = _children_table(g)
    if len(kids[x]) < 2:
        raise InsufficientDepth(f"vertex {x} has fewer than two children", required_depth=M + 2)
    phi = Cochain1(g)
    U_edges = []
    leaves = []
    for start, val in ((kids[x][0], 1.0), (kids[x][1], -1.0)):
        j, sign = g.edge_index(x, start)
        phi.values[j] = sign * val
        U_edges.append(j)
        level = [(start, val)]
        for gen in range(1, M + 1):
            nxt = []
            for v, pv in level:
                if g.frontier[v] or not kids[v]:
                    raise InsufficientDepth(
                        f"the subtree below vertex {x} is shorter than {M} generations",
                        required_depth=M + 2,
                    )
                share = pv / len(kids[v])
                for w in kids[v]:
                    jw, sw = g.edge_index(v, w)
                    phi.values[jw] = sw * share
                    nxt.append((w, share))
            level = nxt
        leaves.extend(v for v, _ in level)
    if any(g.frontier[v] for v in leaves):
        raise InsufficientDepth(
            f"generation-{M} heads below vertex {x} sit on the frontier", required_depth=M + 2
        )
    dphi = delta(phi)
    leafmask = np.zeros(g.n_vertices, dtype=bool)
    leafmask[leaves] = True
    U = Region(np.zeros(0, dtype=np.intp), np.array(sorted(U_edges), dtype=np.intp))
    dn = float(np.dot(g.c, dphi.values**2))
    un = norm_on(Section(Cochain0(g), phi), U) ** 2
    diag = {
        "M": int(M),
        "delta_norm_sq": dn,
        "u_norm_sq": un,
        "phi_norm_sq": norm1(phi) ** 2,
        "ratio": math.sqrt(dn / un),
        "interior_residual": float(np.abs(dphi.values[~leafmask]).max(initial=0.0)),
        "leak_vertices": len(leaves),
        "U": U,
    }
    return phi, diag


def delta_kernel_outside(g: WeightedGraph, K, *, convention: str = "full", numeric_check: bool = True):
    """Kernel of ``delta`` on 1-cochains off ``E_K`` and off the frontier.

    Returns ``(dimension, basis)`` with the basis as :class:`Cochain1` objects.
    The dimension comes from a fundamental cycle basis; when ``numeric_check``
    is set (and the problem is small) it is compared against the numerical
    rank of the restricted ``delta`` matrix.
    """
    _, phi_basis = exact_kernel(g, K, convention)
    basis = []
    for vec in phi_basis:
        phi = Cochain1(g)
        for e, v in vec.items():
            phi.values[e] = v
        basis.append(phi)
    dim = len(basis)
    adm = admissible_region(g, K)
    if numeric_check and 0 < adm.edges.size <= 3000:
        rows = trusted_region(g, K, convention).vertices
        B = operator_matrices(g).delta[rows][:, adm.edges].toarray()
        s = sla.svdvals(B) if B.size else np.zeros(0)
        rank = int((s > 1e-10 * max(s.max(initial=0.0), 1.0)).sum())
        numeric = adm.edges.size - rank
        if numeric != dim:
            raise SolverBreakdown(
                f"cycle count {dim} disagrees with numerical kernel dimension {numeric}",
                {"cycle_count": dim, "numeric": numeric},
            )
    return dim, basis


def classical_capacity(g: WeightedGraph, o: int, N: int) -> float:
    """``min ||df||^2`` over ``f`` with ``f(o) = 1`` and ``f = 0`` at distance ``>= N``."""
    o = g.check_vertex(o)
    if N < 1:
        raise BadParameter("N must be >= 1")
    dist = bfs_distances(g, o)
    inner = (dist >= 0) & (dist < N)
    if g.frontier[inner].any():
        raise FrontierContamination(f"ball of radius {N - 1} around {o} reaches the frontier")
    B = g.incidence
    L = (B.T @ sparse.diags(g.r) @ B).tocsr()
    free = np.flatnonzero(inner & (np.arange(g.n_vertices) != o))
    f = np.zeros(g.n_vertices)
    f[o] = 1.0
    if free.size:
        rhs = -L[free][:, [o]].toarray().ravel()
        f[free] = splu(L[free][:, free].tocsc()).solve(rhs)
    df = B @ f
    return float(np.dot(g.r, df**2))
