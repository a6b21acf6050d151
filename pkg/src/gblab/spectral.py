"""Gram assembly for D and constrained minimum Rayleigh quotients.

The central computation is

    inf { s^T A s : ||s||_U = 1 }

for a positive semidefinite ``A`` and a seminorm that only sees the
coordinates in ``U``.  The coordinates off ``U`` are eliminated exactly by a
Schur complement (their optimal values solve a PSD linear system), which leaves
a ``|U| x |U|`` symmetric eigenproblem.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.sparse.linalg import splu

from .cochains import Section
from .errors import EmptyAdmissibleSet, NoConvergence, PreconditionError, SolverBreakdown
from .graph import Region, WeightedGraph
from .operators import operator_matrices

__all__ = [
    "QuadraticForm",
    "ConstraintMask",
    "RayleighResult",
    "SingularValueResult",
    "assemble_D_gram",
    "min_rayleigh_constrained",
    "smallest_singular_value",
]

DENSE_THRESHOLD = 500
DENSE_FALLBACK_LIMIT = 6000


@dataclass
class ConstraintMask:
    """Seminorm ``||s||_U^2 = sum_i weights_i s[indices_i]^2``."""

    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.intp)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.indices.size == 0:
            raise PreconditionError("constraint set U is empty")
        if self.indices.shape != self.weights.shape:
            raise ValueError("indices and weights must have the same length")
        if np.any(self.weights <= 0):
            raise ValueError("seminorm weights must be positive on U")
        if np.unique(self.indices).size != self.indices.size:
            raise ValueError("duplicate indices in U")


@dataclass
class QuadraticForm:
    """Symmetric PSD form over section coordinates.

    Local coordinate ``i < len(vertex_ids)`` is the value of ``f`` at vertex
    ``vertex_ids[i]``; the remaining ones are values of ``phi`` on the
    canonical edges ``edge_ids``.  ``metric`` holds ``c`` resp. ``r`` for each
    coordinate.  ``kernel`` optionally carries exact null vectors (columns).
    """

    matrix: sparse.csr_matrix
    metric: np.ndarray
    graph: WeightedGraph | None = None
    vertex_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    edge_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    kernel: object = None

    @classmethod
    def from_matrix(cls, A, metric=None):
        A = sparse.csr_matrix(A)
        n = A.shape[0]
        return cls(A, np.ones(n) if metric is None else np.asarray(metric, dtype=float))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def energy(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ (self.matrix @ x))

    def local_indices(self, U: Region) -> np.ndarray:
        """Local coordinates of the vertices and edges of ``U``."""
        vpos = {int(v): i for i, v in enumerate(self.vertex_ids)}
        epos = {int(e): i + len(self.vertex_ids) for i, e in enumerate(self.edge_ids)}
        out = []
        for v in U.vertices:
            if int(v) not in vpos:
                raise PreconditionError(f"vertex {int(v)} of U is not an admissible coordinate")
            out.append(vpos[int(v)])
        for e in U.edges:
            if int(e) not in epos:
                raise PreconditionError(f"edge {int(e)} of U is not an admissible coordinate")
            out.append(epos[int(e)])
        return np.asarray(out, dtype=np.intp)

    def mask(self, U: Region) -> ConstraintMask:
        idx = self.local_indices(U)
        return ConstraintMask(idx, self.metric[idx])

    def to_section(self, x) -> Section:
        if self.graph is None:
            raise ValueError("form is not attached to a graph")
        g = self.graph
        full = np.zeros(g.n_vertices + g.n_edges)
        nv = len(self.vertex_ids)
        full[self.vertex_ids] = x[:nv]
        full[g.n_vertices + self.edge_ids] = x[nv:]
        return Section.from_vector(g, full)

    def from_section(self, s: Section) -> np.ndarray:
        return np.concatenate([s.f.values[self.vertex_ids], s.phi.values[self.edge_ids]])


def assemble_D_gram(g: WeightedGraph, admissible: Region, *, trusted: Region | None = None) -> QuadraticForm:
    """Gram form ``s^T A s = ||D s||^2`` for sections supported on ``admissible``.

    The norm of ``D s`` is taken over the ``trusted`` coordinates (default: all
    non-frontier vertices and all edges without a frontier endpoint).
    """
    av = g.vertex_set(admissible.vertices)
    ae = g.edge_set(admissible.edges)
    if av.size + ae.size == 0:
        raise EmptyAdmissibleSet("no admissible coordinates")
    if g.frontier[av].any() or (~g.trusted_edges[ae]).any():
        raise PreconditionError("admissible coordinates must avoid the frontier")
    if trusted is None:
        tv = np.flatnonzero(g.trusted_vertices)
        te = np.flatnonzero(g.trusted_edges)
    else:
        tv, te = g.vertex_set(trusted.vertices), g.edge_set(trusted.edges)
    ops = operator_matrices(g)
    nV = g.n_vertices
    rows = np.concatenate([tv, nV + te])
    cols = np.concatenate([av, nV + ae])
    Dsub = ops.dirac()[rows][:, cols]
    w = ops.metric()[rows]
    A = (Dsub.T @ sparse.diags(w) @ Dsub).tocsr()
    A = ((A + A.T) * 0.5).tocsr()
    metric = np.concatenate([g.c[av], g.r[ae]])
    return QuadraticForm(A, metric, g, av, ae)


class RayleighResult(NamedTuple):
    value: float
    witness: np.ndarray
    kernel_hit: bool
    diagnostics: dict


def _norm_inf(A) -> float:
    if sparse.issparse(A):
        return float(abs(A).sum(axis=1).max()) if A.nnz else 0.0
    return float(np.abs(A).sum(axis=1).max()) if A.size else 0.0


def _solve_off_block(A_oo, B, *, kernel_o, dense: bool, rank_tol: float, scale: float):
    """Return ``X = A_oo^+ B`` plus diagnostics; ``B`` lies in range(A_oo)."""
    n = A_oo.shape[0]
    info = {}
    if dense or n <= DENSE_THRESHOLD:
        M = A_oo.toarray() if sparse.issparse(A_oo) else np.asarray(A_oo)
        evals, V = sla.eigh(M)
        keep = evals > rank_tol * scale
        info["method"] = "dense"
        info["rank_deficiency"] = int(n - keep.sum())
        Vk = V[:, keep]
        X = Vk @ ((Vk.T @ B) / evals[keep][:, None])
        return X, info
    info["method"] = "sparse"
    M = sparse.csc_matrix(A_oo)
    if kernel_o is not None and kernel_o.shape[1]:
        Z = sparse.csc_matrix(kernel_o)
        znorm = float(np.max(np.asarray(Z.multiply(Z).sum(axis=0)))) or 1.0
        M = (M + (scale / znorm) * (Z @ Z.T)).tocsc()
        info["kernel_augmented"] = int(kernel_o.shape[1])
    try:
        X = splu(M).solve(np.asarray(B))
        resid = np.linalg.norm(A_oo @ X - B)
        ok = np.all(np.isfinite(X)) and resid <= 1e-8 * max(scale, 1.0) * max(1.0, np.linalg.norm(X))
    except RuntimeError:
        ok = False
    if ok:
        info["rank_deficiency"] = 0 if kernel_o is None else int(kernel_o.shape[1])
        return X, info
    if n > DENSE_FALLBACK_LIMIT:
        raise SolverBreakdown("sparse solve of the off-U block failed", {"n": n})
    X, dinfo = _solve_off_block(A_oo, B, kernel_o=None, dense=True, rank_tol=rank_tol, scale=scale)
    dinfo["method"] = "sparse->dense-pinv"
    return X, dinfo


def min_rayleigh_constrained(
    form: QuadraticForm,
    U: ConstraintMask | Region,
    *,
    dense_threshold: int = DENSE_THRESHOLD,
    rank_tol: float = 1e-10,
) -> RayleighResult:
    """Minimise ``s^T A s`` subject to ``||s||_U = 1``.

    Returns the minimum value, a minimising witness (local coordinates) and
    ``kernel_hit`` when the minimum is an exact zero mode of ``A`` that is
    visible on ``U``.
    """
    mask = form.mask(U) if isinstance(U, Region) else U
    A = sparse.csr_matrix(form.matrix)
    n = A.shape[0]
    u = mask.indices
    if u.min() < 0 or u.max() >= n:
        raise PreconditionError("constraint indices out of range")
    scale = max(_norm_inf(A), 1e-300)
    diagnostics = {"n_coords": n, "n_constraint": int(u.size), "scale": scale}

    kernel = None if form.kernel is None else sparse.csc_matrix(form.kernel)
    if kernel is not None and kernel.shape[1]:
        Zu = kernel[u]
        mass = np.asarray(Zu.multiply(Zu).T @ mask.weights).ravel()
        if np.any(mass > 0):
            j = int(np.argmax(mass))
            x = kernel[:, j].toarray().ravel() / np.sqrt(mass[j])
            diagnostics.update(method="exact-kernel", kernel_dim=int(kernel.shape[1]))
            return RayleighResult(0.0, x, True, diagnostics)

    o = np.setdiff1d(np.arange(n), u)
    A_uu = A[u][:, u].toarray()
    if o.size:
        A_uo = A[u][:, o]
        A_oo = A[o][:, o]
        kernel_o = None if kernel is None else kernel[o]
        X, info = _solve_off_block(
            A_oo,
            A_uo.T.toarray(),
            kernel_o=kernel_o,
            dense=n <= dense_threshold,
            rank_tol=rank_tol,
            scale=scale,
        )
        S = A_uu - A_uo @ X
    else:
        X = np.zeros((0, u.size))
        info = {"method": "direct", "rank_deficiency": 0}
        S = A_uu
    diagnostics.update(info)
    S = 0.5 * (S + S.T)
    wis = 1.0 / np.sqrt(mask.weights)
    T = wis[:, None] * S * wis[None, :]
    evals, Y = sla.eigh(T)
    lam = float(evals[0])
    if lam < -1e-8 * scale:
        raise SolverBreakdown(f"negative reduced eigenvalue {lam:.3e}; form is not PSD", diagnostics)
    x = np.zeros(n)
    x[u] = wis * Y[:, 0]
    if o.size:
        x[o] = -X @ x[u]
    kernel_hit = lam <= rank_tol * scale
    value = 0.0 if kernel_hit else lam
    diagnostics["reduced_eigenvalue"] = lam
    diagnostics["witness_residual"] = abs(form.energy(x) - value)
    return RayleighResult(value, x, bool(kernel_hit), diagnostics)


class SingularValueResult(NamedTuple):
    value: float
    converged: bool
    bracket: tuple[float, float]
    iterations: int
    method: str


def smallest_singular_value(
    B,
    *,
    dense_threshold: int = DENSE_THRESHOLD,
    tol: float = 1e-10,
    maxiter: int = 2000,
    block: int = 4,
    seed: int = 0,
    x0=None,
    full_output: bool = False,
):
    """``inf ||B x|| / ||x||`` over nonzero ``x`` (so 0 for wide matrices).

    Small problems use a dense SVD.  Larger ones run block inverse iteration
    on the normal equations ``B^T B`` with a seeded start block.
    """
    B = sparse.csr_matrix(B)
    m, n = B.shape
    if n == 0 or B.nnz == 0:
        raise ValueError("B must be a nonzero matrix")

    def done(val, conv, bracket, it, method):
        res = SingularValueResult(float(val), conv, (float(bracket[0]), float(bracket[1])), it, method)
        if full_output:
            return res
        if not conv:
            raise NoConvergence("inverse iteration did not converge", res.value, res.bracket, it)
        return res.value

    if m < n:
        return done(0.0, True, (0.0, 0.0), 0, "rank")
    if m + n <= dense_threshold:
        s = sla.svdvals(B.toarray())
        return done(s[-1], True, (s[-1], s[-1]), 0, "dense-svd")

    N = (B.T @ B).tocsc()
    try:
        lu = splu(N)
    except RuntimeError:
        return done(0.0, True, (0.0, 0.0), 0, "singular-factor")
    k = min(block, n)
    if x0 is None:
        X = np.random.default_rng(seed).standard_normal((n, k))
    else:
        X = np.asarray(x0, dtype=float).reshape(n, -1)
    X, _ = np.linalg.qr(X)
    nrm = _norm_inf(N)
    prev = np.inf
    theta, resid = np.inf, np.inf
    for it in range(1, maxiter + 1):
        X = lu.solve(X)
        X, _ = np.linalg.qr(X)
        H = X.T @ (N @ X)
        evals, Y = np.linalg.eigh(0.5 * (H + H.T))
        X = X @ Y
        theta = max(float(evals[0]), 0.0)
        resid = float(np.linalg.norm(N @ X[:, 0] - evals[0] * X[:, 0]))
        if abs(theta - prev) <= tol * max(theta, tol) and resid <= tol * nrm:
            return done(np.sqrt(theta), True, (np.sqrt(max(theta - resid, 0.0)), np.sqrt(theta)), it, "inverse-iteration")
        prev = theta
    return done(np.sqrt(theta), False, (np.sqrt(max(theta - resid, 0.0)), np.sqrt(theta)), maxiter, "inverse-iteration")
