"""Distances, normalized spectral gap and bipartite vertex expansion."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg
from scipy.sparse.csgraph import dijkstra

from .errors import NumericError, ParameterError

__all__ = [
    "distances_from",
    "pair_distances",
    "SpectralReport",
    "spectral_report",
    "ExpansionReport",
    "expansion_check",
]

DENSE_LIMIT = 512


def distances_from(g, x, radius):
    """BFS distances from ``x``, truncated at ``radius``."""
    if radius < 0:
        raise ParameterError("radius must be non-negative")
    indptr, nbr, _ = g.csr()
    dist = {int(x): 0}
    queue = deque([int(x)])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du == radius:
            continue
        for w in nbr[indptr[u]:indptr[u + 1]].tolist():
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return dist


def pair_distances(g, pairs, limit):
    """Host distances for each ``(u, v)`` pair; ``inf`` beyond ``limit``."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return np.zeros(0)
    adj = g.adjacency_matrix()
    adj.data[:] = 1
    sources, inverse = np.unique(pairs[:, 0], return_inverse=True)
    out = np.empty(len(pairs))
    # batches keep the dense distance block small
    step = max(1, 4_000_000 // max(g.n, 1))
    for lo in range(0, len(sources), step):
        block = dijkstra(adj, directed=False, indices=sources[lo:lo + step], unweighted=True, limit=limit)
        sel = np.flatnonzero((inverse >= lo) & (inverse < lo + step))
        out[sel] = block[inverse[sel] - lo, pairs[sel, 1]]
    return out


@dataclass
class SpectralReport:
    rho: float
    method: str
    residual: float = 0.0

    @property
    def expander_flag(self):
        """The ``50 * rho < 1`` flag used as an expansion pre-check."""
        return 50 * self.rho < 1


def _normalized(g):
    d = g.degree().max(initial=0)
    if d == 0:
        raise ParameterError("graph has no edges")
    return g.adjacency_matrix().astype(float) / float(d)


def spectral_report(g, method="auto", tol=1e-10, maxiter=None):
    """Second normalized eigenvalue in absolute value.

    Works with ``M = A / d`` (``d`` the maximum degree) restricted to the
    complement of the all-ones vector, so disconnected graphs and graphs with a
    bipartite component report ``rho = 1``. Dense for ``n <= 512`` under
    ``method="auto"``; otherwise Lanczos on the deflated operator with the
    relative residual checked against ``1e-8``.
    """
    if g.n == 0:
        raise ParameterError("empty graph")
    if g.n == 1:
        return SpectralReport(0.0, "exact")
    if method == "auto":
        method = "exact" if g.n <= DENSE_LIMIT else "iterative"
    m = _normalized(g)
    n = g.n
    if method == "exact":
        dense = m.toarray()
        mean_rows = dense.mean(axis=0, keepdims=True)
        mean_cols = dense.mean(axis=1, keepdims=True)
        deflated = dense - mean_rows - mean_cols + dense.mean()
        vals = np.linalg.eigvalsh(deflated)
        rho = float(np.abs(vals).max())
        return SpectralReport(min(max(rho, 0.0), 1.0), "exact")
    if method != "iterative":
        raise ParameterError(f"unknown method {method!r}")

    def matvec(x):
        x = np.asarray(x).ravel()
        x = x - x.mean()
        y = m @ x
        return y - y.mean()

    op = splinalg.LinearOperator((n, n), matvec=matvec, dtype=float)
    rng = np.random.default_rng(0)
    v0 = rng.standard_normal(n)
    v0 -= v0.mean()
    try:
        vals, vecs = splinalg.eigsh(op, k=1, which="LM", tol=tol, v0=v0, maxiter=maxiter or 20 * n)
    except splinalg.ArpackNoConvergence as exc:
        raise NumericError("Lanczos did not converge", residual=float("nan")) from exc
    lam = float(vals[0])
    vec = vecs[:, 0]
    residual = float(np.linalg.norm(matvec(vec) - lam * vec) / max(abs(lam), 1e-300))
    if residual > 1e-8 and abs(lam) > 1e-12:
        raise NumericError(f"residual {residual:.2e} above 1e-8", residual=residual)
    return SpectralReport(min(abs(lam), 1.0), "iterative", residual)


@dataclass
class ExpansionReport:
    ok: bool
    witness_set: tuple | None
    mode: str
    checked: int
    min_ratio: float


def _side_sets(g, side_a):
    side_a = np.asarray(sorted(set(int(v) for v in side_a)), dtype=np.int64)
    in_a = np.zeros(g.n, dtype=bool)
    in_a[side_a] = True
    u, v = g.edges[:, 0], g.edges[:, 1]
    if np.any(in_a[u] == in_a[v]):
        raise ParameterError("graph is not bipartite with respect to the given side")
    return in_a


def _biadjacency(g, rows_mask):
    rows = np.flatnonzero(rows_mask)
    cols = np.flatnonzero(~rows_mask)
    ri = np.full(g.n, -1)
    ri[rows] = np.arange(len(rows))
    ci = np.full(g.n, -1)
    ci[cols] = np.arange(len(cols))
    u, v = g.edges[:, 0], g.edges[:, 1]
    a = np.where(rows_mask[u], u, v)
    b = np.where(rows_mask[u], v, u)
    mat = sparse.csr_matrix((np.ones(len(a)), (ri[a], ci[b])), shape=(len(rows), len(cols)))
    return rows, mat


def _exhaustive(mat, ratio):
    k = mat.shape[0]
    nb = [int(sum(1 << int(c) for c in mat.indices[mat.indptr[i]:mat.indptr[i + 1]])) for i in range(k)]
    limit = k // 2
    union = [0] * (1 << k)
    size = [0] * (1 << k)
    best, witness, checked = float("inf"), None, 0
    for mask in range(1, 1 << k):
        low = mask & -mask
        i = low.bit_length() - 1
        prev = mask ^ low
        union[mask] = union[prev] | nb[i]
        size[mask] = size[prev] + 1
        s = size[mask]
        if s > limit:
            continue
        checked += 1
        r = bin(union[mask]).count("1") / s
        if r < best:
            best = r
        if bin(union[mask]).count("1") <= ratio * s and witness is None:
            witness = mask
    return best, witness, checked


def _sampled(g, rows, mat, ratio, rng, samples):
    k = mat.shape[0]
    limit = max(1, k // 2)
    subsets = [[i] for i in range(k)]
    for _ in range(samples):
        s = int(rng.integers(1, limit + 1))
        subsets.append(rng.choice(k, size=s, replace=False).tolist())
    # balls around row vertices in the square of the bipartite graph
    square = (mat @ mat.T).tocsr()
    for c in rng.choice(k, size=min(k, max(1, samples // 20)), replace=False):
        seen = [int(c)]
        mark = {int(c)}
        frontier = [int(c)]
        while frontier and len(seen) < limit:
            nxt = []
            for x in frontier:
                for y in square.indices[square.indptr[x]:square.indptr[x + 1]].tolist():
                    if y not in mark:
                        mark.add(y)
                        nxt.append(y)
            seen.extend(nxt)
            subsets.append(seen[:limit])
            frontier = nxt
    indptr = np.cumsum([0] + [len(s) for s in subsets])
    ind = np.concatenate([np.asarray(s, dtype=np.int64) for s in subsets])
    sel = sparse.csr_matrix((np.ones(len(ind)), ind, indptr), shape=(len(subsets), k))
    reach = sel @ mat
    reach.data[:] = 1
    nsize = np.asarray(reach.sum(axis=1)).ravel()
    ssize = np.diff(indptr)
    ratios = nsize / ssize
    bad = np.flatnonzero(nsize <= ratio * ssize)
    witness = None
    if len(bad):
        witness = tuple(sorted(int(rows[i]) for i in subsets[bad[0]]))
    return float(ratios.min()), witness, len(subsets)


def expansion_check(g, side_a, ratio=Fraction(3, 2), samples=2000, seed=0, exhaustive_limit=16):
    """Check ``|N(S)| > ratio * |S|`` for every ``S`` of at most half a side.

    Both sides are checked. Sides with at most ``exhaustive_limit`` vertices are
    enumerated exhaustively; larger ones are sampled (all singletons, uniform
    random subsets and BFS balls), in which case ``ok`` means no violation found.
    """
    ratio = float(ratio)
    in_a = _side_sets(g, side_a)
    rng = np.random.default_rng(seed)
    total, worst, modes = 0, float("inf"), set()
    for rows_mask in (in_a, ~in_a):
        rows, mat = _biadjacency(g, rows_mask)
        if mat.shape[0] == 0:
            continue
        if mat.shape[0] <= exhaustive_limit:
            best, wmask, checked = _exhaustive(mat, ratio)
            modes.add("exhaustive")
            witness = None
            if wmask is not None:
                witness = tuple(int(rows[i]) for i in range(mat.shape[0]) if wmask >> i & 1)
        else:
            best, witness, checked = _sampled(g, rows, mat, ratio, rng, samples)
            modes.add("sampled")
        total += checked
        worst = min(worst, best)
        if witness is not None:
            return ExpansionReport(False, witness, "+".join(sorted(modes)), total, worst)
    return ExpansionReport(True, None, "+".join(sorted(modes)), total, worst)
