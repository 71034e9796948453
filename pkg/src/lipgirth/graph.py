"""Finite undirected multigraphs with stable edge identifiers, plus generators."""

from __future__ import annotations

import numpy as np

from .errors import GenerationError, ParameterError

__all__ = [
    "Graph",
    "generate",
    "random_regular",
    "random_bipartite_regular",
    "cycle_graph",
    "complete_graph",
    "complete_bipartite",
    "disjoint_union",
]


class Graph:
    """Undirected multigraph on ``0..n-1``.

    Edges are stored as an ``(m, 2)`` endpoint array together with an id array.
    Ids are unique, kept sorted, and never renumbered when edges are removed, so
    they can be used as keys across derived graphs. Parallel edges are allowed;
    loops are rejected unless ``allow_loops`` is set.
    """

    __slots__ = ("n", "edges", "ids", "_csr", "_degree")

    def __init__(self, n, edges=(), ids=None, *, allow_loops=False):
        n = int(n)
        if n < 0:
            raise ParameterError("vertex count must be non-negative")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ParameterError("edge endpoint outside [0, n)")
        if not allow_loops and np.any(edges[:, 0] == edges[:, 1]):
            raise ParameterError("loops are not allowed")
        if ids is None:
            ids = np.arange(len(edges), dtype=np.int64)
        else:
            ids = np.asarray(ids, dtype=np.int64).reshape(-1)
            if len(ids) != len(edges):
                raise ParameterError("ids and edges differ in length")
            order = np.argsort(ids, kind="stable")
            ids, edges = ids[order], edges[order]
            if len(ids) > 1 and np.any(ids[1:] == ids[:-1]):
                raise ParameterError("edge ids must be unique")
        self.n = n
        self.edges = edges
        self.ids = ids
        self._csr = None
        self._degree = None

    # -- basic queries -------------------------------------------------

    @property
    def m(self):
        return len(self.edges)

    def degree(self):
        if self._degree is None:
            self._degree = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        return self._degree

    def regular_degree(self):
        """Common degree if the graph is regular, else ``None``."""
        deg = self.degree()
        if self.n == 0:
            return 0
        return int(deg[0]) if np.all(deg == deg[0]) else None

    def is_simple(self):
        if self.m == 0:
            return True
        lo = self.edges.min(axis=1)
        hi = self.edges.max(axis=1)
        keys = lo * self.n + hi
        return len(np.unique(keys)) == self.m and not np.any(lo == hi)

    def csr(self):
        """Adjacency as ``(indptr, neighbor, slot_pos)``.

        ``slot_pos`` holds positions into ``edges``/``ids``. Each vertex's slots
        are sorted by (neighbor, edge id).
        """
        if self._csr is None:
            m = self.m
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            pos = np.concatenate([np.arange(m), np.arange(m)])
            order = np.lexsort((pos, dst, src))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._csr = (indptr, dst[order].astype(np.int64), pos[order].astype(np.int64))
        return self._csr

    def neighbors(self, v):
        indptr, nbr, _ = self.csr()
        return nbr[indptr[v]:indptr[v + 1]]

    def incident(self, v):
        """Edge positions incident to ``v`` (one entry per edge slot)."""
        indptr, _, pos = self.csr()
        return pos[indptr[v]:indptr[v + 1]]

    def positions(self, ids):
        """Map edge ids to positions in ``edges``; raises on unknown ids."""
        ids = np.asarray(ids, dtype=np.int64)
        pos = np.searchsorted(self.ids, ids)
        if np.any(pos >= self.m) or np.any(self.ids[np.minimum(pos, self.m - 1)] != ids):
            raise KeyError("unknown edge id")
        return pos

    def endpoints(self, edge_id):
        u, v = self.edges[self.positions([edge_id])[0]]
        return int(u), int(v)

    def edge_keys(self):
        """``min*n + max`` per edge; convenient for membership tests."""
        lo = self.edges.min(axis=1)
        hi = self.edges.max(axis=1)
        return lo * self.n + hi

    def multiplicity(self):
        """Dict ``(u, v) -> count`` with ``u < v``."""
        keys, counts = np.unique(self.edge_keys(), return_counts=True)
        return {(int(k // self.n), int(k % self.n)): int(c) for k, c in zip(keys, counts)}

    # -- derived graphs -------------------------------------------------

    def keep(self, ids):
        """Spanning subgraph keeping only the given edge ids."""
        pos = np.sort(self.positions(np.unique(ids)))
        return Graph(self.n, self.edges[pos], self.ids[pos])

    def remove(self, ids):
        mask = np.ones(self.m, dtype=bool)
        if len(ids):
            mask[self.positions(np.unique(ids))] = False
        return Graph(self.n, self.edges[mask], self.ids[mask])

    def add(self, pairs):
        """Return ``(graph, new_ids)`` with the pairs appended under fresh ids."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        start = int(self.ids[-1]) + 1 if self.m else 0
        new_ids = np.arange(start, start + len(pairs), dtype=np.int64)
        g = Graph(self.n, np.vstack([self.edges, pairs]), np.concatenate([self.ids, new_ids]))
        return g, new_ids

    def sorted_edge_list(self):
        """Edges as ``(min, max)`` pairs sorted by (min, max, id); the file order."""
        lo = self.edges.min(axis=1)
        hi = self.edges.max(axis=1)
        order = np.lexsort((self.ids, hi, lo))
        return np.stack([lo[order], hi[order]], axis=1)

    def adjacency_matrix(self, dense=False):
        """Symmetric adjacency with edge multiplicities as entries."""
        from scipy import sparse

        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        a = sparse.coo_matrix(
            (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(self.n, self.n)
        ).tocsr()
        a.sum_duplicates()
        return a.toarray() if dense else a

    def components(self):
        """Component label per vertex (labels are 0..c-1 in order of first vertex)."""
        from scipy.sparse.csgraph import connected_components

        _, labels = connected_components(self.adjacency_matrix(), directed=False)
        return labels

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        for (u, v), i in zip(self.edges.tolist(), self.ids.tolist()):
            g.add_edge(u, v, key=i)
        return g

    @classmethod
    def from_networkx(cls, g):
        """Relabels nodes to ``0..n-1`` in sorted order when they are not already."""
        nodes = list(g.nodes())
        try:
            nodes = sorted(nodes)
        except TypeError:
            pass
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in g.edges()]
        return cls(len(nodes), edges)

    def __repr__(self):
        d = self.regular_degree()
        tag = f", {d}-regular" if d is not None and self.m else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"

    def same_edges(self, other):
        """Multiset equality of unordered edges (ids ignored)."""
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(np.sort(self.edge_keys()), np.sort(other.edge_keys()))
        )


# -- generators --------------------------------------------------------


def cycle_graph(n):
    if n < 3:
        raise ParameterError("cycle needs n >= 3")
    v = np.arange(n)
    return Graph(n, np.stack([v, (v + 1) % n], axis=1))


def complete_graph(n):
    if n < 1:
        raise ParameterError("complete graph needs n >= 1")
    iu = np.triu_indices(n, k=1)
    return Graph(n, np.stack(iu, axis=1))


def complete_bipartite(a, b):
    """Sides are ``0..a-1`` and ``a..a+b-1``."""
    if a < 1 or b < 1:
        raise ParameterError("both sides must be non-empty")
    u, v = np.meshgrid(np.arange(a), np.arange(a, a + b), indexing="ij")
    return Graph(a + b, np.stack([u.ravel(), v.ravel()], axis=1))


def disjoint_union(*graphs):
    offset = 0
    parts = []
    for g in graphs:
        parts.append(g.edges + offset)
        offset += g.n
    return Graph(offset, np.vstack(parts) if parts else ())


def random_regular(n, d, seed=0, max_restarts=1000, max_repairs=200):
    """Uniform-ish simple ``d``-regular graph from the configuration model.

    Stubs are paired at random; pairs forming loops or repeating an existing edge
    are returned to the pool and re-paired. If the pool stalls the whole pairing
    restarts. Deterministic for a given seed.
    """
    n, d = int(n), int(d)
    if n <= 0 or d < 0 or d >= n or (n * d) % 2:
        raise ParameterError(f"infeasible random-regular parameters n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if d == 0:
        return Graph(n, ())
    for _ in range(max_restarts):
        stubs = np.repeat(np.arange(n, dtype=np.int64), d)
        rng.shuffle(stubs)
        accepted = np.empty(0, dtype=np.int64)
        for _ in range(max_repairs):
            pairs = stubs.reshape(-1, 2)
            lo = pairs.min(axis=1)
            hi = pairs.max(axis=1)
            keys = lo * n + hi
            ok = (lo != hi) & ~np.isin(keys, accepted)
            # keep the first copy of repeated keys within this batch
            idx = np.flatnonzero(ok)
            _, first = np.unique(keys[idx], return_index=True)
            good = np.zeros(len(keys), dtype=bool)
            good[idx[first]] = True
            accepted = np.concatenate([accepted, keys[good]])
            stubs = pairs[~good].ravel()
            if len(stubs) == 0:
                accepted.sort()
                return Graph(n, np.stack([accepted // n, accepted % n], axis=1))
            rng.shuffle(stubs)
    raise GenerationError(f"configuration model did not produce a simple graph in {max_restarts} restarts")


def random_bipartite_regular(n, d, seed=0, max_restarts=1000, max_repairs=200):
    """Simple ``d``-regular bipartite graph with sides ``0..n-1`` and ``n..2n-1``.

    Same stub-repair scheme as :func:`random_regular`, pairing A-stubs with B-stubs.
    """
    n, d = int(n), int(d)
    if n <= 0 or d < 0 or d > n:
        raise ParameterError(f"infeasible bipartite-regular parameters n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if d == 0:
        return Graph(2 * n, ())
    for _ in range(max_restarts):
        a = np.repeat(np.arange(n, dtype=np.int64), d)
        b = rng.permutation(a)
        accepted = np.empty(0, dtype=np.int64)
        for _ in range(max_repairs):
            keys = a * n + b
            idx = np.flatnonzero(~np.isin(keys, accepted))
            _, first = np.unique(keys[idx], return_index=True)
            good = np.zeros(len(keys), dtype=bool)
            good[idx[first]] = True
            accepted = np.concatenate([accepted, keys[good]])
            a, b = a[~good], rng.permutation(b[~good])
            if len(a) == 0:
                accepted.sort()
                return Graph(2 * n, np.stack([accepted // n, n + accepted % n], axis=1))
    raise GenerationError(f"bipartite configuration model failed in {max_restarts} restarts")


def generate(model, seed=0, **params):
    """Dispatch on a model name.

    ``random-regular(n, d)``, ``cycle(n)``, ``complete(n)``,
    ``complete-bipartite(a, b)``, ``random-bipartite-regular(n, d)``
    and ``explicit-file(path)``.
    """
    model = model.replace("_", "-")
    if model == "random-regular":
        return random_regular(params["n"], params["d"], seed=seed)
    if model == "random-bipartite-regular":
        return random_bipartite_regular(params["n"], params["d"], seed=seed)
    if model == "cycle":
        return cycle_graph(params["n"])
    if model == "complete":
        return complete_graph(params["n"])
    if model == "complete-bipartite":
        return complete_bipartite(params["a"], params["b"])
    if model in ("explicit-file", "file"):
        from .io import read_graph

        return read_graph(params["path"])
    raise ParameterError(f"unknown model {model!r}")
