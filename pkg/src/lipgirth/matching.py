"""Bipartite matching by augmenting paths, matching orientation and the Z-action.

``match_to_completion`` grows a matching from empty by flipping batches of
vertex-disjoint augmenting paths whose length cap follows
``C*log(|A|/|U|)``; ``orient_matching_lll`` orients a perfect matching so every
vertex sees many non-matching neighbours in the opposite class;
``build_z_action`` combines the two into a permutation whose functional graph
is 2-regular.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.stats import binom

from ._rng import key3
from .errors import NonTerminationError, ParameterError, PreconditionError, StageError
from .euler import euler_orientation
from .graph import Graph
from .lll import LllInstance, run_algorithm1
from .queries import expansion_check, spectral_report

__all__ = [
    "BipartiteGraph",
    "Matching",
    "OrientationPartition",
    "find_augmenting_paths",
    "flip",
    "match_to_completion",
    "layer_growth_audit",
    "orientation_lll_condition",
    "OrientationInstance",
    "orient_matching_lll",
    "perfect_matching_even_regular",
    "build_z_action",
]


# -- bipartite structures -------------------------------------------------------


class BipartiteGraph:
    """Sides ``A = 0..n_a-1`` and ``B = 0..n_b-1``; edges are ``(a, b)`` pairs."""

    def __init__(self, n_a, n_b, edges):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges[:, 0].min() < 0 or edges[:, 0].max() >= n_a or edges[:, 1].min() < 0 or edges[:, 1].max() >= n_b):
            raise ParameterError("bipartite edge out of range")
        self.n_a, self.n_b, self.edges = int(n_a), int(n_b), edges
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        self.adj_a = np.split(edges[order, 1], np.cumsum(np.bincount(edges[:, 0], minlength=n_a))[:-1])
        order = np.lexsort((edges[:, 0], edges[:, 1]))
        self.adj_b = np.split(edges[order, 0], np.cumsum(np.bincount(edges[:, 1], minlength=n_b))[:-1])
        self.adj_a = [a.tolist() for a in self.adj_a]
        self.adj_b = [b.tolist() for b in self.adj_b]

    @classmethod
    def from_graph(cls, g, side_a):
        """Split ``g`` by ``side_a``; returns ``(bg, a_vertices, b_vertices)``."""
        in_a = np.zeros(g.n, dtype=bool)
        in_a[np.asarray(list(side_a), dtype=np.int64)] = True
        u, v = g.edges[:, 0], g.edges[:, 1]
        if np.any(in_a[u] == in_a[v]):
            raise ParameterError("an edge lies within one side")
        a_vert = np.flatnonzero(in_a)
        b_vert = np.flatnonzero(~in_a)
        ia = np.full(g.n, -1)
        ia[a_vert] = np.arange(len(a_vert))
        ib = np.full(g.n, -1)
        ib[b_vert] = np.arange(len(b_vert))
        a = np.where(in_a[u], u, v)
        b = np.where(in_a[u], v, u)
        return cls(len(a_vert), len(b_vert), np.stack([ia[a], ib[b]], axis=1)), a_vert, b_vert

    def to_graph(self):
        """As a plain graph on ``n_a + n_b`` vertices (B shifted by ``n_a``)."""
        return Graph(self.n_a + self.n_b, self.edges + np.array([0, self.n_a]))


@dataclass
class Matching:
    mate_a: np.ndarray
    mate_b: np.ndarray

    @classmethod
    def empty(cls, bg):
        return cls(np.full(bg.n_a, -1, dtype=np.int64), np.full(bg.n_b, -1, dtype=np.int64))

    @property
    def size(self):
        return int(np.sum(self.mate_a >= 0))

    def pairs(self):
        a = np.flatnonzero(self.mate_a >= 0)
        return list(zip(a.tolist(), self.mate_a[a].tolist()))

    def unmatched_a(self):
        return np.flatnonzero(self.mate_a < 0)

    def unmatched_b(self):
        return np.flatnonzero(self.mate_b < 0)

    def is_valid(self, bg):
        a = np.flatnonzero(self.mate_a >= 0)
        if not np.array_equal(self.mate_b[self.mate_a[a]], a):
            return False
        if np.sum(self.mate_b >= 0) != len(a):
            return False
        return all(self.mate_a[x] in bg.adj_a[x] for x in a.tolist())


def _order(items, rng):
    items = list(items)
    if rng is not None:
        rng.shuffle(items)
    return items


def find_augmenting_paths(bg, m, max_len, rng=None):
    """Vertex-disjoint augmenting paths of odd length ``<= max_len``, shortest first.

    Paths are returned as vertex lists ``[a0, b0, a1, b1, ..., ak, bk]`` where
    ``(a_i, b_i)`` are non-matching edges and ``(b_i, a_{i+1})`` matching edges;
    ``a0`` and ``bk`` are unmatched. Each pass runs a layered BFS from the
    unused free ``A`` vertices, extracts a maximal disjoint set of shortest
    paths by DFS on the layered graph, and repeats for longer lengths.
    """
    used_a = np.zeros(bg.n_a, dtype=bool)
    used_b = np.zeros(bg.n_b, dtype=bool)
    mate_a, mate_b = m.mate_a, m.mate_b
    paths = []
    while True:
        free = [a for a in _order(np.flatnonzero((mate_a < 0) & ~used_a).tolist(), rng)]
        if not free:
            break
        dist = np.full(bg.n_a, -1, dtype=np.int64)
        dist[free] = 0
        seen_b = np.zeros(bg.n_b, dtype=bool)
        frontier, layer, found = free, 0, False
        while frontier and 2 * layer + 1 <= max_len and not found:
            nxt = []
            for a in frontier:
                for b in bg.adj_a[a]:
                    if used_b[b] or seen_b[b]:
                        continue
                    seen_b[b] = True
                    a2 = mate_b[b]
                    if a2 < 0:
                        found = True
                    elif dist[a2] < 0 and not used_a[a2]:
                        dist[a2] = layer + 1
                        nxt.append(a2)
            if not found:
                frontier, layer = nxt, layer + 1
        if not found:
            break
        target = layer
        batch = []

        def dfs(a, depth):
            stack = [(a, iter(bg.adj_a[a]))]
            trail = [a]
            while stack:
                cur, it = stack[-1]
                advanced = False
                for b in it:
                    if used_b[b]:
                        continue
                    a2 = mate_b[b]
                    d = len(stack) - 1
                    if a2 < 0 and d == target:
                        trail.append(b)
                        return trail
                    if a2 >= 0 and d < target and dist[a2] == d + 1 and not used_a[a2]:
                        trail += [b, a2]
                        stack.append((a2, iter(bg.adj_a[a2])))
                        advanced = True
                        break
                if not advanced:
                    dist[cur] = -2  # dead end for this pass
                    stack.pop()
                    trail = trail[:-2] if stack else []
            return None

        for a in free:
            if used_a[a] or dist[a] != 0:
                continue
            p = dfs(a, 0)
            if p is None:
                continue
            for i, v in enumerate(p):
                if i % 2 == 0:
                    used_a[v] = True
                else:
                    used_b[v] = True
            batch.append(p)
        if not batch:
            break
        paths.extend(batch)
    return paths


def flip(m, path):
    """Switch matching and non-matching edges along an augmenting path (in place)."""
    if m.mate_a[path[0]] >= 0 or m.mate_b[path[-1]] >= 0:
        raise PreconditionError("path endpoints must be unmatched")
    for i in range(0, len(path), 2):
        a, b = path[i], path[i + 1]
        m.mate_a[a] = b
        m.mate_b[b] = a


def _hall_witness(bg, m):
    """A-vertices reachable from unmatched A by alternating paths (violates Hall when m is maximum)."""
    reach = set(m.unmatched_a().tolist())
    stack = list(reach)
    nb = set()
    while stack:
        a = stack.pop()
        for b in bg.adj_a[a]:
            if b in nb:
                continue
            nb.add(b)
            a2 = int(m.mate_b[b])
            if a2 >= 0 and a2 not in reach:
                reach.add(a2)
                stack.append(a2)
    return sorted(reach), sorted(nb)


def match_to_completion(bg, seed=0, C=2.0, audit=False):
    """Grow a matching from empty until perfect or provably maximum.

    Phases search augmenting paths up to ``max_len`` edges: ``max_len`` starts
    at 1 and becomes ``2*max_len+1`` after a phase finds nothing, ending in an
    unbounded sweep. Each phase also records the reference length
    ``2*ceil(C*log(|A|/|U_A|))+1`` and whether its longest path stayed within
    it. Returns ``(Matching, stats)``; when no perfect matching exists,
    ``stats["deficiency"]`` holds a Hall-violating set of A-vertices.
    """
    rng = np.random.default_rng(seed)
    m = Matching.empty(bg)
    full = 2 * min(bg.n_a, bg.n_b) + 1
    floor = 1
    phases = []
    anomalies = 0
    audits = []
    while len(m.unmatched_a()) and len(m.unmatched_b()):
        u_a = len(m.unmatched_a())
        target = 2 * math.ceil(C * math.log(max(bg.n_a, 1) / max(1, u_a))) + 1
        ml = floor
        if audit:
            audits.append(layer_growth_audit(bg, m))
        paths = find_augmenting_paths(bg, m, ml, rng)
        if not paths:
            if ml >= full:
                break
            floor = min(2 * ml + 1, full)
            continue
        u_before = u_a + len(m.unmatched_b())
        for p in paths:
            flip(m, p)
        lengths = [len(p) - 1 for p in paths]
        covered = 2 * len(paths) / u_before
        if covered < 0.25:
            anomalies += 1
        phases.append(
            {
                "max_len": ml,
                "log_bound": target,
                "within_log_bound": max(lengths) <= target,
                "paths": len(paths),
                "max_path": max(lengths),
                "lengths": dict(Counter(lengths)),
                "unmatched_before": u_before,
                "unmatched_after": u_before - 2 * len(paths),
                "covered_fraction": covered,
            }
        )
    hist = Counter()
    for ph in phases:
        hist.update(ph["lengths"])
    stats = {
        "iterations": len(phases),
        "phases": phases,
        "path_length_histogram": {int(k): int(v) for k, v in sorted(hist.items())},
        "perfect": m.size == bg.n_a == bg.n_b,
        "size": m.size,
        "quarter_coverage_anomalies": anomalies,
        "deficiency": None,
        "seed": seed,
    }
    if audit:
        stats["layer_audits"] = audits
    if m.size < bg.n_a:
        witness, nb = _hall_witness(bg, m)
        if len(nb) < len(witness):
            stats["deficiency"] = {"a_set": witness, "neighborhood": nb}
    return m, stats


def layer_growth_audit(bg, m):
    """Check ``|S_k| >= min(3|B|/4, 3|S_{k-1}|/2)`` along alternating layers.

    ``S_0`` is the unmatched part of ``A`` (counted by size), ``S_k`` the
    neighbourhood of ``S_0`` together with the partners of ``S_{k-1}``. The
    audit runs until ``S_k`` reaches ``3|B|/4``; a violation returns its layer.
    """
    u_a = m.unmatched_a().tolist()
    sizes = [len(u_a)]
    if not u_a:
        return {"ok": True, "sizes": sizes, "violation": None}
    goal = 0.75 * bg.n_b
    frontier_a = set(u_a)
    s_prev = len(u_a)
    s = set()
    k = 0
    while s_prev < goal or k == 0:
        k += 1
        s = set()
        for a in frontier_a:
            s.update(bg.adj_a[a])
        sizes.append(len(s))
        if len(s) < min(goal, 1.5 * s_prev):
            return {"ok": False, "sizes": sizes, "violation": k}
        if len(s) >= goal or len(s) == s_prev and k > 1:
            break
        frontier_a = set(u_a) | {int(m.mate_b[b]) for b in s if m.mate_b[b] >= 0}
        s_prev = len(s)
    return {"ok": True, "sizes": sizes, "violation": None}


# -- orientation of a perfect matching -----------------------------------------


@dataclass
class OrientationPartition:
    """``tail[i] -> head[i]`` per matching edge; ``cls[v]`` is 0 for tails (out) and 1 for heads (in)."""

    tail: np.ndarray
    head: np.ndarray
    cls: np.ndarray
    cross: np.ndarray = field(repr=False)
    stats: object = field(repr=False, default=None)


def orientation_lll_condition(d):
    """``(1 - 1/(d+1))^d / (d+1) > exp(-d^2/200)`` evaluated in log space."""
    if d < 1:
        return False
    lhs = d * math.log1p(-1.0 / (d + 1)) - math.log(d + 1)
    return lhs > -(d * d) / 200.0


def _matching_index(g, pairs):
    mate = np.full(g.n, -1, dtype=np.int64)
    eidx = np.full(g.n, -1, dtype=np.int64)
    for i, (u, v) in enumerate(pairs):
        if mate[u] >= 0 or mate[v] >= 0 or u == v:
            raise ParameterError("not a matching")
        mate[u], mate[v] = v, u
        eidx[u] = eidx[v] = i
    if np.any(mate < 0):
        raise ParameterError("matching is not perfect")
    keys = set(g.edge_keys().tolist())
    for u, v in pairs:
        if min(u, v) * g.n + max(u, v) not in keys:
            raise ParameterError(f"matched pair ({u}, {v}) is not an edge")
    return mate, eidx


@numba.njit(cache=True)
def _flip_classes(variables, counters, seed, direction, lo, hi, cls, cross, indptr, nbr):
    for i in range(len(variables)):
        e = variables[i]
        bit = np.int64(key3(seed, e, counters[i]) >> np.uint64(63))
        if bit == direction[e]:
            continue
        direction[e] = bit
        for w in (lo[e], hi[e]):
            cw = cls[w]
            for j in range(indptr[w], indptr[w + 1]):
                u = nbr[j]
                if cls[u] != cw:
                    cross[u] -= 1
                    cross[w] -= 1
                else:
                    cross[u] += 1
                    cross[w] += 1
            cls[w] = 1 - cw


class OrientationInstance(LllInstance):
    """One variable per matching edge (its direction), one event per vertex.

    Event ``v`` holds when fewer than ``threshold`` of ``v``'s non-matching
    neighbours lie in the other class.
    """

    def __init__(self, g, pairs, threshold):
        self.graph = g
        self.pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        mate, eidx = _matching_index(g, self.pairs.tolist())
        self.lo = self.pairs.min(axis=1)
        self.hi = self.pairs.max(axis=1)
        u, v = g.edges[:, 0], g.edges[:, 1]
        non = ~((mate[u] == v) & (self._first_copy(g, mate)))
        rest = Graph(g.n, g.edges[non])
        self.rest = rest
        self.indptr, self.nbr, _ = rest.csr()
        self.threshold = int(threshold)
        deg = np.diff(self.indptr)
        self.dprime = deg
        ptr = [0]
        var = []
        for x in range(g.n):
            vs = np.unique(np.concatenate([[eidx[x]], eidx[self.nbr[self.indptr[x]:self.indptr[x + 1]]]]))
            var.append(vs)
            ptr.append(ptr[-1] + len(vs))
        dmin = int(deg.min())
        x_w = np.full(g.n, 1.0 / (dmin + 1))
        prob = np.array([binom.cdf(self.threshold - 1, int(k), 0.5) for k in deg])
        self._set_events(len(self.pairs), x_w, np.array(ptr), np.concatenate(var), prob)

    @staticmethod
    def _first_copy(g, mate):
        # only one copy of a matched pair counts as the matching edge
        keys = g.edge_keys()
        _, first = np.unique(keys, return_index=True)
        mask = np.zeros(g.m, dtype=bool)
        mask[first] = True
        return mask

    def initial_state(self, seed):
        n_e = len(self.pairs)
        direction = np.zeros(n_e, dtype=np.int64)
        cls = np.zeros(self.graph.n, dtype=np.int64)
        cls[self.hi] = 1
        cls_u = cls[np.repeat(np.arange(self.graph.n), np.diff(self.indptr))]
        cross = np.bincount(
            np.repeat(np.arange(self.graph.n), np.diff(self.indptr)), weights=(cls_u != cls[self.nbr]), minlength=self.graph.n
        ).astype(np.int64)
        state = (direction, cls, cross)
        # start from direction 0 everywhere, then apply the keyed draws
        self.resample(state, np.arange(n_e), np.zeros(n_e, dtype=np.int64), seed)
        return state

    def resample(self, state, variables, counters, seed):
        _flip_classes(
            np.asarray(variables, np.int64), np.asarray(counters, np.int64), np.uint64(seed & (2**64 - 1)),
            state[0], self.lo, self.hi, state[1], state[2], self.indptr, self.nbr,
        )

    def holding(self, state, events=None):
        cross = state[2]
        return cross < self.threshold if events is None else cross[events] < self.threshold

    def assignment(self, state):
        direction, cls, cross = state
        tail = np.where(direction == 0, self.lo, self.hi)
        head = np.where(direction == 0, self.hi, self.lo)
        return OrientationPartition(tail, head, cls.copy(), cross.copy())


def orient_matching_lll(g, pairs, seed=0, threshold=None, resample_cap=10**6, selection="first-violated"):
    """Orient a perfect matching so each vertex has ``>= threshold`` cross-class non-matching neighbours.

    ``threshold`` defaults to ``ceil(2*deg/5)`` for the graph degree ``deg``.
    The run is gated on :func:`orientation_lll_condition` for the non-matching degree.
    """
    deg = g.degree()
    if threshold is None:
        threshold = math.ceil(2 * int(deg.max()) / 5)
    dprime = int(deg.min()) - 1
    if not orientation_lll_condition(dprime):
        raise ParameterError(f"local lemma inequality fails for non-matching degree {dprime}")
    inst = OrientationInstance(g, pairs, threshold)
    part, stats = run_algorithm1(inst, selection, seed, resample_cap)
    part.stats = stats
    if np.any(part.cross < threshold):
        raise NonTerminationError("orientation violates the threshold", stats=stats)
    return part


# -- perfect matchings of even-regular graphs ------------------------------------


def _two_factor(g, seed):
    """A 2-factor (edge positions) from an Euler orientation and an out/in matching."""
    tails, heads = euler_orientation(g)
    bg = BipartiteGraph(g.n, g.n, np.stack([tails, heads], axis=1))
    m, _ = match_to_completion(bg, seed)
    if m.size < g.n:
        return None
    # one edge position per matched (tail, head) pair
    chosen = []
    lookup = {}
    for pos, (t, h) in enumerate(zip(tails.tolist(), heads.tolist())):
        lookup.setdefault((t, h), []).append(pos)
    for a, b in m.pairs():
        p = lookup[(a, b)].pop()
        chosen.append(p)
    return np.array(sorted(chosen))


def _cycles_of(g, positions):
    sub = Graph(g.n, g.edges[positions], g.ids[positions])
    indptr, nbr, pos = sub.csr()
    seen = np.zeros(g.n, dtype=bool)
    cycles = []
    for s in range(g.n):
        if seen[s]:
            continue
        cyc = [s]
        seen[s] = True
        prev_e = pos[indptr[s]]
        cur = int(nbr[indptr[s]])
        while cur != s:
            cyc.append(cur)
            seen[cur] = True
            a, b = indptr[cur], indptr[cur] + 1
            j = b if pos[a] == prev_e else a
            prev_e = pos[j]
            cur = int(nbr[j])
        cycles.append(cyc)
    return cycles


def _alternate(cycle, start):
    """Perfect matching of the path obtained by removing ``cycle[start]`` (cycle of odd length)
    or of the whole even cycle when ``start`` is None."""
    if start is None:
        return [(cycle[i], cycle[i + 1]) for i in range(0, len(cycle), 2)]
    k = len(cycle)
    path = [cycle[(start + i) % k] for i in range(1, k)]
    return [(path[i], path[i + 1]) for i in range(0, len(path), 2)]


def perfect_matching_even_regular(g, seed=0, attempts=8):
    """Perfect matching of a ``d``-regular graph with ``d`` even, or a failure report.

    A 2-factor comes from an Euler orientation plus a perfect matching of the
    out/in bipartite graph. Even cycles contribute alternate edges. Odd cycles
    are paired through graph edges joining them (each pair contributes that
    edge plus alternate edges of the two remaining paths). Returns
    ``(pairs or None, report)``.
    """
    d = g.regular_degree()
    if d is None or d % 2 or d == 0:
        raise ParameterError("graph must be d-regular with d even and positive")
    keys = g.edge_keys()
    report = {"attempts": []}
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        perm = rng.permutation(g.n)
        inv = np.argsort(perm)
        # relabel so that different attempts give different orientations
        h = Graph(g.n, perm[g.edges])
        positions = _two_factor(h, seed + attempt)
        if positions is None:
            report["attempts"].append({"odd_cycles": None})
            continue
        cycles = [[int(inv[v]) for v in c] for c in _cycles_of(h, positions)]
        odd = [c for c in cycles if len(c) % 2]
        pairs = []
        for c in cycles:
            if len(c) % 2 == 0:
                pairs += _alternate(c, None)
        report["attempts"].append({"cycles": len(cycles), "odd_cycles": len(odd)})
        if len(odd) % 2:
            continue
        # greedy pairing of odd cycles through connecting edges
        where = {v: i for i, c in enumerate(odd) for v in c}
        used = [False] * len(odd)
        ok = True
        order = rng.permutation(len(odd)).tolist()
        for i in order:
            if used[i]:
                continue
            partner = None
            for ui, u in enumerate(odd[i]):
                for w in g.neighbors(u).tolist():
                    j = where.get(w)
                    if j is not None and j != i and not used[j]:
                        partner = (j, ui, odd[j].index(w))
                        break
                if partner:
                    break
            if partner is None:
                ok = False
                break
            j, ui, wj = partner
            used[i] = used[j] = True
            pairs.append((odd[i][ui], odd[j][wj]))
            pairs += _alternate(odd[i], ui) + _alternate(odd[j], wj)
        if not ok:
            continue
        pairs = [(min(u, v), max(u, v)) for u, v in pairs]
        cover = np.bincount(np.array(pairs).ravel(), minlength=g.n)
        if np.any(cover != 1) or not np.isin(np.array([u * g.n + v for u, v in pairs]), keys).all():
            raise StageError("matching", PreconditionError("assembled pairs are not a perfect matching"))
        report["ok"] = True
        return sorted(pairs), report
    report["ok"] = False
    return None, report


# -- Z-action ------------------------------------------------------------------------


def build_z_action(g, pairs, seed=0, threshold=None, resample_cap=10**6, samples=2000):
    """Permutation whose functional graph is the union of two perfect matchings.

    The matching is oriented with :func:`orient_matching_lll`; a second perfect
    matching is found between tails and heads along non-matching edges. Each
    tail maps to its head along the first matching, each head to the tail it is
    matched to in the second. Returns ``(successor array, report)``.
    """
    try:
        part = orient_matching_lll(g, pairs, seed, threshold, resample_cap)
    except (ParameterError, NonTerminationError) as exc:
        raise StageError("orient", exc) from exc
    tails = part.tail
    heads = part.head
    is_tail = np.zeros(g.n, dtype=bool)
    is_tail[tails] = True
    u, v = g.edges[:, 0], g.edges[:, 1]
    mate = np.full(g.n, -1, dtype=np.int64)
    mate[tails], mate[heads] = heads, tails
    cross = (is_tail[u] != is_tail[v]) & (mate[u] != v)
    sub = Graph(g.n, g.edges[cross])
    exp_report = expansion_check(sub, np.flatnonzero(is_tail), ratio=1.5, samples=samples, seed=seed)
    try:
        spectral = spectral_report(g)
        rho = spectral.rho
    except Exception:  # informational only
        rho = None
    if not exp_report.ok:
        raise StageError("expansion", PreconditionError(f"expansion fails on {exp_report.witness_set}"))
    bg, a_vert, b_vert = BipartiteGraph.from_graph(sub, np.flatnonzero(is_tail))
    m2, mstats = match_to_completion(bg, seed)
    if not mstats["perfect"]:
        raise StageError("second-matching", PreconditionError(f"no perfect matching; deficiency {mstats['deficiency']}"))
    succ = np.full(g.n, -1, dtype=np.int64)
    succ[tails] = heads
    for a, b in m2.pairs():
        succ[b_vert[b]] = a_vert[a]
    report = {
        "threshold": int(math.ceil(2 * int(g.degree().max()) / 5)) if threshold is None else threshold,
        "orientation_resamples": part.stats.total_resamples,
        "min_cross": int(part.cross.min()),
        "expansion": {"ok": exp_report.ok, "mode": exp_report.mode, "min_ratio": exp_report.min_ratio},
        "rho": rho,
        "spectral_flag": None if rho is None else bool(50 * rho < 1),
        "matching_iterations": mstats["iterations"],
        "seed": seed,
    }
    return succ, report
