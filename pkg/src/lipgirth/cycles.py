"""Girth, short-cycle enumeration and the per-vertex cycle-count hypothesis."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np

from .errors import ParameterError, ResourceCapError

__all__ = [
    "CyclesProfile",
    "HypothesisReport",
    "girth",
    "count_short_cycles",
    "check_hypothesis",
    "measure_lambda",
]

DEFAULT_CYCLE_CAP = 10**7


@numba.njit(cache=True)
def _girth_kernel(n, indptr, nbr, slot_pos, upper):
    best = upper
    dist = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for root in range(n):
        dist[root] = 0
        parent[root] = -1
        queue[0] = root
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            # any cycle closed from here on has length >= 2*dist[u] + 1
            if 2 * dist[u] + 1 >= best:
                break
            for j in range(indptr[u], indptr[u + 1]):
                e = slot_pos[j]
                if e == parent[u]:
                    continue
                w = nbr[j]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = e
                    queue[tail] = w
                    tail += 1
                else:
                    c = dist[u] + dist[w] + 1
                    if c < best:
                        best = c
        for i in range(tail):
            dist[queue[i]] = -1
            parent[queue[i]] = -1
        if best == 2:
            break
    return best


def girth(g):
    """Length of a shortest cycle; ``inf`` for forests.

    Parallel edges form a cycle of length 2 (multigraph convention).
    """
    if g.m == 0:
        return float("inf")
    indptr, nbr, pos = g.csr()
    upper = g.n + 2
    best = _girth_kernel(g.n, indptr, nbr, pos, upper)
    return float("inf") if best >= upper else int(best)


@numba.njit(cache=True)
def _enumerate_kernel(n, indptr, nbr, slot_pos, g_target, cap, record, cyc_v, cyc_e, lens):
    # With record=False only counts are produced; the caller then sizes the
    # output arrays exactly and calls again with record=True.
    kmax = g_target - 1
    counts = np.zeros((n, g_target), np.int64)
    m = 0
    on_path = np.zeros(n, np.bool_)
    head = np.zeros(n, np.int64)
    cnt = np.zeros(n, np.int64)
    path_v = np.empty(kmax + 1, np.int64)
    path_e = np.empty(kmax + 1, np.int64)
    ptr = np.empty(kmax + 1, np.int64)
    overflow = False
    for s in range(n):
        # slots of s grouped by neighbour (csr is sorted by neighbour)
        for j in range(indptr[s], indptr[s + 1]):
            w = nbr[j]
            if cnt[w] == 0:
                head[w] = j
            cnt[w] += 1
        on_path[s] = True
        path_v[0] = s
        depth = 0
        ptr[0] = indptr[s]
        while depth >= 0:
            cur = path_v[depth]
            if ptr[depth] < indptr[cur + 1]:
                j = ptr[depth]
                ptr[depth] += 1
                w = nbr[j]
                if w <= s or on_path[w]:
                    continue
                nd = depth + 1
                path_v[nd] = w
                path_e[nd] = slot_pos[j]
                if cnt[w] > 0:
                    length = nd + 1
                    for t in range(head[w], head[w] + cnt[w]):
                        e2 = slot_pos[t]
                        if nd == 1:
                            if e2 <= path_e[1]:
                                continue
                        elif path_v[1] >= w:
                            break
                        if m >= cap:
                            overflow = True
                            break
                        for i in range(nd + 1):
                            counts[path_v[i], length] += 1
                        if record:
                            for i in range(nd + 1):
                                cyc_v[m, i] = path_v[i]
                            for i in range(1, nd + 1):
                                cyc_e[m, i - 1] = path_e[i]
                            cyc_e[m, nd] = e2
                            lens[m] = length
                        m += 1
                    if overflow:
                        break
                if nd + 2 < g_target:
                    on_path[w] = True
                    depth = nd
                    ptr[depth] = indptr[w]
            else:
                if depth > 0:
                    on_path[cur] = False
                depth -= 1
        on_path[s] = False
        for j in range(indptr[s], indptr[s + 1]):
            cnt[nbr[j]] = 0
        if overflow:
            break
    return counts, m, overflow


@dataclass
class CyclesProfile:
    """Short cycles of a graph, all lengths below ``g_target``.

    ``counts[x, k]`` is the number of length-``k`` cycles through vertex ``x``
    (columns below 2 are always zero). Each listed cycle is stored once, as a
    vertex row and the matching edge-position row (edge ``i`` joins vertex ``i``
    and vertex ``i+1`` cyclically), padded with ``-1``.
    """

    g_target: int
    counts: np.ndarray
    vertices: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    edge_ids: np.ndarray = field(repr=False, default=None)

    @property
    def n_cycles(self):
        return len(self.lengths)

    def cycles_of_length(self, k):
        rows = np.flatnonzero(self.lengths == k)
        return self.vertices[rows, :k]

    def cycle(self, i):
        k = int(self.lengths[i])
        return tuple(int(v) for v in self.vertices[i, :k])

    def min_length(self):
        return int(self.lengths.min()) if self.n_cycles else None

    def totals(self):
        """Number of distinct cycles per length."""
        ks = np.arange(self.counts.shape[1])
        return {int(k): int(np.sum(self.lengths == k)) for k in ks if np.any(self.lengths == k)}


def count_short_cycles(g, g_target, cap=DEFAULT_CYCLE_CAP, record=True):
    """Enumerate every cycle of length ``< g_target``.

    Each cycle is found once by a rooted DFS that starts at its smallest vertex
    and fixes the direction by requiring the second vertex to be smaller than
    the last one (2-cycles from parallel edges are ordered by edge id).
    Raises :class:`ResourceCapError` past ``cap`` cycles.
    """
    g_target = int(g_target)
    if g_target < 3:
        raise ParameterError("g_target must be at least 3")
    indptr, nbr, pos = g.csr()
    kmax = g_target - 1
    dummy_v = np.empty((1, kmax), np.int32)
    dummy_l = np.empty(1, np.int8)
    counts, m, overflow = _enumerate_kernel(
        g.n, indptr, nbr, pos, g_target, int(cap), False, dummy_v, dummy_v, dummy_l
    )
    if overflow:
        raise ResourceCapError(f"more than {cap} cycles shorter than {g_target}", cap=cap, reached=m)
    if record:
        cv = np.full((m, kmax), -1, np.int32)
        ce = np.full((m, kmax), -1, np.int32)
        lens = np.zeros(m, np.int8)
        _enumerate_kernel(g.n, indptr, nbr, pos, g_target, int(cap), True, cv, ce, lens)
    else:
        cv = np.empty((0, kmax), np.int32)
        ce = np.empty((0, kmax), np.int32)
        lens = np.zeros(0, np.int8)
    profile = CyclesProfile(g_target, counts, cv, ce, lens.astype(np.int64))
    if record:
        ids = np.where(ce >= 0, g.ids[np.maximum(ce, 0)], -1)
        profile.edge_ids = ids
    return profile


@dataclass
class HypothesisReport:
    ok: bool
    worst: tuple  # (vertex, k, count, bound)
    base: float

    def to_dict(self):
        v, k, c, b = self.worst
        return {"ok": self.ok, "base": float(self.base), "worst": {"vertex": v, "k": k, "count": c, "bound": b}}


def check_hypothesis(profile, bound_base):
    """Test ``counts[x, k] <= bound_base**k`` for every vertex and ``3 <= k < g_target``.

    Lengths 2 are included when the graph has parallel edges. ``worst`` is the
    entry with the largest count/bound ratio (a violating one if any).
    """
    base = Fraction(bound_base).limit_denominator(10**12) if not isinstance(bound_base, Fraction) else bound_base
    if base <= 0:
        raise ParameterError("bound base must be positive")
    counts = profile.counts
    worst = (None, None, 0, None)
    worst_ratio = -1.0
    ok = True
    fb = float(base)
    for k in range(2, counts.shape[1]):
        col = counts[:, k]
        if not np.any(col):
            continue
        bound = fb**k
        x = int(np.argmax(col))
        c = int(col[x])
        ratio = c / bound
        if ratio > worst_ratio:
            worst_ratio = ratio
            worst = (x, k, c, bound)
        if c > base**k:
            ok = False
    if worst[0] is None and counts.shape[1] > 3:
        worst = (0, 3, 0, fb**3)
    return HypothesisReport(ok=ok, worst=worst, base=fb)


def measure_lambda(profile, d, floor=1e-12):
    """Smallest ``lam`` with ``counts[x, k] <= (lam*d)**k`` for all entries.

    Returns ``floor`` when there are no short cycles at all.
    """
    counts = profile.counts
    best = 0.0
    for k in range(2, counts.shape[1]):
        c = counts[:, k].max(initial=0)
        if c:
            best = max(best, c ** (1.0 / k) / d)
    # guard against float round-down at the boundary
    return max(best * (1 + 1e-12), floor)
