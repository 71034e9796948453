"""Path surgeries to regularity, 2-factorization and the two bijections.

A graph with degrees in ``{delta, delta+1}`` is made ``delta``-regular by pairing
its degree-``delta+1`` vertices (specials) with edge-disjoint paths and replacing
each extended path ``x_0 .. x_k`` by the chords ``(x_i, x_{i+2})``. Two pairing
regimes exist: forest leaves when ``delta`` is even, and round-based local
selection when ``delta`` is odd. A 4-regular result splits into two 2-factors
whose cycle orientations give the permutations ``alpha`` and ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ._rng import keyed_uniform
from .cycles import girth
from .errors import (
    CertificateError,
    LipgirthError,
    ParameterError,
    PreconditionError,
    StageError,
    StuckError,
    SurgeryError,
)
from .euler import euler_orientation, successor_of_2regular
from .graph import Graph
from .lipschitz import lipschitz_extract
from .matching import BipartiteGraph, match_to_completion
from .queries import distances_from, pair_distances
from .witness import WitnessedSubgraph, glue

__all__ = [
    "SurgeryState",
    "PermutationPair",
    "WordReport",
    "peel_cycles",
    "surgery_on_path",
    "regularize",
    "local_match_specials",
    "two_factorize",
    "euler_orient_2regular",
    "word_check",
    "reduced_word_count",
    "build_f2",
]


def _as_ws(g):
    return g if isinstance(g, WitnessedSubgraph) else WitnessedSubgraph.identity(g)


# -- cycle peeling ------------------------------------------------------------------


def peel_cycles(g, seed=0):
    """Edge ids of a forest ``F`` with ``deg_F(v) = deg_G(v) (mod 2)`` for every ``v``.

    ``F`` is the unique parity-matching subforest of a seeded random spanning
    forest. ``E(G) - F`` has all degrees even, so it is an edge-disjoint union
    of cycles, and ``F`` is what removing those cycles one by one leaves.
    """
    graph = _as_ws(g).graph
    n = graph.n
    rng = np.random.default_rng(seed)
    order = rng.permutation(graph.m)
    parent = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj = [[] for _ in range(n)]
    for pos in order.tolist():
        u, v = graph.edges[pos]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            adj[u].append((int(v), pos))
            adj[v].append((int(u), pos))
    odd = (graph.degree() % 2).astype(bool)
    seen = np.zeros(n, dtype=bool)
    keep = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        order_v, up = [root], {root: -1}
        i = 0
        while i < len(order_v):
            x = order_v[i]
            i += 1
            for y, pos in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    up[y] = pos
                    order_v.append(y)
        need = {x: bool(odd[x]) for x in order_v}
        for x in reversed(order_v[1:]):
            if need[x]:
                pos = up[x]
                keep.append(pos)
                a, b = graph.edges[pos]
                other = int(a) if int(b) == x else int(b)
                need[other] = not need[other]
    return np.sort(graph.ids[np.array(keep, dtype=np.int64)]) if keep else np.empty(0, dtype=np.int64)


# -- surgery ------------------------------------------------------------------------


@dataclass
class SurgeryState:
    """Mutable working graph for path surgeries.

    ``edges`` maps edge id to endpoints, ``incident[v]`` holds the ids at ``v``.
    Every removed edge and every created chord enters ``ledger``, so an edge
    takes part in at most one surgery.
    """

    n: int
    edges: dict
    incident: list
    witness: dict
    forest: set
    specials: set
    matched: set
    ledger: set
    base_L: int
    host: Graph | None
    next_id: int
    surgeries: int = 0
    log: list = field(default_factory=list)

    @classmethod
    def from_witnessed(cls, ws, delta, forest=()):
        deg = ws.graph.degree()
        edges = {int(i): (int(u), int(v)) for (u, v), i in zip(ws.graph.edges.tolist(), ws.graph.ids.tolist())}
        incident = [set() for _ in range(ws.n)]
        for i, (u, v) in edges.items():
            incident[u].add(i)
            incident[v].add(i)
        specials = set(np.flatnonzero(deg == delta + 1).tolist())
        return cls(
            ws.n, edges, incident, dict(ws.witness), set(int(f) for f in forest), specials, set(), set(),
            int(ws.L), ws.host, int(ws.graph.ids.max()) + 1 if ws.graph.m else 0,
        )

    def degree(self, v):
        return len(self.incident[v])

    def unmatched(self):
        return self.specials - self.matched

    def other(self, edge_id, v):
        a, b = self.edges[edge_id]
        return b if a == v else a

    def graph(self):
        ids = np.array(sorted(self.edges), dtype=np.int64)
        e = np.array([self.edges[i] for i in ids.tolist()], dtype=np.int64).reshape(-1, 2)
        return Graph(self.n, e, ids)

    def witnessed(self, L=None):
        g = self.graph()
        return WitnessedSubgraph(g, {i: self.witness[i] for i in g.ids.tolist()}, self.base_L if L is None else L, self.host)

    def dump(self):
        return {
            "unmatched": sorted(self.unmatched()),
            "matched": len(self.matched),
            "forest_edges": len(self.forest),
            "surgeries": self.surgeries,
            "ledger": len(self.ledger),
        }


def _pick_edges(state, path):
    ids = []
    for a, b in zip(path, path[1:]):
        cand = sorted(
            i for i in state.incident[a] if state.other(i, a) == b and i not in state.ledger and i not in ids
        )
        if not cand:
            raise SurgeryError(f"({a}, {b}) is not an unused working edge")
        # prefer forest edges, which are what the pairing paths consist of
        inf = [i for i in cand if i in state.forest]
        ids.append(inf[0] if inf else cand[0])
    return ids


def surgery_on_path(state, path, edge_ids=None):
    """Replace the edges of ``x_0 .. x_k`` by the chords ``(x_i, x_{i+2})``.

    ``x_1`` and ``x_{k-1}`` must be distinct unmatched specials; every edge must
    be an unused working edge (``edge_ids`` picks among parallel copies). Their
    degrees drop by one and they become matched. The state is untouched when a
    precondition fails.
    """
    path = [int(x) for x in path]
    k = len(path) - 1
    if k < 3:
        raise SurgeryError(f"path of length {k} cannot join two distinct specials")
    x1, xk1 = path[1], path[k - 1]
    if x1 == xk1:
        raise SurgeryError("the two specials coincide")
    free = state.unmatched()
    if x1 not in free or xk1 not in free:
        raise SurgeryError(f"{x1} and {xk1} must be unmatched specials")
    for i in range(k - 1):
        if path[i] == path[i + 2]:
            raise SurgeryError(f"chord ({path[i]}, {path[i + 2]}) would be a loop")
    if edge_ids is None:
        ids = _pick_edges(state, path)
    else:
        ids = [int(i) for i in edge_ids]
        if len(ids) != k or len(set(ids)) != k:
            raise SurgeryError("need k distinct edge ids")
        for i, (a, b) in zip(ids, zip(path, path[1:])):
            if i not in state.edges or set(state.edges[i]) != {a, b} or (a == b) != (state.edges[i][0] == state.edges[i][1]):
                raise SurgeryError(f"edge {i} does not join ({a}, {b})")
            if i in state.ledger:
                raise SurgeryError(f"edge {i} was already used")
    chords = []
    for i in range(k - 1):
        w = glue(
            _oriented(state.witness[ids[i]], path[i]),
            _oriented(state.witness[ids[i + 1]], path[i + 1]),
        )
        if len(w) - 1 > 3 * state.base_L:
            raise SurgeryError(f"chord witness of length {len(w) - 1} exceeds {3 * state.base_L}")
        chords.append(((path[i], path[i + 2]), w))
    before = {v: state.degree(v) for v in set(path)}
    for i in ids:
        a, b = state.edges.pop(i)
        state.incident[a].discard(i)
        state.incident[b].discard(i)
        state.forest.discard(i)
        state.ledger.add(i)
    for (a, b), w in chords:
        j = state.next_id
        state.next_id += 1
        state.edges[j] = (a, b)
        state.incident[a].add(j)
        state.incident[b].add(j)
        state.witness[j] = w
        state.ledger.add(j)
    for v, d0 in before.items():
        expect = d0 - 1 if v in (x1, xk1) else d0
        if state.degree(v) != expect:
            raise AssertionError(f"degree of {v} moved from {d0} to {state.degree(v)}")
    state.matched.update((x1, xk1))
    state.surgeries += 1
    state.log.append(tuple(path))
    return state


def _oriented(w, start):
    return w if w[0] == start else tuple(reversed(w))


def _extension(state, x1, x2, banned, rng):
    cand = sorted(
        i for i in state.incident[x1]
        if i not in state.ledger and i not in banned and state.other(i, x1) != x2
    )
    if not cand:
        return None
    return cand[int(rng.integers(len(cand)))]


# -- forest regime ------------------------------------------------------------------


def _leaf_pairs(state):
    """Candidate F-paths ``(vertices, edge ids)`` between two leaves.

    Either the two ends of a path component, or two pendant leaf-paths meeting
    at a vertex of F-degree at least 3.
    """
    adj = {}
    for i in state.forest:
        a, b = state.edges[i]
        adj.setdefault(a, []).append((b, i))
        adj.setdefault(b, []).append((a, i))
    leaves = sorted(v for v, lst in adj.items() if len(lst) == 1)
    pendant = {}
    ends = []
    for leaf in leaves:
        verts, ids, prev, cur = [leaf], [], None, leaf
        while True:
            y, i = next((y, i) for y, i in adj[cur] if i != prev)
            verts.append(y)
            ids.append(i)
            prev, cur = i, y
            if len(adj[cur]) != 2:
                break
        if len(adj[cur]) == 1:
            if leaf < cur:
                ends.append((verts, ids))
        else:
            pendant.setdefault(cur, []).append((verts, ids))
    out = list(ends)
    for b in sorted(pendant):
        lst = pendant[b]
        if len(lst) >= 2:
            (v1, i1), (v2, i2) = lst[0], lst[1]
            out.append((v1 + list(reversed(v2[:-1])), i1 + list(reversed(i2))))
    return out, leaves


def _regularize_forest(state, rng):
    pruned = 0
    while state.unmatched():
        cands, leaves = _leaf_pairs(state)
        free = state.unmatched()
        bad_leaves = [v for v in leaves if v not in free]
        if bad_leaves:
            # a matched or non-special leaf: drop its pendant path from F
            cur = bad_leaves[0]
            while True:
                fe = [i for i in state.incident[cur] if i in state.forest]
                if len(fe) != 1:
                    break
                state.forest.discard(fe[0])
                cur = state.other(fe[0], cur)
            pruned += 1
            continue
        cands = [c for c in cands if c[0][0] in free and c[0][-1] in free]
        if not cands:
            raise StuckError("no eligible leaf pair", state=state.dump())
        verts, ids = cands[int(rng.integers(len(cands)))]
        x1, xk1 = verts[0], verts[-1]
        e0 = _extension(state, x1, verts[1], set(ids), rng)
        ek = _extension(state, xk1, verts[-2], set(ids) | {e0}, rng)
        if e0 is None or ek is None:
            raise StuckError(f"no extension edge at {x1 if e0 is None else xk1}", state=state.dump())
        path = [state.other(e0, x1)] + verts + [state.other(ek, xk1)]
        surgery_on_path(state, path, [e0] + ids + [ek])
    return {"pruned": pruned}


# -- local regime ------------------------------------------------------------------


@numba.njit(cache=True)
def _paths_of_length(n, indptr, nbr, slot_pos, starts, is_target, k, cap, out_v, out_e):
    """Simple paths with exactly ``k`` edges from a start to a target with a larger id."""
    count = 0
    on_path = np.zeros(n, dtype=np.bool_)
    stack_v = np.empty(k + 1, dtype=np.int64)
    stack_e = np.empty(k + 1, dtype=np.int64)
    ptr = np.empty(k + 1, dtype=np.int64)
    for si in range(len(starts)):
        s = starts[si]
        depth = 0
        stack_v[0] = s
        ptr[0] = indptr[s]
        on_path[s] = True
        while depth >= 0:
            v = stack_v[depth]
            if ptr[depth] == indptr[v + 1]:
                on_path[v] = False
                depth -= 1
                continue
            j = ptr[depth]
            ptr[depth] += 1
            w = nbr[j]
            if on_path[w]:
                continue
            if depth + 1 == k:
                if is_target[w] and w > s:
                    if count < cap:
                        for t in range(k):
                            out_v[count, t] = stack_v[t]
                            out_e[count, t] = slot_pos[ptr[t] - 1]
                        out_v[count, k] = w
                    count += 1
                continue
            depth += 1
            stack_v[depth] = w
            ptr[depth] = indptr[w]
            on_path[w] = True
    return count


def _enumerate_paths(graph, csr, unmatched, k):
    indptr, nbr, pos = csr
    is_t = np.zeros(graph.n, dtype=np.bool_)
    starts = np.array(sorted(unmatched), dtype=np.int64)
    is_t[starts] = True
    cap = 1 << 16
    while True:
        out_v = np.empty((cap, k + 1), dtype=np.int64)
        out_e = np.empty((cap, k), dtype=np.int64)
        c = _paths_of_length(graph.n, indptr, nbr, pos, starts, is_t, k, cap, out_v, out_e)
        if c <= cap:
            return out_v[:c], graph.ids[out_e[:c]]
        cap = c


def _far_apart(graph, unmatched, k):
    """True when no two unmatched specials are within distance ``k``."""
    un = set(unmatched)
    for s in sorted(un):
        dist = distances_from(graph, s, k)
        if any(v != s and v in un for v in dist):
            return False
    return True


def local_match_specials(g, delta, seed=0, rounds=6, path_cap=5 * 10**6):
    """Round-based pairing of specials by random-priority local maxima.

    In round ``k`` every simple path with ``k`` edges joining two unmatched
    specials draws a keyed priority; a path is kept when its priority beats
    every candidate sharing a vertex with it. Kept paths match their ends and
    the round repeats until no candidate is left. Returns ``(paths, report)``
    where ``paths`` lists ``(vertices, edge ids)`` and the report holds the
    unmatched count and the distance check after each round.
    """
    ws = _as_ws(g)
    graph = ws.graph
    deg = graph.degree()
    specials = set(np.flatnonzero(deg == delta + 1).tolist())
    unmatched = set(specials)
    csr = graph.csr()
    paths = []
    per_round = []
    for k in range(1, rounds + 1):
        sub = 0
        while len(unmatched) >= 2:
            verts, eids = _enumerate_paths(graph, csr, unmatched, k)
            if len(verts) > path_cap:
                raise StageError("local-match", PreconditionError(f"{len(verts)} candidate paths exceed the cap"))
            if not len(verts):
                break
            pr = keyed_uniform(seed, (k << 20) + sub, np.arange(len(verts)))
            rank = np.empty(len(verts), dtype=np.int64)
            rank[np.lexsort((np.arange(len(verts)), pr))] = np.arange(len(verts))
            best = np.full(graph.n, -1, dtype=np.int64)
            np.maximum.at(best, verts.ravel(), np.repeat(rank, k + 1))
            keep = np.flatnonzero((best[verts] == rank[:, None]).all(axis=1))
            for p in keep.tolist():
                paths.append((verts[p].tolist(), eids[p].tolist()))
                unmatched.discard(int(verts[p, 0]))
                unmatched.discard(int(verts[p, -1]))
            sub += 1
        per_round.append(
            {
                "k": k,
                "unmatched": len(unmatched),
                "fraction": len(unmatched) / max(1, len(specials)),
                "sub_rounds": sub,
                "far_apart": _far_apart(graph, unmatched, k),
            }
        )
    report = {"specials": len(specials), "rounds": per_round, "unmatched": sorted(unmatched)}
    return paths, report


def _complete_pairing(graph, unmatched, rng):
    """Greedy shortest-path pairing of leftover specials (per component)."""
    import networkx as nx

    left = sorted(unmatched)
    out = []
    nxg = graph.to_networkx()
    while len(left) >= 2:
        s = left.pop(int(rng.integers(len(left))))
        lengths, routes = nx.single_source_dijkstra(nxg, s)
        reach = [t for t in left if t in lengths]
        if not reach:
            raise StuckError(f"special {s} has no unmatched partner in its component", state={"unmatched": left + [s]})
        t = min(reach, key=lambda v: (lengths[v], v))
        left.remove(t)
        route = routes[t]
        ids = []
        for a, b in zip(route, route[1:]):
            ids.append(int(min(nxg[a][b])))
        out.append((route, ids))
    if left:
        raise StuckError("odd number of specials", state={"unmatched": left})
    return out


def _xor_paths(graph, paths, specials):
    """Edge-disjoint simple paths pairing the specials, from the XOR of ``paths``."""
    cnt = {}
    for _, ids in paths:
        for i in ids:
            cnt[i] = cnt.get(i, 0) + 1
    keep = {i for i, c in cnt.items() if c % 2}
    ends = {}
    for i in keep:
        a, b = graph.endpoints(i)
        ends[i] = (int(a), int(b))
    inc = {}
    for i in sorted(keep):
        a, b = ends[i]
        inc.setdefault(a, []).append(i)
        inc.setdefault(b, []).append(i)
    odd = sorted(v for v, lst in inc.items() if len(lst) % 2)
    if set(odd) != set(specials):
        raise AssertionError("XOR parity does not match the matched specials")
    used = set()
    out = []
    pending = set(odd)
    for s in odd:
        if s not in pending:
            continue
        verts, ids = [s], []
        cur = s
        while True:
            nxt = next((i for i in inc[cur] if i not in used), None)
            if nxt is None:
                break
            used.add(nxt)
            a, b = ends[nxt]
            cur = b if a == cur else a
            verts.append(cur)
            ids.append(nxt)
        pending.discard(s)
        pending.discard(cur)
        # loop erasure keeps a simple path with the same ends
        lv, li, pos = [verts[0]], [], {verts[0]: 0}
        for v, e in zip(verts[1:], ids):
            if v in pos:
                cut = pos[v]
                for w in lv[cut + 1:]:
                    del pos[w]
                lv, li = lv[:cut + 1], li[:cut]
            else:
                pos[v] = len(lv)
                lv.append(v)
                li.append(e)
        out.append((lv, li))
    return out


def _regularize_local(state, ws, delta, seed, rng, rounds):
    paths, report = local_match_specials(ws, delta, seed, rounds)
    if report["unmatched"]:
        paths = paths + _complete_pairing(ws.graph, report["unmatched"], rng)
    pairs = _xor_paths(ws.graph, paths, state.specials)
    banned = {i for _, ids in pairs for i in ids}
    for verts, ids in pairs:
        x1, xk1 = verts[0], verts[-1]
        e0 = _extension(state, x1, verts[1], banned, rng)
        ek = _extension(state, xk1, verts[-2], banned | {e0}, rng)
        if e0 is None or ek is None:
            raise StuckError(f"no extension edge at {x1 if e0 is None else xk1}", state=state.dump())
        path = [state.other(e0, x1)] + verts + [state.other(ek, xk1)]
        surgery_on_path(state, path, [e0] + ids + [ek])
    return {"local": report, "completed_by_shortest_paths": len(report["unmatched"])}


def regularize(g, delta, seed=0, regime="auto", rounds=6):
    """``delta``-regular spanning subgraph with witnesses at most three times longer.

    ``regime`` is ``"forest"`` (needs ``delta`` even), ``"local"`` (needs ``delta``
    odd) or ``"auto"``. Returns ``(WitnessedSubgraph, report)``; the output
    bound is ``3 * L`` of the input.
    """
    ws = _as_ws(g)
    deg = ws.graph.degree()
    if ws.n == 0:
        raise ParameterError("empty graph")
    if deg.min() < delta or deg.max() > delta + 1:
        raise PreconditionError(f"degrees must lie in [{delta}, {delta + 1}]")
    if regime == "auto":
        regime = "forest" if delta % 2 == 0 else "local"
    if regime not in ("forest", "local"):
        raise ParameterError(f"unknown regime {regime!r}")
    if (regime == "forest") != (delta % 2 == 0):
        raise ParameterError(f"regime {regime!r} does not fit delta={delta}")
    special = deg == delta + 1
    u, v = ws.graph.edges[:, 0], ws.graph.edges[:, 1]
    if np.any(special[u] & special[v]):
        raise PreconditionError("two specials are adjacent")
    rng = np.random.default_rng(seed)
    g_in = girth(ws.graph)
    state = SurgeryState.from_witnessed(ws, delta)
    if regime == "forest":
        state.forest = set(peel_cycles(ws, seed).tolist())
        extra = _regularize_forest(state, rng)
    else:
        extra = _regularize_local(state, ws, delta, seed, rng, rounds)
    out = state.witnessed(3 * ws.L)
    dg = out.graph.degree()
    g_out = girth(out.graph)
    problems = out.problems() if out.host is not None else []
    if np.any(dg != delta) or problems or (not math.isinf(g_in) and 3 * g_out < g_in):
        raise CertificateError(
            f"regularized graph failed verification: degrees {dg.min()}..{dg.max()}, "
            f"girth {g_out} vs {g_in}, {len(problems)} witness problems"
        )
    report = {
        "regime": regime,
        "delta": delta,
        "specials": int(special.sum()),
        "surgeries": state.surgeries,
        "L_in": ws.L,
        "L_out": out.L,
        "max_witness": out.max_witness(),
        "girth_in": None if math.isinf(g_in) else int(g_in),
        "girth_out": None if math.isinf(g_out) else int(g_out),
        "seed": seed,
        **extra,
    }
    return out, report


# -- 2-factors and permutations ----------------------------------------------------------


def two_factorize(g4, seed=0):
    """Split a 4-regular multigraph into two 2-regular spanning subgraphs.

    An Eulerian orientation gives every vertex two out- and two in-edges; a
    perfect matching of the out/in incidence graph picks one of each per vertex.
    Edge ids are kept, so the two factors partition ``g4``'s ids.
    """
    if g4.regular_degree() != 4:
        raise ParameterError("two_factorize needs a 4-regular graph")
    tails, heads = euler_orientation(g4)
    bg = BipartiteGraph(g4.n, g4.n, np.stack([tails, heads], axis=1))
    m, stats = match_to_completion(bg, seed)
    if not stats["perfect"]:
        raise AssertionError("out/in incidence graph of an Eulerian orientation has no perfect matching")
    slots = {}
    for pos, key in enumerate(zip(tails.tolist(), heads.tolist())):
        slots.setdefault(key, []).append(pos)
    first = np.zeros(g4.m, dtype=bool)
    for a, b in m.pairs():
        first[slots[(a, b)].pop()] = True
    f1 = Graph(g4.n, g4.edges[first], g4.ids[first])
    f2 = Graph(g4.n, g4.edges[~first], g4.ids[~first])
    return f1, f2


def euler_orient_2regular(f):
    """Successor bijection of a 2-regular graph (each cycle oriented once)."""
    return successor_of_2regular(f)


@dataclass
class PermutationPair:
    alpha: np.ndarray
    beta: np.ndarray
    L: int
    host: Graph | None = field(default=None, repr=False)

    def is_bijection(self):
        n = len(self.alpha)
        return all(len(p) == n and np.array_equal(np.sort(p), np.arange(n)) for p in (self.alpha, self.beta))

    def displacements(self, host=None):
        """Max host distance ``x -> alpha(x)`` and ``x -> beta(x)`` (``inf`` beyond ``L``)."""
        host = host if host is not None else self.host
        out = []
        for p in (self.alpha, self.beta):
            pairs = np.stack([np.arange(len(p)), p], axis=1)
            out.append(float(pair_distances(host, pairs, self.L).max()))
        return tuple(out)


@dataclass
class WordReport:
    free_up_to: int
    violating_word: str | None
    fixed_points: int
    words_checked: dict

    def to_dict(self):
        return {
            "free_up_to": self.free_up_to,
            "violating_word": self.violating_word,
            "fixed_points": self.fixed_points,
            "words_checked": self.words_checked,
        }


_INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduced_word_count(k):
    return 4 * 3 ** (k - 1) if k >= 1 else 1


def _words_from(maps, first, max_len, ident, stop=True):
    """Reduced words starting with ``first``: ``(counts, violation)``.

    ``violation`` is ``(length, index within that length, word, fixed points)``
    for the first fixed point found; with ``stop`` the search ends there.
    """
    counts = {}
    found = None
    level = [(first, maps[first][ident])]
    for k in range(1, max_len + 1):
        if k > 1:
            level = [
                (w + c, maps[c][img]) for w, img in level for c in "aAbB" if _INVERSE[w[-1]] != c
            ]
        counts[k] = len(level)
        if found is None:
            for i, (w, img) in enumerate(level):
                fp = int(np.count_nonzero(img == ident))
                if fp:
                    found = (k, i, w, fp)
                    break
        if found is not None and stop:
            break
    return counts, found


def word_check(p, max_len, jobs=1, stop=True):
    """Search reduced words up to ``max_len`` for a fixed point.

    Letters ``a, A, b, B`` stand for ``alpha``, its inverse, ``beta``, its
    inverse; words are applied left to right. Each first letter is an
    independent subtree (searched in parallel when ``jobs > 1``); the first
    violation is the shortest one, ties broken by enumeration order. With
    ``stop=False`` every length up to ``max_len`` is enumerated and counted.
    """
    if max_len < 1:
        raise ParameterError("max_len must be >= 1")
    alpha = np.asarray(p.alpha, dtype=np.int64)
    beta = np.asarray(p.beta, dtype=np.int64)
    maps = {"a": alpha, "A": np.argsort(alpha), "b": beta, "B": np.argsort(beta)}
    ident = np.arange(len(alpha))
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(jobs, 4)) as ex:
            parts = list(ex.map(lambda c: _words_from(maps, c, max_len, ident, stop), "aAbB"))
    else:
        parts = [_words_from(maps, c, max_len, ident, stop) for c in "aAbB"]
    hits = [(v[0], j, v[1], v[2], v[3]) for j, (_, v) in enumerate(parts) if v is not None]
    first = min(hits) if hits else None
    top = first[0] if first and stop else max_len
    counts = {k: 0 for k in range(1, top + 1)}
    for cnt, _ in parts:
        # every subtree reaches ``top``: none stops before the shortest violation
        for k in range(1, top + 1):
            counts[k] += cnt[k]
    if first is None:
        return WordReport(max_len, None, 0, counts)
    return WordReport(first[0] - 1, first[3], first[4], counts)


def build_f2(g, lam, g_target, seed=0, word_cap=6, delta=4, regime="auto", jobs=1):
    """Bijections ``alpha, beta`` with bounded displacement and no short fixed-point words.

    Stages: Lipschitz extraction with min degree ``delta``, regularization to a
    ``delta``-regular graph, two 2-factors, and their cycle orientations.
    Returns ``(PermutationPair, certificate)``.
    """
    d = g.regular_degree()
    if d is None:
        raise ParameterError("input graph must be regular")
    if delta != 4:
        raise ParameterError("the two-factor route needs delta = 4")

    def stage(name, fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except StageError:
            raise
        except LipgirthError as exc:
            raise StageError(name, exc) from exc

    ws, lcert = stage("lipschitz", lipschitz_extract, g, lam, delta, g_target, seed)
    reg, rrep = stage("regularize", regularize, ws, delta, seed, regime)
    f1, f2 = stage("two-factor", two_factorize, reg.graph, seed)
    alpha = successor_of_2regular(f1)
    beta = successor_of_2regular(f2)
    pp = PermutationPair(alpha, beta, reg.L, g)
    if not pp.is_bijection():
        raise StageError("verify", CertificateError("alpha or beta is not a bijection"))
    da, db = pp.displacements()
    if max(da, db) > reg.L:
        raise StageError("verify", CertificateError(f"displacement {max(da, db)} exceeds L={reg.L}"))
    required = max(0, min(g_target // reg.L - 1, word_cap))
    wr = word_check(pp, word_cap, jobs, stop=False)
    if wr.free_up_to < required:
        raise StageError("verify", CertificateError(f"word {wr.violating_word} has a fixed point below {required}"))
    cert = {
        "n": g.n,
        "d": d,
        "lambda": float(lam),
        "g_target": g_target,
        "delta": delta,
        "L": reg.L,
        "L_lipschitz": ws.L,
        "max_displacement_alpha": da,
        "max_displacement_beta": db,
        "free_up_to": wr.free_up_to,
        "required_free": required,
        "violating_word": wr.violating_word,
        "words_checked": wr.words_checked,
        "lipschitz": lcert,
        "regularize": rrep,
        "seed": seed,
    }
    return pp, cert
