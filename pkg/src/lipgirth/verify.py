"""Certificate checks that recompute every claim from the raw files.

Only the text readers are shared with the producers; all graph logic here is
written independently on plain Python containers.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from . import io

__all__ = [
    "VerifyReport",
    "girth_below",
    "verify_subgraph",
    "verify_witnessed",
    "verify_permutations",
    "verify_matching",
    "verify_orientation",
    "verify_zaction",
    "verify_files",
]


@dataclass
class VerifyReport:
    kind: str
    ok: bool = True
    problems: list = field(default_factory=list)
    facts: dict = field(default_factory=dict)

    def fail(self, msg):
        self.ok = False
        if len(self.problems) < 50:
            self.problems.append(msg)

    def to_dict(self):
        return {"kind": self.kind, "ok": self.ok, "problems": self.problems, "facts": self.facts}


def _edge_list(g):
    return [tuple(map(int, e)) for e in g.edges.tolist()]


def _adjacency(n, edges):
    adj = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        if u != v:
            adj[v].append((u, i))
    return adj


def girth_below(n, edges, limit):
    """Length of a shortest cycle if it is ``< limit``, else ``None``.

    Loops count as 1-cycles and parallel edges as 2-cycles. A BFS from every
    root, cut at depth ``limit // 2``, sees every cycle shorter than ``limit``.
    """
    best = None
    keys = Counter()
    for u, v in edges:
        if u == v:
            return 1
        keys[(min(u, v), max(u, v))] += 1
    if any(c > 1 for c in keys.values()):
        return 2 if limit > 2 else None
    adj = _adjacency(n, edges)
    depth_cap = limit // 2
    for r in range(n):
        dist = {r: 0}
        via = {r: -1}
        q = deque([r])
        while q:
            x = q.popleft()
            if dist[x] >= depth_cap:
                continue
            for y, i in adj[x]:
                if i == via[x]:
                    continue
                if y in dist:
                    c = dist[x] + dist[y] + 1
                    if c < limit and (best is None or c < best):
                        best = c
                else:
                    dist[y] = dist[x] + 1
                    via[y] = i
                    q.append(y)
        if best is not None and best <= 3:
            break
    return best if best is not None and best < limit else None


def _degrees(n, edges):
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def _host_keys(host):
    return {(min(u, v), max(u, v)) for u, v in _edge_list(host)}


def verify_subgraph(host, sub, girth_min=None, min_degree=None):
    """``sub`` uses only host edges (with multiplicity), spans, and meets the girth and degree claims."""
    r = VerifyReport("subgraph")
    if sub.n != host.n:
        r.fail(f"vertex count {sub.n} differs from host {host.n}")
        return r
    avail = Counter((min(u, v), max(u, v)) for u, v in _edge_list(host))
    used = Counter((min(u, v), max(u, v)) for u, v in _edge_list(sub))
    for key, c in sorted(used.items()):
        if c > avail.get(key, 0):
            r.fail(f"edge {key} is not a host edge")
    edges = _edge_list(sub)
    deg = _degrees(sub.n, edges)
    r.facts["min_degree"] = min(deg) if deg else 0
    if min_degree is not None and r.facts["min_degree"] < min_degree:
        v = deg.index(r.facts["min_degree"])
        r.fail(f"vertex {v} has degree {deg[v]} < {min_degree}")
    if girth_min is not None:
        c = girth_below(sub.n, edges, girth_min)
        r.facts["short_cycle"] = c
        if c is not None:
            r.fail(f"cycle of length {c} < {girth_min}")
    return r


def verify_witnessed(host, n, L, rows, girth_min=None, min_degree=None, max_degree=None):
    """Every row's walk joins its endpoints along host edges in at most ``L`` steps."""
    r = VerifyReport("witnessed")
    if n != host.n:
        r.fail(f"vertex count {n} differs from host {host.n}")
        return r
    keys = _host_keys(host)
    edges = []
    longest = 0
    for idx, (u, v, walk) in enumerate(rows):
        edges.append((u, v))
        k = len(walk) - 1
        longest = max(longest, k)
        if not (0 <= u < n and 0 <= v < n):
            r.fail(f"row {idx}: edge ({u}, {v}) out of range")
            continue
        if {walk[0], walk[-1]} != {u, v}:
            r.fail(f"row {idx}: witness of edge ({u}, {v}) ends at {walk[0]}, {walk[-1]}")
        if k > L:
            r.fail(f"row {idx}: witness of edge ({u}, {v}) has length {k} > L={L}")
        if k < 1:
            r.fail(f"row {idx}: empty witness for edge ({u}, {v})")
        for a, b in zip(walk, walk[1:]):
            if (min(a, b), max(a, b)) not in keys:
                r.fail(f"row {idx}: witness step ({a}, {b}) of edge ({u}, {v}) is not a host edge")
                break
    deg = _degrees(n, edges)
    r.facts.update(max_witness=longest, min_degree=min(deg, default=0), max_degree=max(deg, default=0))
    if min_degree is not None and r.facts["min_degree"] < min_degree:
        r.fail(f"min degree {r.facts['min_degree']} < {min_degree}")
    if max_degree is not None and r.facts["max_degree"] > max_degree:
        r.fail(f"max degree {r.facts['max_degree']} > {max_degree}")
    if girth_min is not None:
        c = girth_below(n, edges, girth_min)
        r.facts["short_cycle"] = c
        if c is not None:
            r.fail(f"cycle of length {c} < {girth_min}")
    return r


def _bijection(p, n, name, r):
    if len(p) != n:
        r.fail(f"{name} has {len(p)} images for {n} points")
        return False
    seen = [False] * n
    for x, y in enumerate(p):
        if not 0 <= y < n:
            r.fail(f"{name}({x}) = {y} out of range: not a bijection")
            return False
        if seen[y]:
            r.fail(f"{name} repeats image {y}: not a bijection")
            return False
        seen[y] = True
    return True


def _within(adj, x, y, L):
    if x == y:
        return 0
    dist = {x: 0}
    q = deque([x])
    while q:
        a = q.popleft()
        if dist[a] >= L:
            continue
        for b, _ in adj[a]:
            if b not in dist:
                dist[b] = dist[a] + 1
                if b == y:
                    return dist[b]
                q.append(b)
    return None


def verify_permutations(host, alpha, beta, L, words=0):
    """Bijections, displacement ``<= L`` in the host and no fixed point of a reduced word up to ``words``."""
    r = VerifyReport("permutations")
    n = host.n
    alpha, beta = [int(x) for x in alpha], [int(x) for x in beta]
    ok = _bijection(alpha, n, "alpha", r) & _bijection(beta, n, "beta", r)
    if not ok:
        return r
    adj = _adjacency(n, _edge_list(host))
    for name, p in (("alpha", alpha), ("beta", beta)):
        worst = 0
        for x in range(n):
            d = _within(adj, x, p[x], L)
            if d is None:
                r.fail(f"{name} moves {x} to {p[x]}, farther than L={L}")
                break
            worst = max(worst, d)
        r.facts[f"max_displacement_{name}"] = worst
    if words:
        inv = lambda p: [i for i, _ in sorted(enumerate(p), key=lambda t: t[1])]  # noqa: E731
        maps = {"a": alpha, "A": inv(alpha), "b": beta, "B": inv(beta)}
        undo = {"a": "A", "A": "a", "b": "B", "B": "b"}
        level = [("", list(range(n)))]
        counts = {}
        for k in range(1, words + 1):
            nxt = []
            for w, img in level:
                for c in "aAbB":
                    if w and undo[w[-1]] == c:
                        continue
                    m = maps[c]
                    new = [m[y] for y in img]
                    fixed = sum(1 for x in range(n) if new[x] == x)
                    if fixed:
                        r.fail(f"word {w + c} fixes {fixed} points")
                        r.facts["word_counts"] = counts
                        return r
                    nxt.append((w + c, new))
            counts[k] = len(nxt)
            level = nxt
        r.facts["word_counts"] = counts
    return r


def verify_matching(host, pairs, perfect=True):
    r = VerifyReport("matching")
    keys = _host_keys(host)
    cover = Counter()
    for u, v in pairs:
        if (min(u, v), max(u, v)) not in keys:
            r.fail(f"({u}, {v}) is not a host edge")
        cover[u] += 1
        cover[v] += 1
    for x, c in sorted(cover.items()):
        if c > 1:
            r.fail(f"vertex {x} is covered {c} times")
    r.facts["size"] = len(pairs)
    if perfect:
        missing = [x for x in range(host.n) if cover[x] == 0]
        if missing:
            r.fail(f"{len(missing)} vertices unmatched, first {missing[0]}")
    return r


def verify_orientation(host, oriented_pairs, threshold):
    """Perfect matching given as ``tail head`` rows; every vertex has ``>= threshold``
    non-matching neighbours of the other class."""
    r = verify_matching(host, oriented_pairs, perfect=True)
    r.kind = "orientation"
    if not r.ok:
        return r
    cls = [0] * host.n
    mate = [-1] * host.n
    for t, h in oriented_pairs:
        cls[h] = 1
        mate[t], mate[h] = h, t
    cross = [0] * host.n
    skipped = set()
    for u, v in _edge_list(host):
        if mate[u] == v and (min(u, v), max(u, v)) not in skipped:
            skipped.add((min(u, v), max(u, v)))
            continue
        if cls[u] != cls[v]:
            cross[u] += 1
            cross[v] += 1
    low = min(cross) if cross else 0
    r.facts["min_cross"] = low
    if low < threshold:
        v = cross.index(low)
        r.fail(f"vertex {v} has {low} cross-class neighbours < {threshold}")
    return r


def verify_zaction(host, succ):
    """A bijection moving every vertex along a host edge with no fixed points or 2-cycles."""
    r = VerifyReport("zaction")
    n = host.n
    succ = [int(x) for x in succ]
    if not _bijection(succ, n, "successor", r):
        return r
    keys = _host_keys(host)
    for x, y in enumerate(succ):
        if x == y:
            r.fail(f"{x} is a fixed point")
        elif succ[y] == x:
            r.fail(f"{x} and {y} form a 2-cycle")
        elif (min(x, y), max(x, y)) not in keys:
            r.fail(f"({x}, {y}) is not a host edge")
        if len(r.problems) >= 50:
            break
    return r


def verify_files(kind, host_path, artifact_path, **claims):
    """Read the files and dispatch on ``kind``; returns a :class:`VerifyReport`."""
    host = io.read_graph(host_path)
    if kind == "subgraph":
        return verify_subgraph(host, io.read_graph(artifact_path), claims.get("girth"), claims.get("min_degree"))
    if kind == "witnessed":
        n, L, rows = io.read_witnessed(artifact_path)
        L_claim = claims.get("L")
        r = verify_witnessed(
            host, n, L if L_claim is None else min(L, L_claim), rows,
            claims.get("girth"), claims.get("min_degree"), claims.get("max_degree"),
        )
        return r
    if kind == "permutations":
        alpha, beta = io.read_permutations(artifact_path)
        return verify_permutations(host, alpha, beta, claims.get("L") or host.n, claims.get("words") or 0)
    if kind == "matching":
        return verify_matching(host, io.read_matching(artifact_path))
    if kind == "orientation":
        return verify_orientation(host, io.read_matching(artifact_path), claims.get("threshold") or 0)
    if kind == "zaction":
        return verify_zaction(host, io.read_permutation(artifact_path))
    raise io.FormatError(f"unknown artifact kind {kind!r}")
