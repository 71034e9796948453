"""Subgraphs whose edges carry witness walks in a host graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

__all__ = ["WitnessedSubgraph", "glue"]


def glue(first, second):
    """Concatenate two walks sharing an endpoint, orienting them as needed.

    Returns a walk starting at the free end of ``first``.
    """
    a, b = list(first), list(second)
    if a[-1] == b[0]:
        pass
    elif a[-1] == b[-1]:
        b.reverse()
    elif a[0] == b[0]:
        a.reverse()
    elif a[0] == b[-1]:
        a.reverse()
        b.reverse()
    else:
        raise ValueError("walks do not share an endpoint")
    return tuple(a + b[1:])


@dataclass
class WitnessedSubgraph:
    """``graph`` plus, per edge id, a host walk ``(p_0, ..., p_k)`` joining its endpoints.

    ``L`` is the declared Lipschitz bound: every witness has ``k <= L``.
    """

    graph: Graph
    witness: dict
    L: int
    host: Graph | None = field(default=None, repr=False)

    @classmethod
    def identity(cls, g, host=None):
        """Every edge witnessed by itself (``L = 1``)."""
        w = {int(i): (int(u), int(v)) for (u, v), i in zip(g.edges.tolist(), g.ids.tolist())}
        return cls(g, w, 1, host if host is not None else g)

    @property
    def n(self):
        return self.graph.n

    def max_witness(self):
        return max((len(p) - 1 for p in self.witness.values()), default=0)

    def oriented(self, edge_id, start):
        """Witness of ``edge_id`` read from ``start``."""
        p = self.witness[int(edge_id)]
        return p if p[0] == start else tuple(reversed(p))

    def restrict(self, g):
        """Same witnesses on the subgraph ``g`` (ids must be a subset)."""
        return WitnessedSubgraph(g, {int(i): self.witness[int(i)] for i in g.ids.tolist()}, self.L, self.host)

    def rows(self):
        """``(u, v, walk)`` per edge in file order (sorted by min, max, id)."""
        e = self.graph.edges
        lo = e.min(axis=1)
        hi = e.max(axis=1)
        order = np.lexsort((self.graph.ids, hi, lo))
        for pos in order.tolist():
            u, v = int(lo[pos]), int(hi[pos])
            yield u, v, self.oriented(self.graph.ids[pos], u)

    def problems(self, host=None):
        """List of ``(edge_id, reason)`` for witnesses that fail to certify their edge."""
        host = host if host is not None else self.host
        keys = set(host.edge_keys().tolist()) if host is not None else None
        n = self.graph.n
        out = []
        for (u, v), i in zip(self.graph.edges.tolist(), self.graph.ids.tolist()):
            p = self.witness.get(int(i))
            if p is None:
                out.append((i, "missing witness"))
                continue
            if {p[0], p[-1]} != {u, v} or (u == v) != (p[0] == p[-1]):
                out.append((i, "witness endpoints differ from edge"))
            elif len(p) - 1 > self.L:
                out.append((i, f"witness length {len(p) - 1} exceeds L={self.L}"))
            elif keys is not None:
                for a, b in zip(p, p[1:]):
                    if min(a, b) * n + max(a, b) not in keys:
                        out.append((i, f"({a}, {b}) is not a host edge"))
                        break
        return out
