"""Eulerian orientations of even-degree multigraphs."""

from __future__ import annotations

import numba
import numpy as np

from .errors import ParameterError

__all__ = ["euler_orientation", "successor_of_2regular"]


@numba.njit(cache=True)
def _orient(n, indptr, nbr, slot_pos, m):
    # closed trails in Hierholzer fashion: leave each vertex by its first
    # unused slot (slots are sorted by neighbour, then edge id)
    tail = np.full(m, -1, np.int64)
    ptr = indptr[:-1].copy()
    for s in range(n):
        while True:
            while ptr[s] < indptr[s + 1] and tail[slot_pos[ptr[s]]] >= 0:
                ptr[s] += 1
            if ptr[s] == indptr[s + 1]:
                break
            cur = s
            while True:
                while ptr[cur] < indptr[cur + 1] and tail[slot_pos[ptr[cur]]] >= 0:
                    ptr[cur] += 1
                if ptr[cur] == indptr[cur + 1]:
                    break
                j = ptr[cur]
                tail[slot_pos[j]] = cur
                cur = nbr[j]
    return tail


def euler_orientation(g):
    """``(tails, heads)`` per edge position with in-degree = out-degree everywhere.

    Requires every degree to be even. Trails start at the lowest vertex with an
    unused edge and always take the lowest ``(neighbor, id)`` slot.
    """
    deg = g.degree()
    if np.any(deg % 2):
        raise ParameterError("Eulerian orientation needs all degrees even")
    indptr, nbr, pos = g.csr()
    tails = _orient(g.n, indptr, nbr, pos, g.m)
    u, v = g.edges[:, 0], g.edges[:, 1]
    heads = np.where(tails == u, v, u)
    return tails, heads


def successor_of_2regular(g):
    """Successor bijection of a 2-regular multigraph, one orientation per cycle.

    Each cycle starts at its lowest vertex and moves first to its lower
    neighbour; a pair of parallel edges becomes a transposition.
    """
    if g.n and (g.regular_degree() != 2):
        raise ParameterError("graph is not 2-regular")
    indptr, nbr, pos = g.csr()
    succ = np.full(g.n, -1, dtype=np.int64)
    for s in range(g.n):
        if succ[s] >= 0:
            continue
        j = indptr[s]  # lowest neighbour comes first in the slot order
        prev_edge = pos[j]
        cur = int(nbr[j])
        succ[s] = cur
        while cur != s:
            a, b = indptr[cur], indptr[cur] + 1
            nxt = b if pos[a] == prev_edge else a
            prev_edge = pos[nxt]
            succ[cur] = nbr[nxt]
            cur = int(nbr[nxt])
    return succ
