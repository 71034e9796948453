"""Spanning Lipschitz subgraphs with bounded degrees from the walk-power graph.

Pipeline: pick ``L`` from the cycle-growth rate ``lambda``; build the multigraph
whose ``(x, y)`` multiplicity is the number of length-``L/2`` walks from ``x``
to ``y``; extract a subgraph of large girth and minimum degree ``delta`` from
it; then tame degrees in two stages so that they land in ``[delta, delta+1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rng import keyed_uniform
from .cycles import CyclesProfile, check_hypothesis, count_short_cycles, girth
from .errors import (
    LipgirthError,
    NonTerminationError,
    ParameterError,
    PreconditionError,
    ResourceCapError,
    StageError,
)
from .girth_subgraph import CycleInstance, ExtractionParams, extract
from .graph import Graph
from .witness import WitnessedSubgraph, glue

__all__ = [
    "compute_L",
    "PowerGraph",
    "power_graph",
    "tame_degrees_stage1",
    "tame_degrees_stage2",
    "lipschitz_extract",
]

DEFAULT_WALK_CAP = 2 * 10**7


def _floor_log(a, b):
    """Largest ``t >= 0`` with ``b**t <= a`` for rationals ``a >= 1``, ``b > 1``."""
    t, power = 0, Fraction(1)
    while power * b <= a:
        power *= b
        t += 1
    return t


def compute_L(lam, delta, d):
    """``max(2*floor(log(12 delta)/-log(lam)) + 2, 2*floor(log(delta)/(2 log d)) + 2)``.

    Floors are evaluated exactly with rational powers, so boundary cases such as
    ``lam = 1/(12 delta)`` are not subject to rounding.
    """
    lam = Fraction(lam).limit_denominator(10**15) if not isinstance(lam, Fraction) else lam
    if not 0 < lam < 1:
        raise ParameterError("lambda must lie in (0, 1)")
    if delta < 1 or d < 2:
        raise ParameterError("need delta >= 1 and d >= 2")
    first = 2 * _floor_log(Fraction(12 * delta), 1 / lam) + 2
    second = 2 * _floor_log(Fraction(delta), Fraction(d) ** 2) + 2
    return max(first, second)


@dataclass
class PowerGraph:
    """Walk multigraph: edge ``i`` of ``graph`` is the walk ``walks[i]`` in ``base``."""

    base: Graph = field(repr=False)
    half_L: int
    graph: Graph = field(repr=False)
    walks: np.ndarray = field(repr=False)
    closed: np.ndarray = field(repr=False)

    def degree_report(self):
        deg = self.graph.degree()
        return {
            "half_L": self.half_L,
            "min_degree": int(deg.min()),
            "max_degree": int(deg.max()),
            "closed_walks_min": int(self.closed.min()),
            "closed_walks_max": int(self.closed.max()),
        }

    def witnessed(self, sub):
        """Witnessed subgraph for a subgraph ``sub`` of the power graph."""
        ids = sub.ids
        w = {int(i): tuple(int(v) for v in self.walks[i]) for i in ids.tolist()}
        return WitnessedSubgraph(sub, w, self.half_L, self.base)


def power_graph(g, half_L, cap=DEFAULT_WALK_CAP):
    """One edge per length-``half_L`` walk with distinct endpoints.

    A walk and its reverse give the same undirected edge, so each edge is
    recorded once from its smaller endpoint. Closed walks are dropped and
    counted per vertex in ``closed``.
    """
    if half_L < 1:
        raise ParameterError("half_L must be >= 1")
    indptr, nbr, _ = g.csr()
    deg = np.diff(indptr)
    walks = np.arange(g.n, dtype=np.int64)[:, None]
    for _ in range(half_L):
        last = walks[:, -1]
        reps = deg[last]
        total = int(reps.sum())
        if total > cap:
            raise ResourceCapError(f"more than {cap} walks of length {half_L}", cap=cap, reached=total)
        offsets = np.zeros(len(walks), dtype=np.int64)
        np.cumsum(reps[:-1], out=offsets[1:])
        slot = np.repeat(indptr[last] - offsets, reps) + np.arange(total)
        walks = np.hstack([np.repeat(walks, reps, axis=0), nbr[slot][:, None]])
    start, end = walks[:, 0], walks[:, -1]
    closed = np.bincount(start[start == end], minlength=g.n)
    walks = walks[start < end]
    pg = Graph(g.n, walks[:, [0, -1]])
    return PowerGraph(g, half_L, pg, walks, closed)


def _local_max_edges(g, mask, seed, rnd):
    """Edges (positions) in ``mask`` whose priority beats every masked edge sharing an endpoint."""
    pos = np.flatnonzero(mask)
    r = keyed_uniform(seed, rnd, g.ids[pos])
    rank = np.empty(len(pos), dtype=np.int64)
    rank[np.lexsort((g.ids[pos], r))] = np.arange(len(pos))
    best = np.full(g.n, -1, dtype=np.int64)
    u, v = g.edges[pos, 0], g.edges[pos, 1]
    np.maximum.at(best, u, rank)
    np.maximum.at(best, v, rank)
    return pos[(best[u] == rank) & (best[v] == rank)]


def tame_degrees_stage1(g, delta, seed=0, round_cap=10**4, return_rounds=False):
    """Delete edges between two vertices of degree ``> delta`` until none remain.

    Each round draws fresh priorities for the conflicted edges and deletes the
    local maxima, which pairwise share no endpoint, so degrees never drop
    below ``delta``.
    """
    deg = g.degree()
    if g.n and deg.min() < delta:
        raise PreconditionError(f"minimum degree {int(deg.min())} below delta={delta}")
    rounds = 0
    while True:
        deg = g.degree()
        over = deg > delta
        mask = over[g.edges[:, 0]] & over[g.edges[:, 1]]
        if not mask.any():
            break
        if rounds >= round_cap:
            raise NonTerminationError(f"stage 1 did not finish in {round_cap} rounds")
        rounds += 1
        g = g.remove(g.ids[_local_max_edges(g, mask, seed, rounds)])
    return (g, rounds) if return_rounds else g


def _pair_spokes(spokes, want):
    """Pick ``want`` disjoint spoke pairs with distinct far endpoints.

    ``spokes`` is a list of ``(neighbor, edge_id)`` in preference order.
    Pairs come from the two largest neighbor groups, which succeeds whenever
    any valid pairing exists.
    """
    groups = {}
    for v, e in spokes:
        groups.setdefault(v, []).append(e)
    order = {v: i for i, (v, _) in enumerate(reversed(spokes))}
    pairs = []
    for _ in range(want):
        live = sorted((v for v in groups if groups[v]), key=lambda v: (-len(groups[v]), order[v]))
        if len(live) < 2:
            raise PreconditionError("spokes of a vertex cannot be paired into non-loop chords")
        a, b = live[0], live[1]
        pairs.append(((a, groups[a].pop(0)), (b, groups[b].pop(0))))
    return pairs


def tame_degrees_stage2(g1, delta, seed=0):
    """Replace spoke pairs at over-degree vertices by chords through the vertex.

    ``g1`` is a :class:`WitnessedSubgraph` (or a plain graph, witnessed by its
    own edges). A vertex ``x`` of degree ``> delta`` loses ``2*floor((deg-delta)/2)``
    spokes; their far endpoints are joined in pairs by chords witnessed by the
    concatenation of the two spoke witnesses.
    """
    ws = g1 if isinstance(g1, WitnessedSubgraph) else WitnessedSubgraph.identity(g1)
    g = ws.graph
    deg = g.degree()
    over = deg > delta
    if np.any(over[g.edges[:, 0]] & over[g.edges[:, 1]]):
        raise PreconditionError("two adjacent vertices both exceed degree delta")
    rng = np.random.default_rng(seed)
    removed, new_pairs, new_wit = [], [], []
    indptr, nbr, pos = g.csr()
    for x in np.flatnonzero(over).tolist():
        want = (int(deg[x]) - delta) // 2
        if want == 0:
            continue
        slots = rng.permutation(np.arange(indptr[x], indptr[x + 1]))
        spokes = [(int(nbr[s]), int(g.ids[pos[s]])) for s in slots]
        for (v1, e1), (v2, e2) in _pair_spokes(spokes, want):
            removed += [e1, e2]
            new_pairs.append((v1, v2))
            new_wit.append(glue(ws.oriented(e1, v1), ws.oriented(e2, x)))
    h = g.remove(removed)
    h, new_ids = h.add(new_pairs)
    w = {int(i): ws.witness[int(i)] for i in h.ids.tolist() if int(i) in ws.witness}
    w.update({int(i): p for i, p in zip(new_ids.tolist(), new_wit)})
    return WitnessedSubgraph(h, w, 2 * ws.L, ws.host)


def _empty_profile(g_target):
    k = max(g_target - 1, 1)
    return CyclesProfile(
        g_target,
        np.zeros((0, g_target)),
        np.empty((0, k), np.int32),
        np.empty((0, k), np.int32),
        np.zeros(0, np.int64),
    )


def _verify_output(ws, delta, g_target):
    deg = ws.graph.degree()
    gh = girth(ws.graph)
    bad = ws.problems()
    checks = {
        "min_degree": int(deg.min()),
        "max_degree": int(deg.max()),
        "max_witness": ws.max_witness(),
        "girth": None if math.isinf(gh) else int(gh),
        "witness_problems": len(bad),
    }
    ok = (
        deg.min() >= delta
        and deg.max() <= delta + 1
        and ws.max_witness() <= ws.L
        and not bad
        and gh * ws.L >= g_target
    )
    return ok, checks


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except LipgirthError as exc:
        raise StageError(name, exc) from exc


def lipschitz_extract(
    g, lam, delta, g_target, seed=0, retries=2, override=False, walk_cap=DEFAULT_WALK_CAP, algorithm=1
):
    """Spanning ``L``-Lipschitz subgraph with girth ``>= g_target/L`` and degrees in ``[delta, delta+1]``.

    Returns ``(WitnessedSubgraph, certificate)``. If the final verification
    fails, ``L`` is raised by 2 and the pipeline rerun (at most ``retries`` times).
    """
    d = g.regular_degree()
    if d is None or g.m == 0:
        raise ParameterError("input graph must be regular with positive degree")
    lam_f = Fraction(lam).limit_denominator(10**15) if not isinstance(lam, Fraction) else lam
    if not 0 < lam_f < 1:
        raise ParameterError("lambda must lie in (0, 1)")
    if delta < 1:
        raise ParameterError("delta must be >= 1")
    profile = _stage("hypothesis", count_short_cycles, g, g_target, record=False)
    hyp = check_hypothesis(profile, lam_f * d)
    if not hyp.ok:
        v, k, c, b = hyp.worst
        raise StageError(
            "hypothesis", PreconditionError(f"vertex {v} lies on {c} cycles of length {k} > (lambda d)^k = {b:.4g}")
        )
    L = compute_L(lam_f, delta, d)
    attempts = []
    for attempt in range(retries + 1):
        half = L // 2
        pg = _stage("power-graph", power_graph, g, half, walk_cap)
        gamma = math.ceil(2 * g_target / L)
        if gamma >= 3:
            params = ExtractionParams(delta, gamma, seed=seed, override=override, allow_irregular=True, algorithm=algorithm)
            hp, ext_cert = _stage("extract", extract, pg.graph, params, False)
        else:
            # no cycle is short enough to matter: one unconditioned draw
            dmin = int(pg.graph.degree().min())
            if delta > dmin:
                raise StageError("extract", ParameterError(f"delta={delta} exceeds power-graph degree {dmin}"))
            inst = CycleInstance(pg.graph, _empty_profile(3), delta, dmin)
            hp = inst.assignment(inst.initial_state(seed)).subgraph
            ext_cert = {"events": 0, "resamples": 0, "girth_target": gamma}
        w1 = pg.witnessed(hp)
        g1, rounds1 = _stage("stage1", tame_degrees_stage1, w1.graph, delta, seed, return_rounds=True)
        w2 = _stage("stage2", tame_degrees_stage2, w1.restrict(g1), delta, seed)
        ok, checks = _verify_output(w2, delta, g_target)
        attempts.append({"L": L, "ok": ok, **checks})
        if ok:
            cert = {
                "n": g.n,
                "d": d,
                "lambda": float(lam_f),
                "delta": delta,
                "g_target": g_target,
                "L": L,
                "L_formula": compute_L(lam_f, delta, d),
                "power_graph": pg.degree_report(),
                "power_girth_target": gamma,
                "extraction": ext_cert,
                "stage1_rounds": rounds1,
                "attempts": attempts,
                "seed": seed,
                **checks,
            }
            return w2, cert
        L += 2
    raise StageError("verify", PreconditionError(f"output failed verification after {retries + 1} attempts: {attempts}"))
