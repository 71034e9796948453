"""Spanning subgraphs with large girth and minimum degree via the Local Lemma.

Every vertex chooses ``delta`` distinct incident edges uniformly at random and
``H`` is the union of the choices. Each cycle ``C`` shorter than ``g`` gives a
bad event "all edges of ``C`` are in ``H``" with weight ``(3 delta/d)^k`` and
probability bound ``(2 delta/d)^k``, ``k = |C|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np

from ._rng import key3, mix64, to_unit
from .cycles import check_hypothesis, count_short_cycles, girth
from .errors import CertificateError, ParameterError, PreconditionError
from .graph import Graph
from .lll import LllInstance, ScheduleConfig, check_condition, run_algorithm1, run_algorithm2

__all__ = [
    "ExtractionParams",
    "ChoiceState",
    "CycleInstance",
    "edge_probability",
    "exact_cycle_probability",
    "product_lower_bound",
    "build_instance",
    "extract",
    "monotone_cycle_probability_test",
]


@dataclass
class ExtractionParams:
    delta: int
    g: int
    seed: int = 0
    algorithm: int = 1
    selection: str = "first-violated"
    override: bool = False
    resample_cap: int = 10**8
    round_cap: int = 10**5
    a_seq: object = "triangular"
    cycle_cap: int = 10**7
    allow_irregular: bool = False

    def __post_init__(self):
        if self.delta < 1:
            raise ParameterError("delta must be >= 1")
        if self.g < 3:
            raise ParameterError("girth target must be >= 3")
        if self.algorithm not in (1, 2):
            raise ParameterError("algorithm must be 1 or 2")


def edge_probability(d, delta):
    """Probability that a fixed edge is chosen by at least one endpoint."""
    if not 1 <= delta <= d:
        raise ParameterError("need 1 <= delta <= d")
    p = Fraction(delta, d)
    return 2 * p - p * p


def exact_cycle_probability(d, delta, k):
    """Exact probability that all ``k`` edges of a ``k``-cycle land in ``H`` (d-regular host).

    Each cycle vertex independently picks both, only the previous, only the
    next, or neither of its two cycle edges; a transfer matrix over the cycle
    sums the consistent configurations. ``k = 1`` means a single edge.
    """
    if not 1 <= delta <= d:
        raise ParameterError("need 1 <= delta <= d")
    if k == 1:
        return edge_probability(d, delta)
    both = Fraction(delta * (delta - 1), d * (d - 1)) if d > 1 else Fraction(0)
    one = Fraction(delta, d) - both
    # state: whether the vertex covers its next edge; edge (i, i+1) needs
    # cover from i's "next" or (i+1)'s "prev"
    # weight[prev_cover][next_cover]
    wt = {(1, 1): both, (1, 0): one, (0, 1): one, (0, 0): 1 - both - 2 * one}
    total = Fraction(0)
    for first_prev in (0, 1):
        # dp over "next cover" of the current vertex
        dp = {0: Fraction(0), 1: Fraction(0)}
        for nxt in (0, 1):
            dp[nxt] += wt[(first_prev, nxt)]
        for _ in range(k - 1):
            new = {0: Fraction(0), 1: Fraction(0)}
            for cov, val in dp.items():
                for prev in (0, 1):
                    if not (cov or prev):
                        continue
                    for nxt in (0, 1):
                        new[nxt] += val * wt[(prev, nxt)]
            dp = new
        # closing edge: last vertex's next cover or the first vertex's prev cover
        for cov, val in dp.items():
            if cov or first_prev:
                total += val
    return total


def product_lower_bound(d, delta, g):
    """``prod_{1 <= i < g} (1 - (3 delta/d)^i)^{(d/(12 delta))^i}``, at least 2/3."""
    r = 3 * delta / d
    s = d / (12 * delta)
    return math.exp(sum(s**i * math.log1p(-(r**i)) for i in range(1, g)))


@dataclass
class ChoiceState:
    """Per-vertex chosen edge ids (``delta`` each) and the union subgraph."""

    choices: np.ndarray
    subgraph: Graph = field(repr=False)

    def min_degree(self):
        deg = self.subgraph.degree()
        return int(deg.min()) if len(deg) else 0


@numba.njit(cache=True)
def _draw(variables, counters, seed, indptr, slot_pos, delta, chosen, count_in, buf):
    for i in range(len(variables)):
        v = variables[i]
        for t in range(delta):
            old = chosen[v, t]
            if old >= 0:
                count_in[old] -= 1
        lo = indptr[v]
        deg = indptr[v + 1] - lo
        for t in range(deg):
            buf[t] = slot_pos[lo + t]
        s = key3(seed, v, counters[i])
        for t in range(delta):
            s = mix64(s)
            j = t + int(to_unit(s) * (deg - t))
            tmp = buf[t]
            buf[t] = buf[j]
            buf[j] = tmp
            chosen[v, t] = buf[t]
            count_in[buf[t]] += 1


class CycleInstance(LllInstance):
    """One variable per vertex; one event per short cycle.

    The state is ``(chosen, count_in)``: chosen edge positions per vertex and,
    per edge position, how many endpoints chose it (a trailing sentinel slot is
    pinned to 1 so padded cycle rows read as present).
    """

    def __init__(self, g, profile, delta, d):
        self.graph = g
        self.delta = int(delta)
        self.d = d
        lengths = profile.lengths
        kmax = profile.vertices.shape[1]
        mask = np.arange(kmax)[None, :] < lengths[:, None]
        ev_ptr = np.zeros(len(lengths) + 1, dtype=np.int64)
        np.cumsum(lengths, out=ev_ptr[1:])
        ev_var = profile.vertices[mask].astype(np.int64)
        r = 3.0 * delta / d
        x = r ** lengths.astype(float)
        prob = (2.0 * delta / d) ** lengths.astype(float)
        self.lengths = lengths
        self.cyc_edges = np.where(profile.edges >= 0, profile.edges, g.m).astype(np.int64)
        self._set_events(g.n, x, ev_ptr, ev_var, prob)
        self._csr = g.csr()
        self._buf = np.empty(int(g.degree().max(initial=0)) + 1, dtype=np.int64)

    def initial_state(self, seed):
        chosen = np.full((self.graph.n, self.delta), -1, dtype=np.int64)
        count_in = np.zeros(self.graph.m + 1, dtype=np.int64)
        count_in[-1] = 1
        state = (chosen, count_in)
        self.resample(state, np.arange(self.graph.n), np.zeros(self.graph.n, dtype=np.int64), seed)
        return state

    def resample(self, state, variables, counters, seed):
        indptr, _, slot_pos = self._csr
        _draw(
            np.asarray(variables, np.int64), np.asarray(counters, np.int64), np.uint64(seed & (2**64 - 1)),
            indptr, slot_pos, self.delta, state[0], state[1], self._buf,
        )

    def holding(self, state, events=None):
        rows = self.cyc_edges if events is None else self.cyc_edges[events]
        return np.all(state[1][rows] > 0, axis=1)

    def assignment(self, state):
        chosen = state[0]
        ids = self.graph.ids[chosen]
        keep = np.flatnonzero(state[1][:-1] > 0)
        return ChoiceState(ids, Graph(self.graph.n, self.graph.edges[keep], self.graph.ids[keep]))


def _host_degree(g, allow_irregular):
    d = g.regular_degree()
    if d is None:
        if not allow_irregular:
            raise ParameterError("input graph is not regular")
        d = int(g.degree().min())
    return d


def build_instance(g, profile, p):
    """The cycle instance of ``g`` for the parameters ``p``.

    Weights may reach 1 (for example ``delta = d``); :func:`extract` rejects such
    instances as a hypothesis failure.
    """
    d = _host_degree(g, p.allow_irregular)
    if p.delta > d:
        raise ParameterError(f"delta={p.delta} exceeds degree {d}")
    return CycleInstance(g, profile, p.delta, d)


def _per_length_products(inst, report):
    out = {}
    for k in np.unique(inst.lengths).tolist():
        sel = inst.lengths == k
        out[int(k)] = float(np.exp(report.log_products[sel].min()))
    return out


def extract(g, p, audit=True, return_stats=False):
    """Return ``(H, certificate)`` (plus the run statistics if ``return_stats``) with ``girth(H) >= p.g`` and ``min deg(H) >= p.delta``.

    The per-vertex cycle-count hypothesis with base ``d/(12 delta)`` is checked
    first. When it fails the run stops with :class:`PreconditionError` unless
    ``p.override`` is set and the exact condition (*) check on the enumerated
    events passes.
    """
    d = _host_degree(g, p.allow_irregular)
    if p.delta > d:
        raise ParameterError(f"delta={p.delta} exceeds degree {d}")
    profile = count_short_cycles(g, p.g, cap=p.cycle_cap)
    base = Fraction(d, 12 * p.delta)
    hyp = check_hypothesis(profile, base)
    inst = CycleInstance(g, profile, p.delta, d)
    if inst.n_events and np.any(inst.x >= 1):
        raise PreconditionError(f"event weights (3*delta/d)^k reach 1 (delta={p.delta}, d={d}); hypothesis fails")
    cond = None
    if not hyp.ok and not p.override:
        v, k, c, b = hyp.worst
        raise PreconditionError(
            f"cycle-count hypothesis fails: vertex {v} lies on {c} cycles of length {k} > {b:.4g}"
        )
    if audit or not hyp.ok:
        cond = check_condition(inst)
        if not hyp.ok and not cond.ok:
            raise PreconditionError(f"condition (*) fails with slack {cond.slack:.4g}")
    if p.algorithm == 1:
        state, stats = run_algorithm1(inst, p.selection, p.seed, p.resample_cap)
    else:
        cfg = ScheduleConfig(p.a_seq, p.round_cap, p.seed)
        state, stats = run_algorithm2(inst, cfg)
    h = state.subgraph
    gh = girth(h)
    min_deg = int(h.degree().min() if h.n else 0)
    if gh < p.g or min_deg < p.delta:
        raise CertificateError(f"extracted subgraph has girth {gh} and minimum degree {min_deg}")
    cert = {
        "n": g.n,
        "d": d,
        "delta": p.delta,
        "g": p.g,
        "girth_found": None if math.isinf(gh) else int(gh),
        "min_degree_found": min_deg,
        "events": inst.n_events,
        "resamples": stats.total_resamples,
        "rounds": stats.rounds,
        "algorithm": p.algorithm,
        "seed": p.seed,
        "hypothesis": {"base": float(base), "ok": hyp.ok, "worst": hyp.to_dict()["worst"]},
    }
    if cond is not None:
        cert["condition"] = cond.to_dict()
        if inst.n_events:
            cert["condition"]["min_product_by_length"] = _per_length_products(inst, cond)
    if return_stats:
        return h, cert, stats
    return h, cert


def monotone_cycle_probability_test(g, cycle, p, trials=10**5, seed=0):
    """Monte Carlo estimate of Pr[every edge of ``cycle`` is in ``H``] with no resampling.

    ``cycle`` is a vertex sequence; consecutive pairs (closing the cycle when it
    has at least three vertices) give the edges, and a two-vertex sequence means
    a single edge. Returns estimate, bound ``(2 delta/d)^k`` and standard error.
    """
    cycle = [int(v) for v in cycle]
    pairs = list(zip(cycle, cycle[1:]))
    if len(cycle) >= 3:
        pairs.append((cycle[-1], cycle[0]))
    if not pairs:
        raise ParameterError("cycle needs at least two vertices")
    keys = g.edge_keys()
    ids = []
    for u, v in pairs:
        key = min(u, v) * g.n + max(u, v)
        hit = np.flatnonzero(keys == key)
        if len(hit) == 0:
            raise PreconditionError(f"({u}, {v}) is not an edge")
        ids.append(int(g.ids[hit[0]]))
    rng = np.random.default_rng(seed)
    verts = sorted(set(cycle))
    chosen_by = {}
    for v in verts:
        inc = g.ids[g.incident(v)]
        if p.delta > len(inc):
            raise ParameterError("delta exceeds a vertex degree")
        # random delta-subset per trial via argpartition of uniform keys
        keys_v = rng.random((trials, len(inc)))
        pick = np.argpartition(keys_v, p.delta - 1, axis=1)[:, : p.delta]
        chosen_by[v] = inc[pick]
    ok = np.ones(trials, dtype=bool)
    for (u, v), e in zip(pairs, ids):
        ok &= np.any(chosen_by[u] == e, axis=1) | np.any(chosen_by[v] == e, axis=1)
    est = float(ok.mean())
    d = int(g.degree()[cycle].max())
    k = len(pairs)
    bound = (2 * p.delta / d) ** k
    se = math.sqrt(max(est * (1 - est), 1e-300) / trials)
    return {"estimate": est, "bound": bound, "stderr": se, "k": k, "trials": trials, "ok": est <= bound + 3 * se}
