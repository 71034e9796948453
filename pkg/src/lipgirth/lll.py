"""Variable-version Local Lemma: condition check and resampling algorithms.

Two algorithms are provided. ``run_algorithm1`` is the sequential resampling
loop: while some bad event holds, pick one and redraw its variables.
``run_algorithm2`` is the round-based variant: round ``j`` considers the events
``S_j = {A : x(A) > 1/a_j, |vbl(A)| < a_j}``, draws a priority ``r(A)`` for each,
keeps the local maxima ``I_j`` (no overlapping event of ``S_j`` has a larger
priority) and redraws the variables of every event in ``I_j`` that holds.

Instances expose their events as a CSR table ``(ev_ptr, ev_var)`` of variable
sets; subclasses provide state handling (``initial_state``, ``resample``,
``holding``). Variable draws are keyed by ``(seed, variable, counter)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numba
import numpy as np
from scipy import sparse

from ._rng import key3, keyed_uniform, stream_generator, to_unit
from .errors import NonTerminationError, ParameterError

__all__ = [
    "Event",
    "LllInstance",
    "FunctionInstance",
    "ScheduleConfig",
    "RunStats",
    "ConditionReport",
    "a_sequence",
    "check_condition",
    "build_rounds",
    "run_algorithm1",
    "run_algorithm2",
]

SELECT_STREAM = 2**62 + 1
LARGE_A = 2**62


@numba.njit(cache=True)
def _gather(ptr, idx, items, mark, stamp):
    total = 0
    for it in items:
        total += ptr[it + 1] - ptr[it]
    out = np.empty(total, np.int64)
    k = 0
    for it in items:
        for j in range(ptr[it], ptr[it + 1]):
            e = idx[j]
            if mark[e] != stamp:
                mark[e] = stamp
                out[k] = e
                k += 1
    return out[:k]


@dataclass
class Event:
    """A bad event: ``predicate(values)`` is True when the event holds."""

    vbl: Sequence[int]
    predicate: Callable
    x: float
    prob_bound: float | None = None
    name: str | None = None


class LllInstance:
    """Base class for resampling instances.

    Subclasses call :meth:`_set_events` with the weights and the variable CSR
    and implement ``resample(state, vars, counters, seed)`` and
    ``holding(state, events=None)``. ``initial_state`` must draw every variable
    with counter 0.
    """

    n_vars: int

    def _set_events(self, n_vars, x, ev_ptr, ev_var, prob=None):
        self.n_vars = int(n_vars)
        self.x = np.asarray(x, dtype=float)
        self.prob = None if prob is None else np.asarray(prob, dtype=float)
        ev_ptr = np.asarray(ev_ptr, dtype=np.int64)
        ev_var = np.asarray(ev_var, dtype=np.int64)
        sizes = np.diff(ev_ptr)
        if len(self.x) != len(sizes):
            raise ParameterError("weights and events differ in length")
        if np.any(sizes == 0):
            raise ParameterError("every event needs at least one variable")
        if ev_var.size and (ev_var.min() < 0 or ev_var.max() >= self.n_vars):
            raise ParameterError("event variable out of range")
        # sort each variable set; inclusion-exclusion relies on it
        owner = np.repeat(np.arange(len(sizes)), sizes)
        order = np.lexsort((ev_var, owner))
        ev_var = ev_var[order]
        self.ev_ptr, self.ev_var, self.vbl_size = ev_ptr, ev_var, sizes
        counts = np.bincount(ev_var, minlength=self.n_vars)
        self.var_ptr = np.zeros(self.n_vars + 1, dtype=np.int64)
        np.cumsum(counts, out=self.var_ptr[1:])
        self.var_ev = owner[order][np.argsort(ev_var, kind="stable")]
        self._ev_mark = np.zeros(len(sizes), dtype=np.int64)
        self._var_mark = np.zeros(self.n_vars, dtype=np.int64)
        self._stamp = 0

    @property
    def n_events(self):
        return len(self.x)

    def vbl(self, a):
        return self.ev_var[self.ev_ptr[a]:self.ev_ptr[a + 1]]

    def events_of(self, variables):
        """Distinct events reading any of the given variables."""
        self._stamp += 1
        return _gather(self.var_ptr, self.var_ev, np.asarray(variables, np.int64), self._ev_mark, self._stamp)

    def vars_of(self, events):
        self._stamp += 1
        return _gather(self.ev_ptr, self.ev_var, np.asarray(events, np.int64), self._var_mark, self._stamp)

    def overlapping(self, a):
        """Events whose variable set meets ``vbl(a)``, including ``a``."""
        return self.events_of(self.vbl(a))

    def initial_state(self, seed):
        raise NotImplementedError

    def resample(self, state, variables, counters, seed):
        raise NotImplementedError

    def holding(self, state, events=None):
        raise NotImplementedError

    def assignment(self, state):
        return state


class FunctionInstance(LllInstance):
    """Instance built from per-variable samplers and :class:`Event` objects.

    ``samplers[v](rng)`` draws a value for variable ``v`` from a numpy Generator.
    The state is a plain list of values.
    """

    def __init__(self, samplers, events):
        self.samplers = list(samplers)
        self.events = list(events)
        ptr = np.zeros(len(self.events) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(set(e.vbl)) for e in self.events])
        var = np.array([v for e in self.events for v in sorted(set(e.vbl))], dtype=np.int64)
        x = [e.x for e in self.events]
        prob = None
        if self.events and all(e.prob_bound is not None for e in self.events):
            prob = [e.prob_bound for e in self.events]
        self._set_events(len(self.samplers), x, ptr, var, prob)

    def initial_state(self, seed):
        return [s(stream_generator(seed, v, 0)) for v, s in enumerate(self.samplers)]

    def resample(self, state, variables, counters, seed):
        for v, c in zip(np.asarray(variables).tolist(), np.asarray(counters).tolist()):
            state[v] = self.samplers[v](stream_generator(seed, v, c))

    def holding(self, state, events=None):
        ids = range(self.n_events) if events is None else np.asarray(events).tolist()
        return np.array([bool(self.events[a].predicate(state)) for a in ids], dtype=bool)

    def assignment(self, state):
        return list(state)


# -- schedule ----------------------------------------------------------------


def a_sequence(kind="triangular"):
    """Infinite integer sequence hitting every positive integer infinitely often.

    ``triangular``: 1, 1,2, 1,2,3, 1,2,3,4, ...
    ``interleaved``: odd positions follow ``triangular``, even positions are
    1, 2, 4, ..., 2^62 (then again from 1) so large values, needed for
    events with tiny weights, appear after logarithmically many rounds.
    ``dyadic``: position ``n`` carries the next ``triangular`` term when ``n`` is
    a power of two and ``2^62`` otherwise, so almost every round admits every
    event while each integer still occurs infinitely often.
    """
    if kind == "triangular":
        top = 1
        while True:
            yield from range(1, top + 1)
            top += 1
    elif kind == "interleaved":
        tri = a_sequence("triangular")
        power = 1
        while True:
            yield next(tri)
            yield power
            power = 1 if power >= 2**62 else 2 * power
    elif kind == "dyadic":
        tri = a_sequence("triangular")
        n = 1
        while True:
            yield next(tri) if n & (n - 1) == 0 else LARGE_A
            n += 1
    else:
        raise ParameterError(f"unknown a_seq {kind!r}")


@dataclass
class ScheduleConfig:
    """``a_seq`` is a name understood by :func:`a_sequence` or an iterable of integers."""

    a_seq: object = "triangular"
    round_cap: int = 10**5
    seed: int = 0

    def __post_init__(self):
        if self.round_cap < 1:
            raise ParameterError("round_cap must be >= 1")

    def sequence(self):
        if isinstance(self.a_seq, str):
            return a_sequence(self.a_seq)
        return iter(self.a_seq)


# -- statistics ----------------------------------------------------------------


@dataclass
class RunStats:
    event_resamples: np.ndarray
    var_resamples: np.ndarray
    rounds: int
    terminated: bool
    x: np.ndarray = field(repr=False, default=None)
    bound: np.ndarray | None = field(repr=False, default=None)

    @property
    def total_resamples(self):
        return int(self.event_resamples.sum())

    def to_dict(self, all_events=False):
        """JSON-ready report; only resampled events unless ``all_events``."""
        ids = range(len(self.event_resamples)) if all_events else np.flatnonzero(self.event_resamples).tolist()
        per_event = []
        for a in ids:
            x = float(self.x[a]) if self.x is not None else None
            per_event.append(
                {
                    "id": int(a),
                    "resamples": int(self.event_resamples[a]),
                    "x": x,
                    "bound": None if x is None else x / (1 - x),
                }
            )
        return {
            "rounds": int(self.rounds),
            "total_resamples": self.total_resamples,
            "per_event": per_event,
            "terminated": bool(self.terminated),
        }


def _update(hold, active, affected, new):
    changed = affected[hold[affected] != new]
    for a in changed.tolist():
        if hold[a]:
            active.discard(a)
        else:
            active.add(a)
    hold[affected] = new


def _stats(inst, ev_counts, counters, rounds, terminated):
    return RunStats(ev_counts, counters, rounds, terminated, inst.x, inst.prob)


def run_algorithm1(inst, selection="first-violated", seed=0, resample_cap=10**8):
    """Sequential resampling; returns ``(assignment, RunStats)``.

    ``rounds`` in the stats counts resampling steps.
    """
    if selection not in ("first-violated", "random-violated"):
        raise ParameterError(f"unknown selection {selection!r}")
    counters = np.zeros(inst.n_vars, dtype=np.int64)
    ev_counts = np.zeros(inst.n_events, dtype=np.int64)
    state = inst.initial_state(seed)
    hold = np.asarray(inst.holding(state), dtype=bool).copy()
    active = set(np.flatnonzero(hold).tolist())
    rng = stream_generator(seed, SELECT_STREAM, 0)
    steps = 0
    while active:
        if steps >= resample_cap:
            raise NonTerminationError(
                f"resample cap {resample_cap} reached with {len(active)} events holding",
                stats=_stats(inst, ev_counts, counters, steps, False),
            )
        if selection == "first-violated":
            a = min(active)
        else:
            ordered = sorted(active)
            a = ordered[int(rng.integers(len(ordered)))]
        variables = inst.vbl(a)
        counters[variables] += 1
        inst.resample(state, variables, counters[variables], seed)
        ev_counts[a] += 1
        steps += 1
        affected = inst.events_of(variables)
        _update(hold, active, affected, np.asarray(inst.holding(state, affected), dtype=bool))
    return inst.assignment(state), _stats(inst, ev_counts, counters, steps, True)


def _qualified(inst, events, a):
    return (inst.x[events] * a > 1.0) & (inst.vbl_size[events] < a)


def build_rounds(inst, cfg):
    """Yield ``(j, a_j, I_j)`` for ``j = 1 .. round_cap``.

    Priorities are keyed by ``(seed, j, event)``; ties (probability ~2^-53) are
    broken by event id so the emitted sets are always variable-disjoint.
    """
    seq = cfg.sequence()
    for j in range(1, cfg.round_cap + 1):
        a = int(next(seq))
        s = np.flatnonzero(_qualified(inst, np.arange(inst.n_events), a))
        if len(s) == 0:
            yield j, a, s
            continue
        r = keyed_uniform(cfg.seed, j, s)
        rank = np.empty(len(s), dtype=np.int64)
        rank[np.lexsort((s, r))] = np.arange(len(s))
        lengths = inst.vbl_size[s]
        offsets = np.zeros(len(s), dtype=np.int64)
        np.cumsum(lengths[:-1], out=offsets[1:])
        flat = np.repeat(inst.ev_ptr[s] - offsets, lengths) + np.arange(lengths.sum())
        ent_var = inst.ev_var[flat]
        ent_rank = np.repeat(rank, lengths)
        best = np.full(inst.n_vars, -1, dtype=np.int64)
        np.maximum.at(best, ent_var, ent_rank)
        kept = np.logical_and.reduceat(best[ent_var] == ent_rank, offsets)
        yield j, a, s[kept]


@numba.njit(cache=True)
def _is_local_max(seed, j, e, nb, x, size, a):
    # exits at the first overlapping qualified event with a larger priority
    re = to_unit(key3(seed, j, e))
    for b in nb:
        if b == e or not (x[b] * a > 1.0 and size[b] < a):
            continue
        rb = to_unit(key3(seed, j, b))
        if rb > re or (rb == re and b > e):
            return False
    return True


def _round_selection(inst, cfg, j, a, holding_events, cache):
    """The events of ``I_j`` among ``holding_events``, without building ``I_j``."""
    chosen = []
    seed = np.uint64(cfg.seed & (2**64 - 1))
    af = float(a)
    for e in sorted(holding_events):
        if not (inst.x[e] * af > 1.0 and inst.vbl_size[e] < af):
            continue
        nb = cache.get(e)
        if nb is None:
            if len(cache) > 4096:
                cache.clear()
            nb = cache[e] = inst.overlapping(e)
        if _is_local_max(seed, np.uint64(j), e, nb, inst.x, inst.vbl_size, af):
            chosen.append(e)
    return chosen


def run_algorithm2(inst, cfg=None):
    """Round-based resampling with the random-priority scheduler.

    Each round only resamples holding events that belong to ``I_j``; membership
    is decided from the overlapping events alone, which matches
    :func:`build_rounds` exactly.
    """
    cfg = cfg or ScheduleConfig()
    counters = np.zeros(inst.n_vars, dtype=np.int64)
    ev_counts = np.zeros(inst.n_events, dtype=np.int64)
    state = inst.initial_state(cfg.seed)
    hold = np.asarray(inst.holding(state), dtype=bool).copy()
    active = set(np.flatnonzero(hold).tolist())
    seq = cfg.sequence()
    cache = {}
    rounds = 0
    while active:
        if rounds >= cfg.round_cap:
            raise NonTerminationError(
                f"round cap {cfg.round_cap} reached with {len(active)} events holding",
                stats=_stats(inst, ev_counts, counters, rounds, False),
            )
        rounds += 1
        a = int(next(seq))
        chosen = _round_selection(inst, cfg, rounds, min(a, 2**62), active, cache)
        if not chosen:
            continue
        variables = inst.vars_of(chosen)
        counters[variables] += 1
        inst.resample(state, variables, counters[variables], cfg.seed)
        ev_counts[chosen] += 1
        affected = inst.events_of(variables)
        _update(hold, active, affected, np.asarray(inst.holding(state, affected), dtype=bool))
    return inst.assignment(state), _stats(inst, ev_counts, counters, rounds, True)


# -- condition (*) ---------------------------------------------------------------


@dataclass
class ConditionReport:
    """``log_products[A]`` is ``sum log(1 - x(B))`` over ``B`` meeting ``vbl(A)`` (``B = A`` included)."""

    ok: bool
    worst_event: int | None
    slack: float
    log_products: np.ndarray = field(repr=False)
    strategy: str = "direct"

    def to_dict(self):
        return {"ok": self.ok, "worst_event": self.worst_event, "slack": self.slack, "strategy": self.strategy}


def _encode(rows, base):
    keys = np.zeros(len(rows), dtype=np.int64)
    for c in range(rows.shape[1]):
        keys = keys * base + rows[:, c]
    return keys


def _log_products_ie(inst, w):
    """Inclusion-exclusion over subsets of each variable set."""
    n_ev = inst.n_events
    out = np.zeros(n_ev)
    sizes = inst.vbl_size
    groups = {}
    for s in np.unique(sizes).tolist():
        evs = np.flatnonzero(sizes == s)
        groups[s] = (evs, inst.ev_var[inst.ev_ptr[evs][:, None] + np.arange(s)])
    base = max(inst.n_vars, 2)
    for t in range(1, int(sizes.max()) + 1):
        keys, weights, owners = [], [], []
        for s, (evs, mat) in groups.items():
            if s < t:
                continue
            for comb in itertools.combinations(range(s), t):
                keys.append(mat[:, comb])
                weights.append(w[evs])
                owners.append(evs)
        rows = np.concatenate(keys)
        if t * math.log2(base) < 62:
            _, inv = np.unique(_encode(rows, base), return_inverse=True)
        else:
            _, inv = np.unique(rows, axis=0, return_inverse=True)
        inv = inv.ravel()
        del rows, keys
        sums = np.bincount(inv, weights=np.concatenate(weights))
        sign = 1.0 if t % 2 else -1.0
        out += sign * np.bincount(np.concatenate(owners), weights=sums[inv], minlength=n_ev)
    return out


def _log_products_direct(inst, w):
    m = sparse.csr_matrix(
        (np.ones(len(inst.ev_var)), inst.ev_var, inst.ev_ptr), shape=(inst.n_events, inst.n_vars)
    )
    overlap = (m @ m.T).tocsr()
    overlap.data[:] = 1.0
    return overlap @ w


def check_condition(inst, prob_bound=None, strategy="auto", rtol=1e-12):
    """Check ``Pr[A] <= x(A) * prod (1 - x(B))`` over every ``B`` meeting ``vbl(A)``.

    ``prob_bound`` is an array, a callable ``event -> bound`` or ``None`` (use the
    bounds attached to the instance). ``slack`` is the minimum of RHS/LHS.
    The product is computed exactly in log space, either directly from the
    overlap matrix or by inclusion-exclusion over subsets of each variable set
    (``strategy="auto"`` picks by estimated cost).
    """
    n_ev = inst.n_events
    if prob_bound is None:
        if inst.prob is None:
            raise ParameterError("no probability bounds supplied")
        prob = inst.prob
    elif callable(prob_bound):
        prob = np.array([float(prob_bound(a)) for a in range(n_ev)])
    else:
        prob = np.asarray(prob_bound, dtype=float)
    if n_ev == 0:
        return ConditionReport(True, None, float("inf"), np.zeros(0), "empty")
    x = inst.x
    if np.any(x >= 1) or np.any(x <= 0):
        bad = int(np.flatnonzero((x >= 1) | (x <= 0))[0])
        return ConditionReport(False, bad, 0.0, np.full(n_ev, -np.inf), "invalid-weights")
    w = np.log1p(-x)
    if strategy == "auto":
        per_var = np.diff(inst.var_ptr).astype(float)
        cost = min(float(n_ev) ** 2, float((per_var**2).sum()))
        strategy = "direct" if cost <= 5e7 or inst.vbl_size.max() > 10 else "inclusion-exclusion"
    if strategy == "direct":
        logp = _log_products_direct(inst, w)
    elif strategy == "inclusion-exclusion":
        logp = _log_products_ie(inst, w)
    else:
        raise ParameterError(f"unknown strategy {strategy!r}")
    with np.errstate(divide="ignore"):
        log_slack = np.log(x) + logp - np.log(prob)
    worst = int(np.argmin(log_slack))
    ok = bool(log_slack[worst] >= math.log1p(-rtol))
    return ConditionReport(ok, worst, float(np.exp(log_slack[worst])), logp, strategy)
