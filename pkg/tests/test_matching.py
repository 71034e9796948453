import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from lipgirth.errors import ParameterError, PreconditionError, StageError
from lipgirth.euler import euler_orientation, successor_of_2regular
from lipgirth.graph import Graph, complete_bipartite, cycle_graph, random_bipartite_regular, random_regular
from lipgirth.matching import (
    BipartiteGraph,
    Matching,
    OrientationInstance,
    build_z_action,
    find_augmenting_paths,
    flip,
    layer_growth_audit,
    orientation_lll_condition,
    match_to_completion,
    orient_matching_lll,
    perfect_matching_even_regular,
)
from lipgirth.verify import verify_matching, verify_orientation, verify_zaction


def _kab(a, b):
    return BipartiteGraph(a, b, [(i, j) for i in range(a) for j in range(b)])


def _nx_max_matching(bg):
    g = nx.Graph()
    g.add_nodes_from(range(bg.n_a + bg.n_b))
    g.add_edges_from((int(a), bg.n_a + int(b)) for a, b in bg.edges)
    return len(nx.bipartite.hopcroft_karp_matching(g, top_nodes=range(bg.n_a))) // 2


# -- augmenting paths ------------------------------------------------------------


def test_k33_empty_matching_gives_three_edges():
    bg = _kab(3, 3)
    paths = find_augmenting_paths(bg, Matching.empty(bg), 1)
    assert len(paths) == 3 and all(len(p) == 2 for p in paths)
    assert len({p[0] for p in paths}) == 3 and len({p[1] for p in paths}) == 3


def test_perfect_matching_has_no_paths():
    bg = _kab(3, 3)
    m, _ = match_to_completion(bg)
    assert find_augmenting_paths(bg, m, 99) == []


def test_hand_path_of_length_3():
    # a0 - b0 - a1 - b1 with (a1, b0) matched
    bg = BipartiteGraph(2, 2, [(0, 0), (1, 0), (1, 1)])
    m = Matching.empty(bg)
    m.mate_a[1], m.mate_b[0] = 0, 1
    assert find_augmenting_paths(bg, m, 1) == []
    assert find_augmenting_paths(bg, m, 3) == [[0, 0, 1, 1]]


def test_flip_requires_free_ends():
    bg = _kab(2, 2)
    m = Matching.empty(bg)
    flip(m, [0, 0])
    with pytest.raises(PreconditionError):
        flip(m, [0, 1])


# -- matching to completion --------------------------------------------------------


def test_k33_perfect():
    m, stats = match_to_completion(_kab(3, 3))
    assert stats["perfect"] and m.size == 3 and m.is_valid(_kab(3, 3))


def test_isolated_vertex_deficiency():
    bg = BipartiteGraph(3, 3, [(0, 0), (0, 1), (1, 1), (1, 2)])
    m, stats = match_to_completion(bg)
    assert not stats["perfect"] and m.size == 2
    assert stats["deficiency"]["a_set"] == [2] and stats["deficiency"]["neighborhood"] == []


def test_hall_witness_is_tight():
    # A = {0, 1, 2} all see only B = {0, 1}
    bg = BipartiteGraph(3, 3, [(a, b) for a in range(3) for b in range(2)])
    _, stats = match_to_completion(bg)
    d = stats["deficiency"]
    assert len(d["neighborhood"]) < len(d["a_set"])


@pytest.mark.parametrize("seed", range(5))
def test_size_matches_hopcroft_karp(seed):
    rng = np.random.default_rng(seed)
    edges = {(int(a), int(b)) for a, b in rng.integers(0, 40, size=(90, 2))}
    bg = BipartiteGraph(40, 40, sorted(edges))
    m, stats = match_to_completion(bg, seed)
    assert m.is_valid(bg) and m.size == _nx_max_matching(bg)
    afters = [ph["unmatched_after"] for ph in stats["phases"]]
    befores = [ph["unmatched_before"] for ph in stats["phases"]]
    assert all(a < b for a, b in zip(afters, befores))


def test_regular_bipartite_stats():
    g = random_bipartite_regular(500, 8, 0)
    bg, _, _ = BipartiteGraph.from_graph(g, range(500))
    m, stats = match_to_completion(bg, 0, audit=True)
    assert stats["perfect"] and stats["quarter_coverage_anomalies"] == 0
    assert all(a["ok"] for a in stats["layer_audits"])
    assert sum(stats["path_length_histogram"].values()) == 500
    assert all(k % 2 == 1 for k in stats["path_length_histogram"])


def test_layer_audit_examples():
    bg = _kab(6, 6)
    m = Matching.empty(bg)
    m.mate_a[0], m.mate_b[0] = 0, 0
    assert layer_growth_audit(bg, m)["ok"]
    # the matching alone: S_1 = N(U_A) is as small as U_A
    only = BipartiteGraph(6, 6, [(i, i) for i in range(6)])
    m2 = Matching.empty(only)
    m2.mate_a[:3] = np.arange(3)
    m2.mate_b[:3] = np.arange(3)
    rep = layer_growth_audit(only, m2)
    assert not rep["ok"] and rep["violation"] == 1


def test_from_graph_rejects_same_side_edge():
    with pytest.raises(ParameterError):
        BipartiteGraph.from_graph(cycle_graph(3), [0])


# -- euler and 2-factors -------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_euler_orientation_balanced(seed):
    g = random_regular(100, 6, seed)
    tails, heads = euler_orientation(g)
    out = np.bincount(tails, minlength=g.n)
    inn = np.bincount(heads, minlength=g.n)
    assert np.all(out == 3) and np.all(inn == 3)
    assert np.array_equal(np.sort(np.stack([tails, heads], 1), 1), np.sort(g.edges, 1))


def test_euler_rejects_odd_degree():
    with pytest.raises(ParameterError):
        euler_orientation(random_regular(10, 3, 0))


def test_successor_parallel_pair():
    assert successor_of_2regular(Graph(4, [(0, 1), (1, 0), (2, 3), (2, 3)])).tolist() == [1, 0, 3, 2]


# -- orientation ---------------------------------------------------------------


def test_orientation_condition_values():
    lhs = (1 - 1 / 102) ** 101 / 102
    assert lhs == pytest.approx(3.6e-3, rel=0.02)
    assert math.exp(-(101**2) / 200) == pytest.approx(7e-23, rel=0.05)
    assert orientation_lll_condition(101)
    assert not orientation_lll_condition(2)
    assert all(orientation_lll_condition(d) for d in range(30, 400))


def test_orientation_rejects_small_degree():
    g = random_regular(100, 4, 0)
    pairs, _ = perfect_matching_even_regular(g, 0)
    with pytest.raises(ParameterError):
        orient_matching_lll(g, pairs)


def test_orientation_probabilities_exact():
    g = random_regular(200, 40, 1)
    pairs, _ = perfect_matching_even_regular(g, 1)
    inst = OrientationInstance(g, pairs, 16)
    k = 39
    exact = sum(Fraction(math.comb(k, i), 2**k) for i in range(16))
    assert inst.prob[0] == pytest.approx(float(exact), rel=1e-12)


def test_incremental_cross_counts():
    g = random_regular(200, 40, 2)
    pairs, _ = perfect_matching_even_regular(g, 2)
    inst = OrientationInstance(g, pairs, 16)
    state = inst.initial_state(5)
    rng = np.random.default_rng(0)
    for step in range(1, 30):
        vs = rng.choice(len(pairs), 7, replace=False)
        inst.resample(state, vs, np.full(7, step), 5)
    cls = state[1]
    rest = inst.rest
    cross = np.zeros(g.n, dtype=np.int64)
    for u, v in rest.edges.tolist():
        if cls[u] != cls[v]:
            cross[u] += 1
            cross[v] += 1
    assert np.array_equal(cross, state[2])


def test_orientation_meets_threshold():
    g = random_regular(1000, 160, 0)
    pairs, rep = perfect_matching_even_regular(g, 0)
    assert rep["ok"]
    part = orient_matching_lll(g, pairs, seed=0)
    oriented = list(zip(part.tail.tolist(), part.head.tolist()))
    assert verify_orientation(g, oriented, 64).ok


# -- perfect matchings and the Z-action ----------------------------------------------


def test_perfect_matching_cycle6():
    pairs, rep = perfect_matching_even_regular(cycle_graph(6))
    assert rep["ok"] and len(pairs) == 3
    assert verify_matching(cycle_graph(6), pairs).ok


def test_perfect_matching_cycle5_fails():
    pairs, rep = perfect_matching_even_regular(cycle_graph(5))
    assert pairs is None and rep["ok"] is False


def test_perfect_matching_rr500_8():
    g = random_regular(500, 8, 3)
    pairs, rep = perfect_matching_even_regular(g, 3)
    assert rep["ok"] and verify_matching(g, pairs).ok


def test_perfect_matching_rejects_odd_degree():
    with pytest.raises(ParameterError):
        perfect_matching_even_regular(random_regular(10, 3, 0))


def test_z_action():
    g = random_regular(1000, 160, 1)
    pairs, _ = perfect_matching_even_regular(g, 1)
    succ, rep = build_z_action(g, pairs, seed=1)
    assert verify_zaction(g, succ).ok
    assert sorted(succ.tolist()) == list(range(g.n))
    # union of the two matchings is 2-regular with in = out = 1
    union = Graph(g.n, [(x, int(succ[x])) for x in range(g.n)])
    assert np.all(union.degree() == 2)
    assert rep["min_cross"] >= 64 and rep["expansion"]["ok"]


def test_z_action_orient_failure_is_staged():
    g = random_regular(60, 6, 0)
    pairs, _ = perfect_matching_even_regular(g, 0)
    with pytest.raises(StageError) as exc:
        build_z_action(g, pairs)
    assert exc.value.stage == "orient"


def test_complete_bipartite_graph_helper():
    bg, a, b = BipartiteGraph.from_graph(complete_bipartite(3, 3), [0, 1, 2])
    assert bg.to_graph().same_edges(complete_bipartite(3, 3))


def test_max_len_schedule_doubles_from_one():
    g = random_bipartite_regular(300, 6, 4)
    bg, _, _ = BipartiteGraph.from_graph(g, range(300))
    _, stats = match_to_completion(bg, 4)
    mls = [ph["max_len"] for ph in stats["phases"]]
    assert mls[0] == 1 and all(b >= a for a, b in zip(mls, mls[1:]))
    assert all(ml in (1, 3, 7, 15, 31, 63) for ml in mls)
    for ph in stats["phases"]:
        assert ph["within_log_bound"] == (ph["max_path"] <= ph["log_bound"])
