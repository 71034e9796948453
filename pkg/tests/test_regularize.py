import networkx as nx
import numpy as np
import pytest

from lipgirth.errors import ParameterError, PreconditionError, StuckError, SurgeryError
from lipgirth.graph import Graph, complete_graph, cycle_graph, disjoint_union, random_regular
from lipgirth.regularize import (
    PermutationPair,
    SurgeryState,
    build_f2,
    euler_orient_2regular,
    local_match_specials,
    peel_cycles,
    reduced_word_count,
    regularize,
    surgery_on_path,
    two_factorize,
    word_check,
)
from lipgirth.witness import WitnessedSubgraph

THETA = Graph(8, [(0, 2), (2, 3), (3, 1), (0, 4), (4, 5), (5, 1), (0, 6), (6, 7), (7, 1)])


def _cycle_type(p):
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        k, x = 0, s
        while x not in seen:
            seen.add(x)
            x = int(p[x])
            k += 1
        out.append(k)
    return sorted(out)


def _rotation(n, step):
    return (np.arange(n) + step) % n


# -- peel ---------------------------------------------------------------------


def test_peel_tree_unchanged():
    tree = Graph.from_networkx(nx.random_labeled_tree(30, seed=1))
    assert peel_cycles(tree).tolist() == tree.ids.tolist()


def test_peel_cycle_empty():
    assert peel_cycles(cycle_graph(6)).size == 0


def test_peel_theta_leaves_one_path():
    f = peel_cycles(THETA, seed=3)
    sub = THETA.keep(f)
    deg = sub.degree()
    assert sub.m == 3 and deg[0] == 1 and deg[1] == 1
    assert nx.has_path(nx.Graph(sub.edges.tolist()), 0, 1)


# -- surgery ------------------------------------------------------------------


def _surgery_state():
    # specials 1 and 2 (degree 3, delta 2) joined by the path 0-1-2-3
    g = Graph(6, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (0, 4), (3, 5)])
    return g, SurgeryState.from_witnessed(WitnessedSubgraph.identity(g), 2)


def test_surgery_k3_degree_accounting():
    g, st = _surgery_state()
    assert st.specials == {1, 2}
    before = [st.degree(v) for v in range(6)]
    surgery_on_path(st, [0, 1, 2, 3])
    after = [st.degree(v) for v in range(6)]
    assert after[1] == before[1] - 1 and after[2] == before[2] - 1
    assert [after[v] for v in (0, 3, 4, 5)] == [before[v] for v in (0, 3, 4, 5)]
    chords = sorted(tuple(sorted(st.edges[i])) for i in st.edges if i >= g.m)
    assert chords == [(0, 2), (1, 3)]
    assert st.matched == {1, 2}
    ws = st.witnessed(3)
    assert not ws.problems(g) and ws.max_witness() == 2


def test_surgery_k2_rejected():
    _, st = _surgery_state()
    with pytest.raises(SurgeryError):
        surgery_on_path(st, [0, 1, 2])


def test_surgery_failure_leaves_state():
    _, st = _surgery_state()
    snapshot = (dict(st.edges), set(st.matched), set(st.ledger))
    with pytest.raises(SurgeryError):
        surgery_on_path(st, [0, 1, 4, 3])  # (4, 3) is not an edge
    with pytest.raises(SurgeryError):
        surgery_on_path(st, [4, 0, 3, 5])  # 0 and 3 are not specials
    assert (st.edges, st.matched, st.ledger) == snapshot


def test_surgery_rejects_used_edges():
    _, st = _surgery_state()
    surgery_on_path(st, [0, 1, 2, 3])
    st.matched.clear()
    with pytest.raises(SurgeryError):
        surgery_on_path(st, [0, 1, 2, 3])


# -- regularize ---------------------------------------------------------------


def test_regularize_regular_input_unchanged():
    g = random_regular(40, 4, 2)
    out, rep = regularize(g, 4)
    assert out.graph.same_edges(g) and rep["surgeries"] == 0 and rep["specials"] == 0


def test_regularize_two_specials_single_surgery():
    out, rep = regularize(THETA, 2, seed=1)
    assert rep["regime"] == "forest" and rep["specials"] == 2 and rep["surgeries"] == 1
    assert np.all(out.graph.degree() == 2)
    assert out.L == 3 and not out.problems(THETA)


def test_regularize_odd_specials_stuck():
    # complete(5) minus a matching: one vertex of degree 4, the rest 3
    g = Graph(5, [e for e in complete_graph(5).edges.tolist() if e not in ([1, 2], [3, 4])])
    with pytest.raises(StuckError):
        regularize(g, 3)


def test_regularize_preconditions():
    with pytest.raises(PreconditionError):
        regularize(complete_graph(5), 2)
    adjacent = Graph(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 3), (4, 5)])
    with pytest.raises(PreconditionError):
        regularize(adjacent, 2)
    with pytest.raises(ParameterError):
        regularize(THETA, 2, regime="local")


def _padded_cubic(n, extra, seed):
    """Random 3-regular graph plus ``extra`` random edges (their ends become specials)."""
    g = random_regular(n, 3, seed)
    rng = np.random.default_rng(seed)
    keys = set(g.edge_keys().tolist())
    add, used = [], set()
    while len(add) < extra:
        u, v = sorted(rng.choice(n, 2, replace=False).tolist())
        if u in used or v in used or u * n + v in keys:
            continue
        used |= {u, v}
        add.append((u, v))
    return Graph(n, np.vstack([g.edges, add]))


@pytest.mark.parametrize("seed", range(3))
def test_regularize_local_regime(seed):
    # cubic graph; pairs from an independent set are joined through a cubic
    # gadget, so their ends become non-adjacent specials
    base = random_regular(300, 3, seed)
    rng = np.random.default_rng(seed)
    chosen, blocked = [], set()
    for v in rng.permutation(300).tolist():
        if v not in blocked and len(chosen) < 20:
            chosen.append(v)
            blocked |= {v, *base.neighbors(v).tolist()}
    edges = base.edges.tolist()
    n = 300
    for i in range(0, 20, 2):
        a, b = chosen[i], chosen[i + 1]
        # a -- n -- n+1 -- b; vertices n .. n+5 all end at degree 3
        edges += [(a, n), (n, n + 1), (n + 1, b), (n, n + 2), (n + 1, n + 2), (n + 2, n + 3),
                  (n + 3, n + 4), (n + 3, n + 5), (n + 4, n + 5), (n + 4, n + 5)]
        n += 6
    g = Graph(n, edges)
    deg = g.degree()
    assert set(np.unique(deg).tolist()) == {3, 4}
    out, rep = regularize(g, 3, seed=seed)
    assert rep["regime"] == "local" and np.all(out.graph.degree() == 3)
    assert out.L == 3 and not out.problems(g)
    assert all(r["far_apart"] for r in rep["local"]["rounds"])


# -- local matching -----------------------------------------------------------


def test_local_match_adjacent_pair_round1():
    g = Graph.from_networkx(nx.petersen_graph())
    g = Graph(10, np.vstack([g.edges, [(0, 2)]]))
    paths, rep = local_match_specials(g, 3, seed=5)
    assert rep["specials"] == 2 and rep["rounds"][0]["unmatched"] == 0
    assert paths == [([0, 2], [15])]


@pytest.mark.parametrize("seed", range(4))
def test_local_match_far_apart_and_monotone(seed):
    g = _padded_cubic(400, 40, seed)
    paths, rep = local_match_specials(g, 3, seed=seed)
    fr = [r["fraction"] for r in rep["rounds"]]
    assert all(r["far_apart"] for r in rep["rounds"])
    assert all(a >= b for a, b in zip(fr, fr[1:]))
    ends = [p[0][0] for p in paths] + [p[0][-1] for p in paths]
    assert len(ends) == len(set(ends))


# -- two factors and permutations ---------------------------------------------


def _check_factors(g, f1, f2):
    assert np.all(f1.degree() == 2) and np.all(f2.degree() == 2)
    ids = sorted(f1.ids.tolist() + f2.ids.tolist())
    assert ids == g.ids.tolist()


def test_two_factorize_k5():
    g = complete_graph(5)
    _check_factors(g, *two_factorize(g))


def test_two_factorize_doubled_cycle():
    c = cycle_graph(7)
    g = Graph(7, np.vstack([c.edges, c.edges]))
    f1, f2 = two_factorize(g, seed=2)
    _check_factors(g, f1, f2)
    for f in (f1, f2):
        assert _cycle_type(euler_orient_2regular(f)) == [7]


def test_two_factorize_two_k5():
    g = disjoint_union(complete_graph(5), complete_graph(5))
    f1, f2 = two_factorize(g)
    _check_factors(g, f1, f2)
    for f in (f1, f2):
        assert np.all((f.edges < 5).all(axis=1) | (f.edges >= 5).all(axis=1))


def test_two_factorize_rejects_non_4_regular():
    with pytest.raises(ParameterError):
        two_factorize(cycle_graph(5))


def test_orient_examples():
    assert _cycle_type(euler_orient_2regular(cycle_graph(3))) == [3]
    p = euler_orient_2regular(disjoint_union(cycle_graph(3), cycle_graph(4)))
    assert _cycle_type(p) == [3, 4]
    assert euler_orient_2regular(Graph(2, [(0, 1), (0, 1)])).tolist() == [1, 0]
    with pytest.raises(ParameterError):
        euler_orient_2regular(Graph(3, [(0, 1), (1, 2)]))


def test_orient_starts_low():
    p = euler_orient_2regular(cycle_graph(6))
    assert p[0] == 1 and p[1] == 2


def test_word_check_rotation():
    rot = _rotation(7, 1)
    rep = word_check(PermutationPair(rot, rot, 1), 6)
    # equal rotations: "aB" acts trivially
    assert rep.free_up_to == 1 and rep.violating_word == "aB" and rep.fixed_points == 7
    # powers of a single rotation are free below 7
    x = np.arange(7)
    for _ in range(6):
        x = rot[x]
        assert not np.any(x == np.arange(7))


def test_word_check_commutator():
    rep = word_check(PermutationPair(_rotation(101, 1), _rotation(101, 10), 1), 6)
    assert rep.free_up_to == 3 and rep.violating_word == "abAB" and rep.fixed_points == 101


def test_word_check_identity():
    ident = np.arange(9)
    rep = word_check(PermutationPair(ident, _rotation(9, 1), 1), 4)
    assert rep.free_up_to == 0 and rep.violating_word == "a" and rep.fixed_points == 9


def test_word_counts_full_enumeration():
    rng = np.random.default_rng(0)
    pp = PermutationPair(rng.permutation(50), rng.permutation(50), 1)
    rep = word_check(pp, 6, stop=False, jobs=2)
    assert rep.words_checked == {k: reduced_word_count(k) for k in range(1, 7)}
    assert rep.words_checked[6] == 972
    assert word_check(pp, 6, stop=False).to_dict() == rep.to_dict()


def test_build_f2_input_checks():
    with pytest.raises(ParameterError):
        build_f2(Graph(4, [(0, 1), (1, 2)]), 0.1, 5)
    with pytest.raises(ParameterError):
        build_f2(random_regular(50, 4, 0), 0.1, 5, delta=2)
