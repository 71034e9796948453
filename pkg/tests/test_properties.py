from fractions import Fraction

import networkx as nx
import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import random_4regular_multigraph
from lipgirth._rng import keyed_uniform
from lipgirth.euler import euler_orientation
from lipgirth.graph import Graph, random_regular
from lipgirth.lipschitz import compute_L, power_graph
from lipgirth.matching import BipartiteGraph, Matching, find_augmenting_paths, flip
from lipgirth.regularize import (
    PermutationPair,
    euler_orient_2regular,
    peel_cycles,
    reduced_word_count,
    regularize,
    two_factorize,
    word_check,
)
from lipgirth.witness import glue


@st.composite
def simple_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


@st.composite
def even_multigraphs(draw, max_n=10):
    """Multigraphs with every degree even: a union of closed walks."""
    n = draw(st.integers(2, max_n))
    edges = []
    for _ in range(draw(st.integers(1, 4))):
        walk = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=8))
        walk = [v for i, v in enumerate(walk) if i == 0 or v != walk[i - 1]]
        if len(walk) < 2 or walk[0] == walk[-1] and len(walk) == 2:
            continue
        if walk[0] == walk[-1]:
            walk = walk[:-1]
        if len(walk) == 2:
            edges += [tuple(walk), tuple(walk)]
            continue
        edges += list(zip(walk, walk[1:] + walk[:1]))
    return Graph(n, edges)


@given(simple_graphs(), st.integers(0, 2**31))
def test_peel_leaves_parity_forest(g, seed):
    f = peel_cycles(g, seed)
    forest = g.keep(f)
    assert np.array_equal(forest.degree() % 2, g.degree() % 2)
    assert nx.is_forest(nx.Graph(forest.edges.tolist())) if forest.m else True
    rest = g.keep(np.setdiff1d(g.ids, f))
    assert np.all(rest.degree() % 2 == 0)


@given(even_multigraphs())
def test_euler_orientation_in_equals_out(g):
    tails, heads = euler_orientation(g)
    assert np.array_equal(np.bincount(tails, minlength=g.n), np.bincount(heads, minlength=g.n))
    assert sorted(map(sorted, zip(tails.tolist(), heads.tolist()))) == sorted(map(sorted, g.edges.tolist()))


@given(st.integers(3, 60), st.integers(0, 2**31), st.integers(0, 2**31))
def test_two_factors_partition_and_orient(n, gseed, seed):
    g = random_4regular_multigraph(n, gseed)
    f1, f2 = two_factorize(g, seed)
    assert np.all(f1.degree() == 2) and np.all(f2.degree() == 2)
    assert sorted(f1.ids.tolist() + f2.ids.tolist()) == g.ids.tolist()
    for f in (f1, f2):
        p = euler_orient_2regular(f)
        assert sorted(p.tolist()) == list(range(n)) and not np.any(p == np.arange(n))
        keys = set(f.edge_keys().tolist())
        assert all(min(x, y) * n + max(x, y) in keys for x, y in enumerate(p.tolist()))


@given(st.integers(2, 30), st.integers(0, 2**31), st.integers(1, 5))
def test_word_counts_are_exact(n, seed, k):
    rng = np.random.default_rng(seed)
    rep = word_check(PermutationPair(rng.permutation(n), rng.permutation(n), 1), k, stop=False)
    assert rep.words_checked == {j: 4 * 3 ** (j - 1) for j in range(1, k + 1)}
    assert all(reduced_word_count(j) == 4 * 3 ** (j - 1) for j in range(1, k + 1))


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**31))
def test_flip_grows_matching_by_one(na, nb, seed):
    rng = np.random.default_rng(seed)
    edges = {(int(a), int(b)) for a, b in zip(rng.integers(0, na, 3 * na), rng.integers(0, nb, 3 * na))}
    bg = BipartiteGraph(na, nb, sorted(edges))
    m = Matching.empty(bg)
    while True:
        paths = find_augmenting_paths(bg, m, 2 * (na + nb))
        if not paths:
            break
        for p in paths:
            before = m.size
            flip(m, p)
            assert m.size == before + 1 and m.is_valid(bg)
    g = nx.Graph()
    g.add_nodes_from(range(na + nb))
    g.add_edges_from((a, na + b) for a, b in edges)
    assert m.size == len(nx.bipartite.hopcroft_karp_matching(g, top_nodes=range(na))) // 2


@given(st.integers(0, 2**63), st.integers(0, 1000), st.lists(st.integers(0, 10**6), min_size=1, max_size=30))
def test_keyed_stream_is_order_free(seed, a, ids):
    ids = np.array(ids, dtype=np.int64)
    vals = keyed_uniform(seed, a, ids)
    perm = np.random.default_rng(0).permutation(len(ids))
    assert np.array_equal(keyed_uniform(seed, a, ids[perm]), vals[perm])
    assert np.all((vals >= 0) & (vals < 1))


@given(st.integers(3, 9), st.integers(1, 3), st.integers(0, 2**31))
def test_power_graph_degree_law(n, h, seed):
    d = 3 if n % 2 == 0 else 4
    if d >= n:
        return
    g = Graph.from_networkx(nx.random_regular_graph(d, n, seed=seed))
    pg = power_graph(g, h)
    assert np.array_equal(pg.graph.degree() + pg.closed, np.full(n, d**h))


@given(st.fractions(Fraction(1, 1000), Fraction(999, 1000)), st.fractions(Fraction(1, 1000), Fraction(999, 1000)),
       st.integers(1, 5))
def test_compute_L_monotone_in_lambda(a, b, delta):
    lo, hi = min(a, b), max(a, b)
    assert compute_L(lo, delta, 100) <= compute_L(hi, delta, 100)
    assert compute_L(lo, delta, 100) % 2 == 0


@given(st.lists(st.integers(0, 20), min_size=2, max_size=6), st.lists(st.integers(0, 20), min_size=1, max_size=6),
       st.booleans(), st.booleans())
def test_glue_concatenates(first, tail, flip_a, flip_b):
    second = [first[-1]] + tail
    assume(len({first[0], first[-1], second[-1]}) == 3)
    a = first[::-1] if flip_a else first
    b = second[::-1] if flip_b else second
    assert glue(a, b) == tuple(first + tail)


@given(st.integers(20, 80), st.integers(1, 4), st.integers(0, 2**31))
def test_forest_regime_surgeries_fix_every_degree(n, pairs, seed):
    # 4-regular base; independent pairs a, b joined through K5 minus (u, v) as a - u, v - b
    base = random_regular(n, 4, seed)
    rng = np.random.default_rng(seed)
    picks, blocked = [], set()
    for v in rng.permutation(n).tolist():
        if v not in blocked:
            picks.append(v)
            blocked |= {v, *base.neighbors(v).tolist()}
    picks = picks[: 2 * pairs]
    assume(len(picks) >= 2)
    picks = picks[: len(picks) // 2 * 2]
    edges = base.edges.tolist()
    m = n
    for a, b in zip(picks[::2], picks[1::2]):
        k5 = [(m + i, m + j) for i in range(5) for j in range(i + 1, 5) if (i, j) != (0, 1)]
        edges += k5 + [(a, m), (m + 1, b)]
        m += 5
    g = Graph(m, edges)
    out, rep = regularize(g, 4, seed=seed)
    assert rep["regime"] == "forest" and rep["surgeries"] == len(picks) // 2
    assert np.all(out.graph.degree() == 4)
    assert out.max_witness() <= 3 and not out.problems(g)
