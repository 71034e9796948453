import io as stdio
import json

import networkx as nx
import numpy as np
import pytest

from lipgirth import io
from lipgirth.cycles import girth
from lipgirth.graph import Graph, cycle_graph, random_regular
from lipgirth.regularize import PermutationPair
from lipgirth.verify import (
    girth_below,
    verify_files,
    verify_matching,
    verify_permutations,
    verify_subgraph,
    verify_witnessed,
    verify_zaction,
)
from lipgirth.witness import WitnessedSubgraph


def _roundtrip(write, read, *obj):
    buf = stdio.StringIO()
    write(*obj, buf)
    return read(stdio.StringIO(buf.getvalue()))


# -- formats ------------------------------------------------------------------


def test_graph_roundtrip_with_multiedges():
    g = Graph(5, [(0, 1), (1, 0), (2, 3), (3, 4)])
    h = _roundtrip(io.write_graph, io.read_graph, g)
    assert h.same_edges(g) and h.n == 5


def test_graph_reader_errors():
    for text in ["", "3 2\n0 1\n", "3 1\n0 x\n", "3 1\n0 1 2\n", "3 1\n0 5\n", "3\n"]:
        with pytest.raises(io.FormatError):
            io.read_graph(stdio.StringIO(text))


def test_graph_reader_skips_comments(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n3 2\n0 1\n\n# more\n1 2\n")
    assert io.read_graph(p).m == 2


def test_witnessed_roundtrip():
    g = cycle_graph(6)
    ws = WitnessedSubgraph(Graph(6, [(0, 2)]), {0: (0, 1, 2)}, 2, g)
    n, L, rows = _roundtrip(io.write_witnessed, io.read_witnessed, ws)
    assert (n, L) == (6, 2) and rows == [(0, 2, (0, 1, 2))]


def test_witnessed_reader_rejects_bad_k():
    with pytest.raises(io.FormatError):
        io.read_witnessed(stdio.StringIO("3 1 2\n0 2 3 0 1 2\n"))


def test_permutation_roundtrips():
    rng = np.random.default_rng(0)
    a, b = rng.permutation(9), rng.permutation(9)
    a2, b2 = _roundtrip(io.write_permutations, io.read_permutations, a, b)
    assert a2.tolist() == a.tolist() and b2.tolist() == b.tolist()
    assert _roundtrip(io.write_permutation, io.read_permutation, a).tolist() == a.tolist()
    with pytest.raises(io.FormatError):
        io.read_permutations(stdio.StringIO("0 1\n1 0 2\n"))


def test_matching_roundtrip_orientation_kept():
    pairs = [(3, 2), (0, 1)]
    assert _roundtrip(io.write_matching, io.read_matching, pairs) == [(0, 1), (2, 3)]
    buf = stdio.StringIO()
    io.write_matching(pairs, buf, oriented=True)
    assert io.read_matching(stdio.StringIO(buf.getvalue())) == [(0, 1), (3, 2)]


def test_json_handles_numpy_and_inf():
    buf = stdio.StringIO()
    io.write_json({"a": np.int64(3), "b": np.array([1.5]), 2: float("inf"), "c": np.bool_(True)}, buf)
    assert json.loads(buf.getvalue()) == {"a": 3, "b": [1.5], "2": None, "c": True}


# -- girth oracle ---------------------------------------------------------------


def test_girth_below_matches_networkx(corpus):
    for name, g in corpus:
        edges = [tuple(e) for e in g.edges.tolist()]
        simple = len({(min(u, v), max(u, v)) for u, v in edges}) == len(edges) and all(u != v for u, v in edges)
        if not simple:
            continue
        want = nx.girth(nx.Graph(edges)) if edges else float("inf")
        for limit in range(3, 12):
            got = girth_below(g.n, edges, limit)
            assert got == (want if want < limit else None), (name, limit)


def test_girth_below_multigraph():
    assert girth_below(3, [(0, 0)], 5) == 1
    assert girth_below(3, [(0, 1), (1, 0)], 5) == 2
    assert girth_below(3, [(0, 1), (1, 0)], 2) is None


# -- verifiers -----------------------------------------------------------------


def test_verify_subgraph_catches_foreign_edge_and_cycle():
    host = random_regular(30, 4, 0)
    assert verify_subgraph(host, host, girth_min=girth(host)).ok
    r = verify_subgraph(host, host, girth_min=girth(host) + 1)
    assert not r.ok and "cycle of length" in r.problems[0]
    keys = set(host.edge_keys().tolist())
    u, v = next((u, v) for u in range(30) for v in range(u + 1, 30) if u * 30 + v not in keys)
    bad = Graph(30, [(u, v)])
    r = verify_subgraph(host, bad)
    assert not r.ok and f"({u}, {v})" in r.problems[0]


def test_verify_witnessed_names_tampered_edge():
    host = cycle_graph(8)
    rows = [(0, 2, (0, 1, 2)), (4, 6, (4, 5, 6))]
    assert verify_witnessed(host, 8, 2, rows).ok
    tampered = [(0, 2, (0, 1, 2)), (4, 6, (4, 3, 6))]
    r = verify_witnessed(host, 8, 2, tampered)
    assert not r.ok and "(4, 6)" in r.problems[0] and "(3, 6)" in r.problems[0]
    r = verify_witnessed(host, 8, 1, rows)
    assert not r.ok and "L=1" in r.problems[0]


def test_verify_permutations():
    host = cycle_graph(11)
    rot = (np.arange(11) + 1) % 11
    rot2 = (np.arange(11) + 2) % 11
    assert verify_permutations(host, rot, rot2, 2).ok
    assert not verify_permutations(host, rot, rot2, 1).ok
    rep = verify_permutations(host, rot, rot2, 2, words=3)
    assert not rep.ok and "fixes" in rep.problems[0]
    dup = rot.copy()
    dup[0] = dup[1]
    r = verify_permutations(host, dup, rot2, 2)
    assert not r.ok and "not a bijection" in r.problems[0]


def test_verify_word_counts_agree_with_word_check():
    from lipgirth.regularize import word_check

    rng = np.random.default_rng(4)
    a, b = rng.permutation(40), rng.permutation(40)
    host = Graph(40, [(i, j) for i in range(40) for j in range(i + 1, 40)])
    r = verify_permutations(host, a, b, 1, words=4)
    w = word_check(PermutationPair(a, b, 1), 4)
    assert r.ok == (w.violating_word is None)
    if w.violating_word is None:
        assert r.facts["word_counts"] == w.words_checked


def test_verify_matching_and_zaction():
    c6 = cycle_graph(6)
    assert verify_matching(c6, [(0, 1), (2, 3), (4, 5)]).ok
    assert not verify_matching(c6, [(0, 1), (1, 2), (4, 5)]).ok
    assert not verify_matching(c6, [(0, 1), (2, 3)]).ok
    assert verify_matching(c6, [(0, 1), (2, 3)], perfect=False).ok
    assert verify_zaction(c6, (np.arange(6) + 1) % 6).ok
    assert "2-cycle" in verify_zaction(c6, [1, 0, 3, 2, 5, 4]).problems[0]
    assert "fixed point" in verify_zaction(c6, [0, 2, 3, 4, 5, 1]).problems[0]


def test_fuzzed_witness_files_agree_with_internal_check():
    host = random_regular(40, 4, 1)
    pair_walks = []
    for u in range(40):
        nb = host.neighbors(u).tolist()
        w = host.neighbors(nb[0]).tolist()
        x = next(t for t in w if t != u)
        pair_walks.append([u, nb[0], x])
    sub = Graph(40, [(p[0], p[-1]) for p in pair_walks])
    ws = WitnessedSubgraph(sub, dict(enumerate(map(tuple, pair_walks))), 2, host)
    assert not ws.problems(host)
    rng = np.random.default_rng(0)
    caught = 0
    for _ in range(200):
        walks = [list(p) for p in pair_walks]
        i = int(rng.integers(40))
        walks[i][1] = int(rng.integers(40))
        n, L, rows = 40, 2, [(p[0], p[-1], tuple(p)) for p in walks]
        r = verify_witnessed(host, n, L, rows)
        internal = WitnessedSubgraph(sub, dict(enumerate(map(tuple, walks))), 2, host).problems(host)
        assert r.ok == (not internal)
        caught += not r.ok
    # most mutations break a step, a few land on another valid walk
    assert 0 < caught < 200


def test_verify_files_dispatch(tmp_path):
    host = cycle_graph(6)
    io.write_graph(host, tmp_path / "h.txt")
    io.write_permutation((np.arange(6) + 1) % 6, tmp_path / "z.txt")
    assert verify_files("zaction", tmp_path / "h.txt", tmp_path / "z.txt").ok
    with pytest.raises(io.FormatError):
        verify_files("bogus", tmp_path / "h.txt", tmp_path / "z.txt")
