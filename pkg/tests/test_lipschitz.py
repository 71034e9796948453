from fractions import Fraction

import numpy as np
import pytest

from lipgirth.cycles import count_short_cycles, girth, measure_lambda
from lipgirth.errors import ParameterError, PreconditionError, StageError
from lipgirth.graph import Graph, complete_graph, cycle_graph, random_regular
from lipgirth.lipschitz import (
    compute_L,
    lipschitz_extract,
    power_graph,
    tame_degrees_stage1,
    tame_degrees_stage2,
)
from lipgirth.queries import pair_distances
from lipgirth.witness import WitnessedSubgraph


def test_compute_L_examples():
    for d in (3, 10, 1000):
        assert compute_L(Fraction(1, 6), 3, d) == 6
    for delta in (1, 2, 3, 5):
        assert compute_L(Fraction(1, 12 * delta), delta, 40) == 4
    assert compute_L(Fraction(1, 13), 1, 40) == 2


def test_compute_L_boundary_is_exact():
    # 12 delta = 36 = 6^2: just below 1/6 the floor drops
    assert compute_L(Fraction(1, 6) - Fraction(1, 10**12), 3, 40) == 4
    assert compute_L(Fraction(1, 6) + Fraction(1, 10**12), 3, 40) == 6


@pytest.mark.parametrize("lam", [0, 1, 1.5, -0.2])
def test_compute_L_rejects_lambda(lam):
    with pytest.raises(ParameterError):
        compute_L(lam, 3, 40)


def test_power_graph_identity():
    g = random_regular(30, 4, 0)
    pg = power_graph(g, 1)
    assert pg.graph.same_edges(g)
    assert all(len(w) == 2 for w in pg.walks)


def test_power_graph_cycle4():
    pg = power_graph(cycle_graph(4), 2)
    assert pg.graph.multiplicity() == {(0, 2): 2, (1, 3): 2}
    assert pg.closed.tolist() == [2, 2, 2, 2]


def test_power_graph_cycle5():
    pg = power_graph(cycle_graph(5), 2)
    mult = pg.graph.multiplicity()
    assert set(mult.values()) == {1} and len(mult) == 5
    assert all((v - u) % 5 in (2, 3) for u, v in mult)
    assert pg.closed.tolist() == [2] * 5


def test_power_graph_walks_are_host_walks():
    g = random_regular(20, 3, 1)
    pg = power_graph(g, 3)
    keys = set(g.edge_keys().tolist())
    for (u, v), w in zip(pg.graph.edges.tolist(), pg.walks.tolist()):
        assert (w[0], w[-1]) == (u, v)
        assert all(min(a, b) * g.n + max(a, b) in keys for a, b in zip(w, w[1:]))
    deg = pg.graph.degree()
    assert np.array_equal(deg + pg.closed, np.full(g.n, 3**3))


def test_stage1_regular_unchanged():
    g = random_regular(40, 3, 0)
    assert tame_degrees_stage1(g, 3).same_edges(g)


def test_stage1_single_conflict():
    # two adjacent degree-3 vertices in an otherwise 2-regular graph
    g = Graph(6, [(0, 1), (0, 2), (0, 3), (2, 3), (1, 4), (1, 5), (4, 5)])
    deg = g.degree()
    assert deg[0] == deg[1] == 3
    out = tame_degrees_stage1(g, 2)
    assert out.m == g.m - 1 and not np.any(np.isin(out.edge_keys(), [0 * 6 + 1]))


def test_stage1_complete6():
    out = tame_degrees_stage1(complete_graph(6), 3, seed=2)
    deg = out.degree()
    assert deg.min() >= 3
    over = deg > 3
    assert not np.any(over[out.edges[:, 0]] & over[out.edges[:, 1]])


def test_stage1_min_degree_precondition():
    with pytest.raises(PreconditionError):
        tame_degrees_stage1(cycle_graph(5), 3)


def test_stage2_star():
    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    ws = tame_degrees_stage2(star, 2, seed=0)
    deg = ws.graph.degree()
    assert deg[0] == 2 and ws.graph.m == 3
    chord = [e for e in ws.graph.edges.tolist() if 0 not in e]
    assert len(chord) == 1
    assert ws.L == 2 and not ws.problems(star)


def test_stage2_odd_excess_stays():
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    ws = tame_degrees_stage2(g, 2)
    assert ws.graph.same_edges(g)


def test_stage2_degree_law():
    g = tame_degrees_stage1(random_regular(60, 9, 3), 3, seed=1)
    deg_in = g.degree()
    out = tame_degrees_stage2(g, 3, seed=4).graph.degree()
    assert np.any(deg_in > 4)
    for x in range(g.n):
        drop = 2 * ((deg_in[x] - 3) // 2) if deg_in[x] > 3 else 0
        assert out[x] == deg_in[x] - drop


def test_stage2_rejects_adjacent_over_degree():
    with pytest.raises(PreconditionError):
        tame_degrees_stage2(complete_graph(5), 2)


def test_lipschitz_extract_end_to_end():
    g = random_regular(1000, 40, 0)
    lam = measure_lambda(count_short_cycles(g, 5, record=False), 40)
    ws, cert = lipschitz_extract(g, lam, 3, 5, seed=0)
    deg = ws.graph.degree()
    assert deg.min() >= 3 and deg.max() <= 4
    assert cert["L"] == compute_L(lam, 3, 40) == cert["L_formula"]
    assert ws.max_witness() <= cert["L"] and not ws.problems(g)
    assert girth(ws.graph) * cert["L"] >= 5
    rows = list(ws.rows())
    dist = pair_distances(g, [(u, v) for u, v, _ in rows], cert["L"])
    assert np.all(dist <= cert["L"])


def test_lipschitz_extract_errors():
    g = random_regular(200, 10, 0)
    with pytest.raises(ParameterError):
        lipschitz_extract(g, 1.0, 3, 5)
    with pytest.raises(StageError) as exc:
        lipschitz_extract(g, 0.01, 3, 5)
    assert exc.value.stage == "hypothesis"
    with pytest.raises(ParameterError):
        lipschitz_extract(Graph(3, [(0, 1)]), 0.1, 1, 5)


def test_identity_witness():
    g = cycle_graph(5)
    ws = WitnessedSubgraph.identity(g)
    assert ws.L == 1 and ws.max_witness() == 1 and not ws.problems()
