import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lipgirth.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    random_regular,
)

settings.register_profile(
    "lipgirth", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lipgirth")


def random_4regular_multigraph(n, seed):
    """Union of two fixed-point-free permutations' functional graphs (parallel edges allowed)."""
    rng = np.random.default_rng(seed)
    edges = []
    for _ in range(2):
        while True:
            p = rng.permutation(n)
            if not np.any(p == np.arange(n)):
                break
        edges.extend((v, int(p[v])) for v in range(n))
    return Graph(n, edges)


def small_corpus():
    """Named graphs with at most 10 vertices, simple and multigraph."""
    out = [(f"cycle{n}", cycle_graph(n)) for n in range(3, 11)]
    out += [(f"complete{n}", complete_graph(n)) for n in range(2, 11)]
    out += [(f"K{a},{b}", complete_bipartite(a, b)) for a in range(1, 6) for b in range(a, 6) if a + b <= 10]
    out.append(("petersen", Graph.from_networkx(nx.petersen_graph())))
    out.append(("2xK4", disjoint_union(complete_graph(4), complete_graph(4))))
    for s in range(3):
        out.append((f"rr10-3-{s}", random_regular(10, 3, s)))
        out.append((f"rr10-4-{s}", random_regular(10, 4, s)))
        out.append((f"multi8-{s}", random_4regular_multigraph(8, s)))
    out.append(("doubled-triangle", Graph(3, [(0, 1), (1, 2), (2, 0), (0, 1), (1, 2), (2, 0)])))
    out.append(("theta", Graph(5, [(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 4)])))
    return out


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()
