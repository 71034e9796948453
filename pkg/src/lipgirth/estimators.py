"""Thin scikit-learn style wrappers around the functional pipeline.

Each transformer takes a host :class:`~lipgirth.graph.Graph` in ``fit``,
records what it learned from it (cycle profile, growth rate, certificate) in
trailing-underscore attributes, and returns the constructed object from
``transform``. Only the host graph passed to ``fit`` can be transformed.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .cycles import count_short_cycles, measure_lambda
from .errors import ParameterError
from .girth_subgraph import ExtractionParams, extract
from .graph import Graph
from .lipschitz import lipschitz_extract
from .regularize import build_f2

__all__ = ["check_graph", "GirthSubgraphExtractor", "LipschitzSubgraph", "F2Builder"]


def check_graph(X, regular=False):
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a Graph, a networkx graph, or an ``(m, 2)`` edge array (with ``n``
    taken as ``max + 1``).
    """
    if isinstance(X, Graph):
        g = X
    elif hasattr(X, "nodes") and hasattr(X, "edges"):
        g = Graph.from_networkx(X)
    else:
        arr = np.asarray(X)
        if arr.ndim != 2 or arr.shape[1] != 2 or not np.issubdtype(arr.dtype, np.integer):
            raise ParameterError("expected a Graph, a networkx graph or an integer (m, 2) edge array")
        g = Graph(int(arr.max()) + 1 if arr.size else 0, arr)
    if regular and g.regular_degree() is None:
        raise ParameterError("graph must be regular")
    return g


class _GraphTransformer(TransformerMixin, BaseEstimator):
    def _check_fitted(self, g):
        if not hasattr(self, "host_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        if not g.same_edges(self.host_):
            raise ParameterError("transform needs the graph passed to fit")


class GirthSubgraphExtractor(_GraphTransformer):
    """Spanning subgraph with girth ``>= g`` and minimum degree ``>= delta``."""

    def __init__(self, delta=2, g=5, seed=0, algorithm=1, selection="first-violated", override=False, a_seq="triangular"):
        self.delta = delta
        self.g = g
        self.seed = seed
        self.algorithm = algorithm
        self.selection = selection
        self.override = override
        self.a_seq = a_seq

    def fit(self, X, y=None):
        g = check_graph(X, regular=True)
        self.host_ = g
        self.profile_ = count_short_cycles(g, self.g, record=False)
        self.lambda_ = measure_lambda(self.profile_, g.regular_degree())
        return self

    def transform(self, X):
        g = check_graph(X)
        self._check_fitted(g)
        p = ExtractionParams(
            self.delta, self.g, seed=self.seed, algorithm=self.algorithm, selection=self.selection,
            override=self.override, a_seq=self.a_seq,
        )
        h, self.certificate_ = extract(g, p)
        return h


class LipschitzSubgraph(_GraphTransformer):
    """Witnessed ``L``-Lipschitz subgraph; ``lam=None`` uses the growth rate measured in ``fit``."""

    def __init__(self, delta=3, g_target=5, lam=None, seed=0):
        self.delta = delta
        self.g_target = g_target
        self.lam = lam
        self.seed = seed

    def fit(self, X, y=None):
        g = check_graph(X, regular=True)
        self.host_ = g
        prof = count_short_cycles(g, self.g_target, record=False)
        self.lambda_ = self.lam if self.lam is not None else measure_lambda(prof, g.regular_degree())
        return self

    def transform(self, X):
        g = check_graph(X)
        self._check_fitted(g)
        ws, self.certificate_ = lipschitz_extract(g, self.lambda_, self.delta, self.g_target, self.seed)
        return ws


class F2Builder(_GraphTransformer):
    """Pair of bijections with bounded displacement and the word certificate."""

    def __init__(self, g_target=5, lam=None, seed=0, word_cap=6):
        self.g_target = g_target
        self.lam = lam
        self.seed = seed
        self.word_cap = word_cap

    def fit(self, X, y=None):
        g = check_graph(X, regular=True)
        self.host_ = g
        prof = count_short_cycles(g, self.g_target, record=False)
        self.lambda_ = self.lam if self.lam is not None else measure_lambda(prof, g.regular_degree())
        return self

    def transform(self, X):
        g = check_graph(X)
        self._check_fitted(g)
        pp, self.certificate_ = build_f2(g, self.lambda_, self.g_target, self.seed, self.word_cap)
        return pp
