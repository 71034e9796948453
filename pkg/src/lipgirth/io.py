"""Text formats for graphs, witnessed subgraphs, permutations and matchings.

Graph: ``n m`` then ``m`` lines ``u v``. Witnessed subgraph: ``n m L`` then
lines ``u v k p_0 ... p_k``. Permutation pair: two lines of ``n`` images; a single permutation is one line.
Matching: lines ``u v``. Lines starting with ``#`` are comments everywhere.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .graph import Graph

__all__ = [
    "FormatError",
    "read_graph",
    "write_graph",
    "format_graph",
    "read_witnessed",
    "write_witnessed",
    "read_permutations",
    "write_permutations",
    "read_permutation",
    "write_permutation",
    "read_matching",
    "write_matching",
    "write_json",
    "to_jsonable",
]


class FormatError(ParameterError):
    """A file does not follow its documented text format."""


def _lines(source):
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s and not s.startswith("#"):
            out.append((lineno, s))
    return out


def _ints(lineno, s):
    try:
        return [int(t) for t in s.split()]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: expected integers, got {s!r}") from exc


def _write(text, dest):
    if dest is None or dest == "-":
        sys.stdout.write(text)
    elif hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def format_graph(g):
    rows = g.sorted_edge_list()
    body = "".join(f"{u} {v}\n" for u, v in rows.tolist())
    return f"{g.n} {g.m}\n{body}"


def write_graph(g, dest):
    _write(format_graph(g), dest)


def read_graph(source):
    lines = _lines(source)
    if not lines:
        raise FormatError("empty graph file")
    head = _ints(*lines[0])
    if len(head) != 2:
        raise FormatError("header must be 'n m'")
    n, m = head
    if len(lines) - 1 != m:
        raise FormatError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    for lineno, s in lines[1:]:
        e = _ints(lineno, s)
        if len(e) != 2:
            raise FormatError(f"line {lineno}: expected 'u v'")
        edges.append(e)
    try:
        return Graph(n, edges)
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def write_witnessed(ws, dest):
    rows = list(ws.rows())
    out = [f"{ws.n} {len(rows)} {ws.L}\n"]
    for u, v, p in rows:
        out.append(f"{u} {v} {len(p) - 1} " + " ".join(map(str, p)) + "\n")
    _write("".join(out), dest)


def read_witnessed(source):
    """Return ``(n, L, rows)`` with rows ``(u, v, walk)``; checks only the syntax."""
    lines = _lines(source)
    if not lines:
        raise FormatError("empty witnessed-subgraph file")
    head = _ints(*lines[0])
    if len(head) != 3:
        raise FormatError("header must be 'n m L'")
    n, m, L = head
    if len(lines) - 1 != m:
        raise FormatError(f"header declares {m} edges, found {len(lines) - 1}")
    rows = []
    for lineno, s in lines[1:]:
        t = _ints(lineno, s)
        if len(t) < 4 or t[2] < 0 or len(t) != t[2] + 4:
            raise FormatError(f"line {lineno}: expected 'u v k p_0 ... p_k'")
        rows.append((t[0], t[1], tuple(t[3:])))
    return n, L, rows


def write_permutations(alpha, beta, dest):
    text = " ".join(map(str, np.asarray(alpha).tolist())) + "\n"
    text += " ".join(map(str, np.asarray(beta).tolist())) + "\n"
    _write(text, dest)


def read_permutations(source):
    lines = _lines(source)
    if len(lines) != 2:
        raise FormatError("permutation file needs exactly two lines")
    alpha, beta = (np.array(_ints(*ln), dtype=np.int64) for ln in lines)
    if len(alpha) != len(beta):
        raise FormatError("permutations have different lengths")
    return alpha, beta


def write_permutation(succ, dest):
    _write(" ".join(map(str, np.asarray(succ).tolist())) + "\n", dest)


def read_permutation(source):
    lines = _lines(source)
    if len(lines) != 1:
        raise FormatError("permutation file needs exactly one line")
    return np.array(_ints(*lines[0]), dtype=np.int64)


def write_matching(pairs, dest, oriented=False):
    """``oriented`` keeps each pair's order (tail first) instead of sorting it."""
    pairs = sorted((int(u), int(v)) if oriented else (min(u, v), max(u, v)) for u, v in pairs)
    _write("".join(f"{u} {v}\n" for u, v in pairs), dest)


def read_matching(source):
    pairs = []
    for lineno, s in _lines(source):
        t = _ints(lineno, s)
        if len(t) != 2:
            raise FormatError(f"line {lineno}: expected 'u v'")
        pairs.append((t[0], t[1]))
    return pairs


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and (obj != obj or obj in (float("inf"), float("-inf"))):
        return None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(obj, dest=None):
    _write(json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n", dest)
