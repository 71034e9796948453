"""Command-line interface: ``lipgirth <subcommand> [options]``.

Every producing subcommand re-checks its artifact with :mod:`lipgirth.verify`
before writing the certificate. Reports are JSON on stdout (or ``--cert``) and
always carry the seed, the parameters and the package version. Exit codes: 0
success, 1 failed stage or failed verification, 2 bad parameters or input.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__, io
from .cycles import check_hypothesis, count_short_cycles, girth, measure_lambda
from .errors import LipgirthError, ParameterError, StageError
from .girth_subgraph import ExtractionParams, build_instance, extract
from .graph import generate
from .lipschitz import lipschitz_extract
from .lll import check_condition
from .matching import (
    BipartiteGraph,
    build_z_action,
    match_to_completion,
    orient_matching_lll,
    perfect_matching_even_regular,
)
from .queries import spectral_report
from .regularize import build_f2
from .verify import (
    verify_files,
    verify_matching,
    verify_orientation,
    verify_permutations,
    verify_subgraph,
    verify_witnessed,
    verify_zaction,
)


class VerificationFailed(LipgirthError):
    def __init__(self, report):
        super().__init__("; ".join(report.problems[:3]) or "verification failed")
        self.report = report


def _report(args, body):
    params = {k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)}
    return {"command": args.command, "version": __version__, "seed": getattr(args, "seed", None), "params": params, **body}


def _emit(args, body):
    io.write_json(_report(args, body), getattr(args, "cert", None))


def _check(report):
    if not report.ok:
        raise VerificationFailed(report)
    return report.to_dict()


def _lambda(g, args, g_target):
    if args.lam is not None:
        return Fraction(args.lam)
    return measure_lambda(count_short_cycles(g, g_target, record=False), g.regular_degree() or 1)


# -- subcommands -------------------------------------------------------------------


def cmd_gen(args):
    params = {"n": args.n, "d": args.d, "a": args.a, "b": args.b, "path": args.path}
    params = {k: v for k, v in params.items() if v is not None}
    try:
        g = generate(args.model, seed=args.seed, **params)
    except KeyError as exc:
        raise ParameterError(f"model {args.model!r} needs --{exc.args[0]}") from exc
    io.write_graph(g, args.output)
    if args.output not in (None, "-"):
        _emit(args, {"n": g.n, "m": g.m})


def cmd_check(args):
    g = io.read_graph(args.input)
    d = g.regular_degree()
    if d is None:
        raise ParameterError("check needs a regular graph")
    prof = count_short_cycles(g, args.g, record=args.condition)
    if args.base is not None:
        base = Fraction(args.base)
    elif args.lam is not None:
        base = Fraction(args.lam) * d
    else:
        base = Fraction(d, 12 * args.delta)
    hyp = check_hypothesis(prof, base)
    body = {"hypothesis": hyp.to_dict(), "lambda_measured": measure_lambda(prof, d)}
    if args.condition:
        inst = build_instance(g, prof, ExtractionParams(args.delta, args.g, allow_irregular=False))
        body["condition"] = check_condition(inst).to_dict()
    _emit(args, body)
    return 0 if hyp.ok and body.get("condition", {"ok": True})["ok"] else 1


def cmd_extract(args):
    g = io.read_graph(args.input)
    p = ExtractionParams(
        args.delta, args.g, seed=args.seed, algorithm=args.algorithm, selection=args.selection,
        override=args.override, resample_cap=args.resample_cap, round_cap=args.round_cap, a_seq=args.a_seq,
    )
    h, cert = extract(g, p)
    cert["verify"] = _check(verify_subgraph(g, h, args.g, args.delta))
    io.write_graph(h, args.output)
    _emit(args, cert)


def cmd_lipschitz(args):
    g = io.read_graph(args.input)
    lam = _lambda(g, args, args.g)
    ws, cert = lipschitz_extract(g, lam, args.delta, args.g, args.seed, override=args.override)
    rows = list(ws.rows())
    cert["verify"] = _check(
        verify_witnessed(g, ws.n, ws.L, rows, math.ceil(args.g / ws.L), args.delta, args.delta + 1)
    )
    io.write_witnessed(ws, args.output)
    _emit(args, cert)


def cmd_f2(args):
    g = io.read_graph(args.input)
    lam = _lambda(g, args, args.g)
    pp, cert = build_f2(g, lam, args.g, args.seed, args.word_cap, jobs=args.jobs)
    cert["verify"] = _check(verify_permutations(g, pp.alpha, pp.beta, pp.L, cert["required_free"]))
    cert["word_table"] = {k: {"words": v, "expected": 4 * 3 ** (k - 1)} for k, v in cert["words_checked"].items()}
    io.write_permutations(pp.alpha, pp.beta, args.output)
    _emit(args, cert)


def _sides(g, a_size):
    if a_size is not None:
        return np.arange(a_size)
    color = np.full(g.n, -1)
    indptr, nbr, _ = g.csr()
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in nbr[indptr[x]:indptr[x + 1]].tolist():
                if color[y] < 0:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    raise ParameterError("graph is not bipartite")
    return np.flatnonzero(color == 0)


def cmd_match(args):
    g = io.read_graph(args.input)
    bg, a_vert, b_vert = BipartiteGraph.from_graph(g, _sides(g, args.a_size))
    m, stats = match_to_completion(bg, args.seed, C=args.C, audit=args.audit)
    pairs = [(int(a_vert[a]), int(b_vert[b])) for a, b in m.pairs()]
    stats["verify"] = _check(verify_matching(g, pairs, perfect=False))
    io.write_matching(pairs, args.output)
    _emit(args, stats)
    return 0 if stats["perfect"] else 1


def _matching_for(g, args):
    if args.matching:
        return [tuple(p) for p in io.read_matching(args.matching)]
    pairs, rep = perfect_matching_even_regular(g, args.seed)
    if pairs is None:
        raise StageError("matching", ParameterError(f"no perfect matching by the Euler route: {rep}"))
    return pairs


def cmd_orient(args):
    g = io.read_graph(args.input)
    pairs = _matching_for(g, args)
    part = orient_matching_lll(g, pairs, args.seed, args.threshold, args.resample_cap)
    threshold = args.threshold or math.ceil(2 * int(g.degree().max()) / 5)
    oriented = list(zip(part.tail.tolist(), part.head.tolist()))
    body = {
        "threshold": threshold,
        "min_cross": int(part.cross.min()),
        "stats": part.stats.to_dict(),
        "verify": _check(verify_orientation(g, oriented, threshold)),
    }
    io.write_matching(oriented, args.output, oriented=True)
    _emit(args, body)


def cmd_zaction(args):
    g = io.read_graph(args.input)
    pairs = _matching_for(g, args)
    succ, rep = build_z_action(g, pairs, args.seed, args.threshold, args.resample_cap)
    rep["verify"] = _check(verify_zaction(g, succ))
    io.write_permutation(succ, args.output)
    _emit(args, rep)


def cmd_verify(args):
    report = verify_files(
        args.kind, args.host, args.artifact, girth=args.girth, min_degree=args.min_degree,
        max_degree=args.max_degree, L=args.L, words=args.words, threshold=args.threshold,
    )
    _emit(args, report.to_dict())
    return 0 if report.ok else 1


def cmd_stats(args):
    g = io.read_graph(args.input)
    deg = g.degree()
    gh = girth(g)
    body = {
        "n": g.n,
        "m": g.m,
        "min_degree": int(deg.min()) if g.n else 0,
        "max_degree": int(deg.max()) if g.n else 0,
        "regular": g.regular_degree(),
        "simple": g.is_simple(),
        "girth": None if math.isinf(gh) else int(gh),
    }
    if args.g:
        prof = count_short_cycles(g, args.g, record=False)
        tot = prof.counts.sum(axis=0)
        body["cycles"] = {k: int(tot[k] // k) for k in range(2, args.g) if tot[k]}
        if g.regular_degree():
            body["lambda_measured"] = measure_lambda(prof, g.regular_degree())
    if args.spectral:
        rep = spectral_report(g)
        body["spectral"] = {"rho": rep.rho, "method": rep.method, "expander_flag": rep.expander_flag}
    _emit(args, body)


# -- parser ------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="lipgirth", description="Large-girth and Lipschitz subgraph constructions.")
    ap.add_argument("--version", action="version", version=f"lipgirth {__version__}")
    ap.add_argument("--jobs", type=int, default=1, help="threads for the parallel-safe sections (word search)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    def seed(p):
        p.add_argument("--seed", type=int, default=0)

    def io_args(p, out=True):
        p.add_argument("-i", "--input", required=True, help="graph file")
        if out:
            p.add_argument("-o", "--output", required=True, help="artifact file ('-' for stdout)")
            p.add_argument("--cert", default=None, help="certificate JSON (default stdout)")

    p = add("gen", cmd_gen, "generate a graph")
    p.add_argument("--model", required=True)
    for k in ("n", "d", "a", "b"):
        p.add_argument(f"--{k}", type=int)
    p.add_argument("--path")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--cert", default=None)
    seed(p)

    p = add("check", cmd_check, "cycle-count hypothesis and condition audit")
    io_args(p, out=False)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--delta", type=int, default=2)
    p.add_argument("--base", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--condition", action="store_true")
    p.add_argument("--cert", default=None)

    p = add("extract", cmd_extract, "large-girth spanning subgraph")
    io_args(p)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--algorithm", type=int, choices=(1, 2), default=1)
    p.add_argument("--selection", choices=("first-violated", "random-violated"), default="first-violated")
    p.add_argument("--a-seq", dest="a_seq", choices=("triangular", "interleaved", "dyadic"), default="triangular")
    p.add_argument("--override", action="store_true")
    p.add_argument("--resample-cap", dest="resample_cap", type=int, default=10**8)
    p.add_argument("--round-cap", dest="round_cap", type=int, default=10**5)
    seed(p)

    p = add("lipschitz", cmd_lipschitz, "Lipschitz subgraph with degrees in [delta, delta+1]")
    io_args(p)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, help="growth rate (default: measured)")
    p.add_argument("--override", action="store_true")
    seed(p)

    p = add("f2", cmd_f2, "two bijections with the fixed-point word certificate")
    io_args(p)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--word-cap", dest="word_cap", type=int, default=6)
    seed(p)

    p = add("match", cmd_match, "perfect matching of a bipartite graph")
    io_args(p)
    p.add_argument("--a-size", dest="a_size", type=int, help="side A is 0..a_size-1 (default: 2-colouring)")
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--audit", action="store_true")
    seed(p)

    for name, func, help_ in (
        ("orient", cmd_orient, "orient a perfect matching"),
        ("zaction", cmd_zaction, "permutation from a regular graph and a perfect matching"),
    ):
        p = add(name, func, help_)
        io_args(p)
        p.add_argument("--matching", help="matching file (default: Euler route)")
        p.add_argument("--threshold", type=int)
        p.add_argument("--resample-cap", dest="resample_cap", type=int, default=10**6)
        seed(p)

    p = add("verify", cmd_verify, "check an artifact against its host graph")
    p.add_argument("--kind", required=True, choices=("subgraph", "witnessed", "permutations", "matching", "orientation", "zaction"))
    p.add_argument("--host", required=True)
    p.add_argument("--artifact", required=True)
    p.add_argument("--girth", type=int)
    p.add_argument("--min-degree", dest="min_degree", type=int)
    p.add_argument("--max-degree", dest="max_degree", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--words", type=int)
    p.add_argument("--threshold", type=int)
    p.add_argument("--cert", default=None)

    p = add("stats", cmd_stats, "graph statistics")
    io_args(p, out=False)
    p.add_argument("--g", type=int, help="count cycles shorter than this")
    p.add_argument("--spectral", action="store_true")
    p.add_argument("--cert", default=None)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StageError, LipgirthError) as exc:
        cause = exc.cause if isinstance(exc, StageError) else exc
        if isinstance(cause, ParameterError):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, VerificationFailed):
            io.write_json(_report(args, exc.report.to_dict()), sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
