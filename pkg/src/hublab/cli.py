"""Command-line front end: ``hublab <command> ...``.

Graphs, labels, decompositions and colorings are flat text files; ``-`` (the
default for most inputs) reads stdin, so commands chain through pipes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from .engine import DEFAULT_K_CAP, STRATEGIES, CapExceededError, Engine, SimpleEngine
from .forest import EliminationForest, ForestError
from .generators import (
    gen_balanced_tree,
    gen_complete,
    gen_cycle,
    gen_grid,
    gen_partial_ktree,
    gen_path,
    gen_random_strong,
    gen_random_tree,
    gen_sparse,
    gen_split,
    gen_star,
    make_rng,
    reweight,
    tree_forest,
)
from .graph import (
    ALL_MODES,
    INF,
    DistanceMode,
    Graph,
    GraphError,
    dijkstra,
    ecc_dsum_from_matrix,
    format_graph,
    oracle_all_pairs,
    parse_graph,
)
from .indices import INDEX_K_CAP, BudgetExceededError, IndexSuite, oracle_indices
from .labeling import (
    HubLabeling,
    build_elimination,
    build_pruned,
    build_split,
    format_labeling,
    parse_labeling,
    tighten,
    validate,
)
from .sparse import (
    LABEL_CAP,
    bfs_diameter,
    decide_diameter_le_k,
    format_coloring,
    heuristic_forest,
    parse_coloring,
)
from .treedec import format_td, heuristic_td, parse_td
from .twdnc import dnc_roundtrip

SCHEMA = "hublab/1"
EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_CAP = 0, 2, 3, 4

logger = logging.getLogger("hublab")

INDEX_NAMES = ("wiener", "hyperwiener", "mti", "harary", "rcw", "szeged", "pi")


class InputError(Exception):
    pass


class Mismatch(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- serialization ----------------------------------------------------------------


def jsonable(x):
    """Exact JSON form: rationals as num/den plus a 12-place decimal, inf as a string."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return {"num": x.numerator, "den": x.denominator, "decimal": decimal_string(x)}
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, dict):
        return {str(k.value if isinstance(k, DistanceMode) else k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, DistanceMode):
        return x.value
    return x


def decimal_string(q: Fraction, places: int = 12) -> str:
    sign = "-" if q < 0 else ""
    q = abs(q)
    scaled = (q.numerator * 10**places * 2 + q.denominator) // (2 * q.denominator)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def show(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{x} ({decimal_string(x)})"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(x)


class Report:
    def __init__(self, command: str, args):
        self.data = {
            "schema": SCHEMA,
            "command": command,
            "parameters": {k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and _plain(v)},
            "inputs": {},
            "results": {},
            "timings": {},
        }
        self._t = time.perf_counter()

    def digest(self, name: str, text: str) -> None:
        self.data["inputs"][name] = "sha256:" + hashlib.sha256(text.encode()).hexdigest()

    def phase(self, name: str) -> None:
        now = time.perf_counter()
        self.data["timings"][name] = round(now - self._t, 6)
        self._t = now

    def __setitem__(self, key, value) -> None:
        self.data["results"][key] = jsonable(value)


def _plain(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool, list))


# -- input helpers -------------------------------------------------------------------


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def load_graph(path: str, report: Report | None = None) -> Graph:
    text = read_text(path)
    if report:
        report.digest("graph", text)
    return parse_graph(text)


def load_labels(path: str, report: Report | None = None) -> HubLabeling:
    text = read_text(path)
    if report:
        report.digest("labels", text)
    return parse_labeling(text)


def parse_forest(text: str, n: int) -> EliminationForest:
    parent = [None] * n
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "parent":
            raise ForestError(f"line {lineno}: expected 'parent <v> <p>' (p = -1 for roots)")
        try:
            v, p = int(parts[1]), int(parts[2])
        except ValueError:
            raise ForestError(f"line {lineno}: non-integer token") from None
        if not 0 <= v < n:
            raise ForestError(f"line {lineno}: vertex {v} out of range")
        parent[v] = p
    if None in parent:
        raise ForestError(f"vertex {parent.index(None)} has no parent line")
    return EliminationForest(parent)


def format_forest(forest: EliminationForest) -> str:
    return "".join(f"parent {v} {p}\n" for v, p in enumerate(forest.parent))


def _modes(name: str) -> list[DistanceMode]:
    if name == "all":
        return list(ALL_MODES)
    return [DistanceMode.parse(m) for m in name.split(",")]


def _vertices(args, n: int) -> list[int]:
    if args.all or args.vertex is None:
        return list(range(n))
    if not 0 <= args.vertex < n:
        raise InputError(f"vertex {args.vertex} out of range for n={n}")
    return [args.vertex]


# -- commands ---------------------------------------------------------------------------


def cmd_gen(args, report: Report) -> int:
    fam, n, seed = args.family, args.n, args.seed
    td = clique = None
    if fam == "path":
        g = gen_path(n)
    elif fam == "cycle":
        g = gen_cycle(n)
    elif fam == "star":
        g = gen_star(n)
    elif fam == "complete":
        g = gen_complete(n)
    elif fam == "grid":
        g = gen_grid(n, args.cols)
    elif fam == "tree":
        g = gen_balanced_tree(n, args.branching)
    elif fam == "random-tree":
        g = gen_random_tree(n, seed)
    elif fam == "sparse":
        g = gen_sparse(n, args.extra, seed)
    elif fam == "strong":
        g = gen_random_strong(n, args.m or 3 * n, args.wmax, seed)
    elif fam == "split":
        g, clique = gen_split(args.k, n - args.k, args.p, seed)
    else:  # ktree
        g, td = gen_partial_ktree(n, args.k, args.p, seed, directed=args.directed, wmax=args.wmax)
    write_text(args.out, format_graph(g))
    if td is not None and args.td_out:
        Path(args.td_out).write_text(format_td(td))
    if clique is not None and args.clique_out:
        Path(args.clique_out).write_text(" ".join(map(str, clique)) + "\n")
    report["n"] = g.n
    report["m"] = g.m
    return EXIT_OK


def _forest_for(g: Graph, spec: str) -> EliminationForest:
    if spec == "auto":
        return heuristic_forest(g)
    return parse_forest(read_text(spec), g.n)


def cmd_label(args, report: Report) -> int:
    g = load_graph(args.graph, report)
    if args.action == "build":
        if args.method == "pruned":
            L = build_pruned(g)
        elif args.method == "split":
            if not args.clique:
                raise InputError("--clique is required for the split method")
            L = build_split(g, [int(x) for x in read_text(args.clique).split()])
        elif args.method == "elimination":
            L = build_elimination(g, _forest_for(g, args.forest))
        else:
            if not args.labels:
                raise InputError("--labels is required for the external method")
            L = load_labels(args.labels, report)
            rep = validate(g, L)
            if not rep.ok:
                raise Mismatch(f"external labels fail validation: {len(rep.uncovered)} uncovered pairs")
        report.phase("build")
        write_text(args.out, format_labeling(L))
        report["k"] = L.k
        report["flavor"] = L.flavor.value
        return EXIT_OK
    if not args.labels:
        raise InputError("--labels is required")
    L = load_labels(args.labels, report)
    if args.action == "tighten":
        T = tighten(g, L)
        write_text(args.out, format_labeling(T))
        report["k"] = T.k
        return EXIT_OK
    rep = validate(g, L, check_exactness=args.exact)
    report.phase("validate")
    report["ok"] = rep.ok
    report["uncovered"] = len(rep.uncovered)
    report["inexact"] = len(rep.inexact)
    report["structure"] = rep.structure
    report["sampled"] = rep.sampled
    print(f"valid: {rep.ok} (k={L.k}, uncovered={len(rep.uncovered)}, inexact={len(rep.inexact)}"
          f"{', sampled' if rep.sampled else ''})")
    for msg in rep.structure[:10]:
        print(f"  {msg}")
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def _engine(args, L: HubLabeling, modes) -> Engine:
    return Engine(None, L, modes, cap=args.cap, strategy=args.strategy, threads=args.threads)


def cmd_query(args, report: Report) -> int:
    L = load_labels(args.labels, report)
    mode = DistanceMode.parse(args.mode)
    eng = _engine(args, L, [mode])
    report.phase("build")
    out = []
    verts = _vertices(args, L.n)
    if len(verts) > 1:
        eng._all()
    for u in verts:
        if args.what == "ecc":
            e, w = eng.ecc(u, mode)
            out.append({"vertex": u, "ecc": e, "witness": w})
            print(f"{u} {show(e)} {w}")
        else:
            s = eng.dsum(u, mode)
            out.append({"vertex": u, "dsum": s})
            print(f"{u} {show(s)}")
    report.phase("query")
    report[args.what] = out
    return EXIT_OK


def cmd_stats(args, report: Report) -> int:
    L = load_labels(args.labels, report)
    mode = DistanceMode.parse(args.mode)
    eng = _engine(args, L, [mode])
    report.phase("build")
    if args.what == "diameter":
        value, u, w = eng.diameter(mode)
        report["diameter"] = {"value": value, "source": u, "witness": w}
    elif args.what == "radius":
        value, u = eng.radius(mode)
        report["radius"] = {"value": value, "center": u}
    elif args.what == "median":
        value, verts = eng.median(mode)
        report["median"] = {"value": value, "vertices": verts}
    else:
        value = eng.wiener(mode)
        report["wiener_ordered"] = value
    report.phase("query")
    print(show(value))
    return EXIT_OK


def _which(spec: str) -> list[str]:
    names = list(INDEX_NAMES) if spec == "all" else [x.strip() for x in spec.split(",") if x.strip()]
    bad = [x for x in names if x not in INDEX_NAMES]
    if bad:
        raise InputError(f"unknown index {bad[0]!r}; choose from {', '.join(INDEX_NAMES)} or all")
    return names


def _index_values(S: IndexSuite, names, budget) -> dict:
    out = {}
    for name in names:
        if name == "wiener":
            out["wiener"] = S.wiener()
            out["wiener_ordered"] = S.wiener(ordered=True)
        elif name == "hyperwiener":
            out["hyper_wiener"] = S.hyper_wiener()
        elif name == "mti":
            out["mti"] = S.mti()
            out["mti_unordered"] = S.mti(ordered=False)
        elif name == "harary":
            out["harary"] = S.harary()
            out["harary_ordered"] = S.harary(ordered=True)
        elif name == "rcw":
            out["rcw"] = S.rcw()
            out["rcw_ordered"] = S.rcw(ordered=True)
        elif name == "szeged":
            out["szeged"] = S.szeged(budget)
        else:
            out["padmakar_ivan"] = S.padmakar_ivan(budget)
    return out


def _oracle_index_values(g: Graph, names) -> dict:
    o = oracle_indices(g)
    keys = {
        "wiener": ("wiener", "wiener_ordered"),
        "hyperwiener": ("hyper_wiener",),
        "mti": ("mti", "mti_unordered"),
        "harary": ("harary", "harary_ordered"),
        "rcw": ("rcw", "rcw_ordered"),
        "szeged": ("szeged",),
        "pi": ("padmakar_ivan",),
    }
    out = {k: o[k] for name in names for k in keys[name]}
    out["randic"] = o["randic"]
    return out


def cmd_index(args, report: Report) -> int:
    g = load_graph(args.graph, report)
    names = _which(args.which)
    L = load_labels(args.labels, report) if args.labels else None
    S = IndexSuite(g, L, cap=args.cap, strategy=args.strategy, allow_weighted=args.allow_weighted,
                   alpha=max(args.alpha, 3 if "hyperwiener" in names else 1))
    report.phase("build")
    values = _index_values(S, names, args.budget)
    if args.alpha > 1:
        values[f"power_sum_{args.alpha}"] = S.power_sum(args.alpha)
    report.phase("query")
    for k, v in values.items():
        report[k] = v
    print(json.dumps(jsonable(values), sort_keys=True))
    return EXIT_OK


def cmd_twdnc(args, report: Report) -> int:
    g = load_graph(args.graph, report)
    if args.td == "auto":
        td = heuristic_td(g)
    else:
        text = read_text(args.td)
        report.digest("td", text)
        td = parse_td(text)
    modes = _modes(args.experimental_modes) if args.experimental_modes else [DistanceMode.ROUNDTRIP]
    res = dnc_roundtrip(g, td, modes, width_cap=args.width_cap)
    report.phase("dnc")
    for m in modes:
        ecc, dsum = res.vectors(m)
        report[f"ecc_{m.value}"] = ecc
        report[f"dsum_{m.value}"] = dsum
        for v in range(g.n):
            print(f"{m.value} {v} {show(ecc[v])} {show(dsum[v])}")
    report["nodes"] = res.nodes
    report["width"] = td.width
    return EXIT_OK


def cmd_diamk(args, report: Report) -> int:
    g = load_graph(args.graph, report)
    coloring = None
    if args.coloring != "auto":
        text = read_text(args.coloring)
        report.digest("coloring", text)
        coloring = parse_coloring(text, g.n)
    res = decide_diameter_le_k(g, args.k, coloring, label_cap=args.label_cap)
    report.phase("decide")
    report["answer"] = res.answer
    report["witness"] = list(res.witness) if res.witness else None
    report["witness_distance"] = res.witness_distance
    report["colors"] = res.colors
    report["unions"] = res.unions
    report["merged_k"] = res.merged_k
    if res.answer:
        print("true")
    else:
        print(f"false {res.witness[0]} {res.witness[1]} {show(res.witness_distance)}")
    if args.coloring_out and res.forest_height is not None:
        from .sparse import depth_coloring

        Path(args.coloring_out).write_text(format_coloring(depth_coloring(heuristic_forest(g))))
    return EXIT_OK


def cmd_oracle(args, report: Report) -> int:
    g = load_graph(args.graph, report)
    what = args.what
    if what in ("ecc", "dsum", "diameter", "radius", "median", "wiener", "twdnc"):
        mode = DistanceMode.ROUNDTRIP if what == "twdnc" else DistanceMode.parse(args.mode)
        ecc, dsum = ecc_dsum_from_matrix(oracle_all_pairs(g), mode)
        if what in ("ecc", "dsum", "twdnc"):
            vals = ecc if what == "ecc" else dsum
            verts = _vertices(args, g.n)
            for u in verts:
                if what == "twdnc":
                    print(f"{mode.value} {u} {show(ecc[u])} {show(dsum[u])}")
                else:
                    print(f"{u} {show(vals[u])}")
            report[what] = {u: (ecc[u], dsum[u]) if what == "twdnc" else vals[u] for u in verts}
        else:
            value = {"diameter": max(ecc), "radius": min(ecc), "median": min(dsum), "wiener": sum(dsum)}[what]
            report[what] = value
            print(show(value))
    elif what == "index":
        values = _oracle_index_values(g, _which(args.which))
        for k, v in values.items():
            report[k] = v
            print(f"{k} {show(v)}")
    else:  # diamk
        if args.k is None:
            raise InputError("--k is required")
        d = bfs_diameter(g)
        report["diameter"] = d
        report["answer"] = d <= args.k
        print("true" if d <= args.k else "false")
    report.phase("oracle")
    return EXIT_OK


def _verify_graph(g: Graph, args, report_rows: list, td=None) -> int:
    mismatches = 0
    if td is not None:
        rt = DistanceMode.ROUNDTRIP
        got = dnc_roundtrip(g, td, [rt]).vectors(rt)
        want = ecc_dsum_from_matrix(oracle_all_pairs(g), rt)
        bad = sum(1 for u in range(g.n) if got[0][u] != want[0][u] or got[1][u] != want[1][u])
        mismatches += bad
        report_rows.append({"n": g.n, "check": "twdnc", "mismatches": bad})
    L = build_pruned(g)
    eng = Engine(g, L, ALL_MODES, cap=args.cap, strategy=args.strategy, threads=args.threads)
    dist = oracle_all_pairs(g)
    for m in ALL_MODES:
        ecc, dsum = ecc_dsum_from_matrix(dist, m)
        got_e, got_s = eng.all_ecc(m), eng.all_dsum(m)
        bad = sum(1 for u in range(g.n) if got_e[u] != ecc[u] or got_s[u] != dsum[u])
        mismatches += bad
        report_rows.append({"n": g.n, "k": L.k, "mode": m.value, "mismatches": bad})
    if not g.directed and not g.weighted:
        names = _which(args.which) if args.which else ["wiener", "hyperwiener", "mti", "harary", "rcw"]
        S = IndexSuite(g, cap=max(args.cap, INDEX_K_CAP))
        got = _index_values(S, names, None)
        want = _oracle_index_values(g, names)
        bad = [k for k in got if got[k] != want[k]]
        mismatches += len(bad)
        report_rows.append({"n": g.n, "indices": names, "mismatches": bad})
        diam = bfs_diameter(g)
        for k in (2, 3):
            try:
                res = decide_diameter_le_k(g, k)
            except CapExceededError:
                report_rows.append({"n": g.n, "check": f"diamk{k}", "skipped": "cap"})
                continue
            ok = res.answer == (diam <= k)
            mismatches += 0 if ok else 1
            report_rows.append({"n": g.n, "check": f"diamk{k}", "mismatches": 0 if ok else 1})
    return mismatches


def cmd_verify(args, report: Report) -> int:
    rows: list = []
    total = 0
    if args.graph:
        total += _verify_graph(load_graph(args.graph, report), args, rows)
    else:
        for i in range(args.seeds):
            seed = args.seed + i
            if args.family == "strong":
                g = gen_random_strong(args.n, 2 * (args.n - 1) + args.n // 10, args.wmax, seed)
            elif args.family == "sparse":
                g = gen_sparse(args.n, max(1, args.n // 25), seed)
            else:
                g, td = gen_partial_ktree(args.n, 2, 0.6, seed, directed=True, wmax=args.wmax)
                total += _verify_graph(g, args, rows, td)
                continue
            total += _verify_graph(g, args, rows)
    report.phase("verify")
    report["checks"] = rows
    report["mismatches"] = total
    print(f"mismatches: {total}")
    return EXIT_OK if total == 0 else EXIT_MISMATCH


def _best_mean(fn, items, repeats: int = 3) -> float:
    """Best of ``repeats`` passes of the mean time of fn over items."""
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for x in items:
            fn(x)
        best = min(best, (time.perf_counter() - t0) / len(items))
    return best


def bench_row(g: Graph, L: HubLabeling, queries: int, seed: int, cap: int, strategy: str) -> dict:
    """Mean single-source ecc time through the engine and through Dijkstra."""
    t0 = time.perf_counter()
    if g.directed:
        eng = Engine(g, L, [DistanceMode.SOURCE], cap=cap, strategy=strategy)
        run = lambda u: eng._evaluate(u)  # noqa: E731 - bypass the per-source cache
    else:
        eng = SimpleEngine(L, cap=cap, strategy="pruned" if strategy == "exhaustive" else strategy)
        run = eng.query
    build = time.perf_counter() - t0
    rng = make_rng(seed)
    sample = sorted({int(x) for x in rng.integers(0, g.n, size=queries)})
    for u in sample:  # warm the lazily built levels
        run(u)
    q = _best_mean(run, sample)
    d = _best_mean(lambda u: max(dijkstra(g, u)), sample[: max(1, min(len(sample), 8))])
    return {"n": g.n, "k": L.k, "build_s": round(build, 6), "query_mean_s": round(q, 6),
            "dijkstra_mean_s": round(d, 6), "speedup": round(d / q, 2) if q else math.inf}


def cmd_bench(args, report: Report) -> int:
    sizes = [int(x) for x in args.sizes.split(",")]
    rows = []
    for n in sizes:
        if args.family == "tree":
            g = reweight(gen_balanced_tree(n, args.branching), args.wmax, args.seed)
            L = build_elimination(g, tree_forest(n, args.branching))
        elif args.family == "sparse":
            g = reweight(gen_sparse(n, max(1, n // 50), args.seed), args.wmax, args.seed)
            L = tighten(g, build_elimination(g, heuristic_forest(g)))
        else:
            g = gen_random_strong(n, 2 * (n - 1) + n // 10, args.wmax, args.seed)
            L = build_pruned(g)
        row = {"family": args.family, **bench_row(g, L, args.queries, args.seed, max(args.cap, L.k), args.strategy)}
        rows.append(row)
        logger.info("bench %s", row)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    write_text(args.out, buf.getvalue())
    report["rows"] = rows
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (Philox)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for per-source work")
    common.add_argument("--json", default=argparse.SUPPRESS, metavar="OUT", help="write a JSON run report")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="hublab", description="Eccentricities, distance sums and indices from hub labels.",
                parents=[common])
    p.set_defaults(seed=0, threads=1, json=None, verbose=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    def engine_opts(sp):
        sp.add_argument("--cap", type=int, default=DEFAULT_K_CAP, help="maximum label size accepted")
        sp.add_argument("--strategy", choices=STRATEGIES, default="grouped")

    g = add("gen", cmd_gen, "generate a graph")
    g.add_argument("--family", required=True,
                   choices=["path", "cycle", "star", "complete", "grid", "tree", "random-tree", "sparse",
                            "strong", "split", "ktree"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, help="arc count (strong)")
    g.add_argument("--wmax", type=int, default=1)
    g.add_argument("--k", type=int, default=2, help="width (ktree) or clique size (split)")
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--extra", type=int, default=0, help="extra edges (sparse)")
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--cols", type=int)
    g.add_argument("--directed", action="store_true", help="ktree: two arcs per edge")
    g.add_argument("--out", default="-")
    g.add_argument("--td-out", help="ktree: write the construction decomposition")
    g.add_argument("--clique-out", help="split: write the clique vertices")

    lb = add("label", cmd_label, "build, validate or tighten hub labels")
    lb.add_argument("action", choices=["build", "validate", "tighten"])
    lb.add_argument("--graph", default="-")
    lb.add_argument("--method", choices=["pruned", "split", "elimination", "external"], default="pruned")
    lb.add_argument("--clique", help="file with the clique vertices (split)")
    lb.add_argument("--forest", default="auto", help="forest file or auto (elimination)")
    lb.add_argument("--labels", help="labeling file")
    lb.add_argument("--exact", action="store_true", help="validate: also demand exact stored entries")
    lb.add_argument("--out", default="-")

    q = add("query", cmd_query, "eccentricity or distance-sum queries")
    q.add_argument("what", choices=["ecc", "dsum"])
    q.add_argument("--mode", default="source")
    q.add_argument("--vertex", type=int)
    q.add_argument("--all", action="store_true")
    q.add_argument("--labels", default="-")
    engine_opts(q)

    st = add("stats", cmd_stats, "diameter, radius, median or Wiener sum")
    st.add_argument("what", choices=["diameter", "radius", "median", "wiener"])
    st.add_argument("--mode", default="source")
    st.add_argument("--labels", default="-")
    engine_opts(st)

    ix = add("index", cmd_index, "topological indices")
    ix.add_argument("--which", default="all")
    ix.add_argument("--graph", default="-")
    ix.add_argument("--labels", help="exact labels to use instead of building them")
    ix.add_argument("--alpha", type=int, default=1, help="also report the power sum of this order")
    ix.add_argument("--allow-weighted", action="store_true")
    ix.add_argument("--budget", type=float, help="time budget in seconds for Szeged and PI")
    ix.add_argument("--cap", type=int, default=INDEX_K_CAP)
    ix.add_argument("--strategy", choices=["grouped", "pruned"], default="grouped")

    tw = add("twdnc", cmd_twdnc, "roundtrip eccentricities via tree decompositions")
    tw.add_argument("--graph", default="-")
    tw.add_argument("--td", default="auto")
    tw.add_argument("--width-cap", type=int, default=8)
    tw.add_argument("--experimental-modes", help="comma-separated modes besides roundtrip (no guarantees)")

    dk = add("diamk", cmd_diamk, "decide diameter <= k on sparse graphs")
    dk.add_argument("--k", type=int, required=True)
    dk.add_argument("--coloring", default="auto")
    dk.add_argument("--graph", default="-")
    dk.add_argument("--label-cap", type=int, default=LABEL_CAP)
    dk.add_argument("--coloring-out", help="write the automatic coloring")

    orc = add("oracle", cmd_oracle, "brute-force answers")
    orc.add_argument("what", choices=["ecc", "dsum", "diameter", "radius", "median", "wiener", "index",
                                      "diamk", "twdnc"])
    orc.add_argument("--graph", default="-")
    orc.add_argument("--mode", default="source")
    orc.add_argument("--vertex", type=int)
    orc.add_argument("--all", action="store_true")
    orc.add_argument("--which", default="all")
    orc.add_argument("--k", type=int)

    vf = add("verify", cmd_verify, "engine versus oracle on given or generated graphs")
    vf.add_argument("--graph")
    vf.add_argument("--family", choices=["strong", "sparse", "ktree"], default="strong")
    vf.add_argument("--n", type=int, default=60)
    vf.add_argument("--seeds", type=int, default=3)
    vf.add_argument("--wmax", type=int, default=10)
    vf.add_argument("--which", help="indices to check on undirected unweighted graphs")
    engine_opts(vf)
    vf.set_defaults(cap=INDEX_K_CAP)

    bn = add("bench", cmd_bench, "query time versus Dijkstra, CSV output")
    bn.add_argument("--family", choices=["tree", "sparse", "strong"], default="tree")
    bn.add_argument("--sizes", default="10000,100000")
    bn.add_argument("--branching", type=int, default=8)
    bn.add_argument("--queries", type=int, default=60)
    bn.add_argument("--wmax", type=int, default=10)
    bn.add_argument("--out", default="-")
    engine_opts(bn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    report = Report(args.command, args)
    try:
        code = args.func(args, report)
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        code = EXIT_CAP
    except Mismatch as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        code = EXIT_MISMATCH
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        code = EXIT_CAP
    except (InputError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    report.data["exit_code"] = code
    if args.json:
        Path(args.json).write_text(json.dumps(report.data, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
