"""Divide and conquer over balanced bag separators of a tree decomposition.

Every node picks a bag C that splits its vertex set into A, B, C.  Pairs
across A x B go through C, so uniform C-labels and the bi-chromatic engine
answer them; pairs touching C come straight from the 2|C| searches.  The
children work on the supergraph with C turned into a weighted clique of
true distances, restricted to A + C and B + C.

Each pair is counted at the topmost node that separates it: a node skips
every pair touching a separator vertex of one of its ancestors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .engine import BiEngine
from .graph import INF, DistanceMode, Graph, GraphError, dijkstra, mode_value, require_strongly_connected
from .treedec import TreeDecomposition, balanced_separator, separator_balanced, validate_td

DEFAULT_WIDTH_CAP = 8
BASE_SIZE = 32


class DncError(GraphError):
    """Internal-consistency failure of the divide and conquer."""


@dataclass
class DncResult:
    ecc: dict
    dsum: dict
    nodes: int = 0
    max_depth: int = 0
    pair_counts: list | None = field(default=None, repr=False)
    splits: list = field(default_factory=list, repr=False)  # (max(|A|, |B|), node size) per split

    def vectors(self, mode: DistanceMode = DistanceMode.ROUNDTRIP) -> tuple[list, list]:
        return self.ecc[mode], self.dsum[mode]


def compress_td(td: TreeDecomposition) -> TreeDecomposition:
    """Contract tree edges into bags that became empty."""
    nb = len(td.bags)
    if nb == 0:
        return td
    rep = list(range(nb))

    def find(x: int) -> int:
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    for a, b in td.tree_edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if not td.bags[ra]:
            rep[ra] = rb
        elif not td.bags[rb]:
            rep[rb] = ra
    keep = sorted({find(t) for t in range(nb)})
    if len(keep) > 1:
        keep = [t for t in keep if td.bags[t]] or keep[:1]
    index = {t: i for i, t in enumerate(keep)}
    edges = set()
    for a, b in td.tree_edges:
        ra, rb = find(a), find(b)
        if ra != rb and ra in index and rb in index:
            edges.add((min(index[ra], index[rb]), max(index[ra], index[rb])))
    return TreeDecomposition([list(td.bags[t]) for t in keep], sorted(edges), td.n)


class _Node:
    __slots__ = ("verts", "g", "td", "done", "depth")

    def __init__(self, verts: list[int], g: Graph, td: TreeDecomposition, done: frozenset, depth: int):
        self.verts = verts  # local id -> global id
        self.g = g
        self.td = td
        self.done = done  # local ids whose pairs were all counted above
        self.depth = depth


def dnc_roundtrip(
    g: Graph,
    td: TreeDecomposition,
    modes: Sequence[DistanceMode] = (DistanceMode.ROUNDTRIP,),
    width_cap: int = DEFAULT_WIDTH_CAP,
    base_size: int | None = None,
    audit: bool = False,
    check_supergraph: bool = False,
) -> DncResult:
    """Eccentricities and distance sums for every vertex.

    ``audit`` records how often each unordered pair is counted (must be once);
    ``check_supergraph`` compares every node's distances with the original
    graph (small inputs only).
    """
    modes = tuple(DistanceMode.parse(m) for m in modes)
    require_strongly_connected(g)
    report = validate_td(g, td)
    if not report.ok:
        raise GraphError("invalid tree decomposition: " + "; ".join(report.violations[:5]))
    if td.n != g.n:
        raise GraphError(f"decomposition covers {td.n} vertices, graph has {g.n}")
    if td.width > width_cap:
        raise GraphError(f"width {td.width} exceeds the cap {width_cap}")
    n = g.n
    floor = base_size if base_size is not None else max(3 * (td.width + 1), BASE_SIZE)
    max_depth = 2 + math.log(max(n, 2), 1.5)
    ecc = {m: [0] * n for m in modes}
    dsum = {m: [0] * n for m in modes}
    counts = [[0] * n for _ in range(n)] if audit else None
    truth = [dijkstra(g, s) for s in range(n)] if check_supergraph else None
    result = DncResult(ecc, dsum, pair_counts=counts)

    def credit(a: int, b: int, dab, dba) -> None:
        """Pair {a, b} (global ids) with dist(a, b) = dab, dist(b, a) = dba."""
        for m in modes:
            va, vb = mode_value(dab, dba, m), mode_value(dba, dab, m)
            if va > ecc[m][a]:
                ecc[m][a] = va
            if vb > ecc[m][b]:
                ecc[m][b] = vb
            dsum[m][a] += va
            dsum[m][b] += vb
        if counts is not None:
            counts[a][b] += 1
            counts[b][a] += 1

    stack = [_Node(list(range(n)), g, compress_td(td), frozenset(), 0)]
    while stack:
        node = stack.pop()
        result.nodes += 1
        result.max_depth = max(result.max_depth, node.depth)
        if node.depth > max_depth:
            raise DncError(f"recursion depth {node.depth} exceeds {max_depth:.1f}")
        H, V, done = node.g, node.verts, node.done
        if truth is not None:
            for s in range(H.n):
                d = dijkstra(H, s)
                if any(d[t] != truth[V[s]][V[t]] for t in range(H.n)):
                    raise DncError("supergraph distances differ from the input graph")
        if H.n <= floor:
            dist = [dijkstra(H, s) for s in range(H.n)]
            live = [v for v in range(H.n) if v not in done]
            for i, a in enumerate(live):
                for b in live[i + 1:]:
                    credit(V[a], V[b], dist[a][b], dist[b][a])
            continue
        adj = H.underlying_adjacency()
        split = balanced_separator(H, node.td, adj=adj)
        _check_split(H, split, adj)
        result.splits.append((max(len(split.A), len(split.B)), H.n))
        C, A, B = split.C, split.A, split.B
        to_c = [dijkstra(H, c, "in") for c in C]
        from_c = [dijkstra(H, c, "out") for c in C]
        # pairs touching C
        live_c = [i for i, c in enumerate(C) if c not in done]
        cset = set(C)
        for i in live_c:
            c = C[i]
            for v in range(H.n):
                if v == c or v in done:
                    continue
                if v in cset and C.index(v) < i and v not in done:
                    continue  # pair inside C already credited from the other end
                credit(V[c], V[v], from_c[i][v], to_c[i][v])
        # pairs across A x B
        A_live = [a for a in A if a not in done]
        B_live = [b for b in B if b not in done]
        if A_live and B_live:
            to_h = {v: [col[v] for col in to_c] for v in A + B}
            from_h = {v: [col[v] for col in from_c] for v in A + B}
            fwd = BiEngine(C, A_live, B_live, to_h, from_h, modes)
            bwd = BiEngine(C, B_live, A_live, to_h, from_h, modes)
            for eng, sources in ((fwd, A_live), (bwd, B_live)):
                for a in sources:
                    got = eng.query(a)
                    for m in modes:
                        e, _, s = got[m]
                        if e > ecc[m][V[a]]:
                            ecc[m][V[a]] = e
                        dsum[m][V[a]] += s
            if counts is not None:
                for a in A_live:
                    for b in B_live:
                        counts[V[a]][V[b]] += 1
                        counts[V[b]][V[a]] += 1
        # children on the supergraph with C as a clique of true distances
        extra = [(C[i], C[j], from_c[i][C[j]]) for i in range(len(C)) for j in range(len(C)) if i != j]
        new_done = done | cset
        for side in (A, B):
            if not side:
                continue
            keep = sorted(set(side) | cset)
            if all(v in new_done for v in keep):
                continue
            arcs = [(u, v, w) for u in range(H.n) for v, w in H.out_arcs[u]] + extra
            sup = Graph(H.n, arcs, directed=True, weighted=True)
            sub, old = sup.induced(keep)
            local = {v: i for i, v in enumerate(old)}
            sub_td = compress_td(node.td.restrict(set(keep)))
            sub_td = TreeDecomposition(
                [[local[v] for v in bag] for bag in sub_td.bags], sub_td.tree_edges, len(old)
            )
            sub_done = frozenset(local[v] for v in keep if v in new_done)
            stack.append(_Node([V[v] for v in old], sub, sub_td, sub_done, node.depth + 1))
    if counts is not None:
        for a in range(n):
            for b in range(n):
                if a != b and counts[a][b] != 1:
                    raise DncError(f"pair ({a},{b}) counted {counts[a][b]} times")
    for m in modes:
        if any(e is INF for e in ecc[m]):
            raise DncError("unreachable pair in a strongly connected graph")
    return result


def _check_split(H: Graph, split, adj) -> None:
    if not separator_balanced(split, H.n):
        raise DncError(f"unbalanced separator: |A|={len(split.A)}, |B|={len(split.B)}, n={H.n}")
    bset = set(split.B)
    for a in split.A:
        if adj[a] & bset:
            raise DncError("separator does not separate A from B")
