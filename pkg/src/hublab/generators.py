"""Deterministic instance generators.

All randomness goes through :func:`make_rng`, a Philox4x64 counter-based
generator keyed by a single 64-bit seed.
"""

from __future__ import annotations

import numpy as np

from .forest import EliminationForest
from .graph import Graph, GraphError
from .treedec import TreeDecomposition


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 64) - 1)))


def _check_size(**sizes: int) -> None:
    for name, value in sizes.items():
        if value < 1:
            raise GraphError(f"{name} must be >= 1, got {value}")


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"probability must lie in [0, 1], got {p}")


def gen_path(n: int) -> Graph:
    _check_size(n=n)
    return Graph(n, [(i, i + 1) for i in range(n - 1)], directed=False, weighted=False)


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], directed=False, weighted=False)


def gen_star(n: int) -> Graph:
    """Star on n vertices centred at 0."""
    _check_size(n=n)
    return Graph(n, [(0, i) for i in range(1, n)], directed=False, weighted=False)


def gen_complete(n: int) -> Graph:
    _check_size(n=n)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], directed=False, weighted=False)


def gen_grid(n: int, cols: int | None = None) -> Graph:
    """``n x cols`` grid (square when ``cols`` is omitted)."""
    _check_size(n=n)
    cols = n if cols is None else cols
    edges = []
    for r in range(n):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < n:
                edges.append((v, v + cols))
    return Graph(n * cols, edges, directed=False, weighted=False)


def gen_balanced_tree(n: int, branching: int = 2) -> Graph:
    """BFS-numbered complete ``branching``-ary tree truncated to n vertices."""
    _check_size(n=n, branching=branching)
    return Graph(n, [((i - 1) // branching, i) for i in range(1, n)], directed=False, weighted=False)


def reweight(g: Graph, wmax: int, seed: int) -> Graph:
    """Copy of an undirected graph with uniform weights in [1, wmax]."""
    _check_size(wmax=wmax)
    if g.directed:
        raise GraphError("reweight expects an undirected graph")
    rng = make_rng(seed)
    edges = [(u, v, int(rng.integers(1, wmax + 1))) for u, v, _ in g.edges]
    return Graph(g.n, edges, directed=False, weighted=True)


def tree_forest(n: int, branching: int) -> EliminationForest:
    """The rooted tree of gen_balanced_tree as its own elimination forest."""
    return EliminationForest([(v - 1) // branching if v else -1 for v in range(n)])


def gen_random_tree(n: int, seed: int) -> Graph:
    _check_size(n=n)
    rng = make_rng(seed)
    return Graph(n, [(int(rng.integers(0, i)), i) for i in range(1, n)], directed=False, weighted=False)


def gen_sparse(n: int, extra: int, seed: int) -> Graph:
    """Connected sparse graph: random tree plus ``extra`` random edges."""
    _check_size(n=n)
    rng = make_rng(seed)
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    possible = n * (n - 1) // 2
    if extra < 0 or len(edges) + extra > possible:
        raise GraphError("too many extra edges for n")
    while extra:
        u, v = sorted(int(x) for x in rng.integers(0, n, size=2))
        if u != v and (u, v) not in edges:
            edges.add((u, v))
            extra -= 1
    return Graph(n, sorted(edges), directed=False, weighted=False)


def gen_random_strong(n: int, m: int, wmax: int, seed: int) -> Graph:
    """Strongly connected weighted digraph with exactly m arcs.

    Backbone: a preferential-attachment tree whose edges become two arcs with
    independent weights; the remaining ``m - 2(n-1)`` arcs are uniform.
    """
    _check_size(n=n, wmax=wmax)
    if m < 2 * (n - 1) or m > n * (n - 1):
        raise GraphError(f"need 2(n-1) <= m <= n(n-1) for a strong digraph, got m={m}")
    rng = make_rng(seed)
    arcs: dict[tuple[int, int], int] = {}
    ends: list[int] = [0]
    for v in range(1, n):
        parent = ends[int(rng.integers(0, len(ends)))]
        arcs[(parent, v)] = int(rng.integers(1, wmax + 1))
        arcs[(v, parent)] = int(rng.integers(1, wmax + 1))
        ends.extend((parent, v))
    while len(arcs) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v and (u, v) not in arcs:
            arcs[(u, v)] = int(rng.integers(1, wmax + 1))
    return Graph(n, [(u, v, w) for (u, v), w in arcs.items()], directed=True, weighted=True)


def gen_split(k_size: int, s_size: int, p: float, seed: int) -> tuple[Graph, list[int]]:
    """Split graph on clique ``0..k_size-1`` plus a stable set.

    Every stable vertex gets each clique neighbour with probability p and at
    least one clique neighbour.
    """
    _check_size(k_size=k_size)
    _check_prob(p)
    if s_size < 0:
        raise GraphError("s_size must be >= 0")
    rng = make_rng(seed)
    edges = [(a, b) for a in range(k_size) for b in range(a + 1, k_size)]
    for s in range(k_size, k_size + s_size):
        nbrs = [c for c in range(k_size) if rng.random() < p]
        if not nbrs:
            nbrs = [int(rng.integers(0, k_size))]
        edges.extend((c, s) for c in nbrs)
    return Graph(k_size + s_size, edges, directed=False, weighted=False), list(range(k_size))


def gen_partial_ktree(
    n: int,
    k: int,
    p: float,
    seed: int,
    directed: bool = False,
    wmax: int = 1,
) -> tuple[Graph, TreeDecomposition]:
    """Random partial k-tree with the width-k decomposition that built it.

    Each k-tree edge survives with probability p; the first edge attaching
    every new vertex (and a path through the seed clique) always survives, so
    the result is connected.  With ``directed`` every edge becomes two arcs
    with independent weights in ``[1, wmax]``.
    """
    _check_size(n=n, k=k)
    _check_prob(p)
    if n < k + 1:
        raise GraphError(f"partial {k}-tree needs n >= {k + 1}")
    rng = make_rng(seed)
    perm = [int(x) for x in rng.permutation(n)]
    seed_clique = list(range(k + 1))
    edges: set[tuple[int, int]] = set()
    for a in range(k + 1):
        for b in range(a + 1, k + 1):
            if b == a + 1 or rng.random() < p:
                edges.add((a, b))
    bags: list[list[int]] = [seed_clique]
    tree_edges: list[tuple[int, int]] = []
    # each k-clique is remembered with a bag that contains it
    cliques: list[tuple[tuple[int, ...], int]] = []
    for drop in range(k + 1):
        cliques.append((tuple(x for x in seed_clique if x != drop), 0))
    for v in range(k + 1, n):
        clique, bag_id = cliques[int(rng.integers(0, len(cliques)))]
        first = int(rng.integers(0, k))
        for idx, c in enumerate(clique):
            if idx == first or rng.random() < p:
                edges.add((min(c, v), max(c, v)))
        bags.append(sorted(clique + (v,)))
        new_bag = len(bags) - 1
        tree_edges.append((bag_id, new_bag))
        for drop in clique:
            cliques.append((tuple(sorted(x for x in clique if x != drop)) + (v,), new_bag))
    relabel = [perm[x] for x in range(n)]
    edge_list = sorted((min(relabel[a], relabel[b]), max(relabel[a], relabel[b])) for a, b in edges)
    td = TreeDecomposition([sorted(relabel[x] for x in bag) for bag in bags], tree_edges, n)
    if directed:
        arcs = []
        for a, b in edge_list:
            arcs.append((a, b, int(rng.integers(1, wmax + 1))))
            arcs.append((b, a, int(rng.integers(1, wmax + 1))))
        return Graph(n, arcs, directed=True, weighted=True), td
    if wmax > 1:
        return Graph(n, [(a, b, int(rng.integers(1, wmax + 1))) for a, b in edge_list], directed=False, weighted=True), td
    return Graph(n, edge_list, directed=False, weighted=False), td


FAMILIES = {
    "path": gen_path,
    "cycle": gen_cycle,
    "star": gen_star,
    "complete": gen_complete,
    "grid": gen_grid,
}
