"""Tree-depth tools and the diameter-at-most-k decider for sparse graphs."""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .engine import CapExceededError, SimpleEngine
from .forest import EliminationForest, require_valid_forest
from .generators import make_rng
from .graph import INF, Graph, GraphError
from .labeling import HubLabeling, build_elimination, concat, lift, tighten
from .treedec import heuristic_td

logger = logging.getLogger(__name__)

EXACT_LIMIT = 25
DEFAULT_BUDGET = 200_000
COLOR_CAP = 12
K_CAP = 4
LABEL_CAP = 1000


class ColoringError(GraphError):
    pass


class TreeDepthResult(NamedTuple):
    depth: int
    forest: EliminationForest
    exact: bool


@dataclass
class LowTDColoring:
    colors: list[int]

    @property
    def c(self) -> int:
        return len(set(self.colors))

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, col in enumerate(self.colors):
            out.setdefault(col, []).append(v)
        return dict(sorted(out.items()))


# -- components ----------------------------------------------------------------


def _components(adj: Sequence[set[int]], verts: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(verts):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in verts and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def _mask_components(mask: int, adjm: Sequence[int]) -> list[int]:
    comps = []
    while mask:
        low = mask & -mask
        comp = low
        frontier = low
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            new = adjm[b.bit_length() - 1] & mask & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        mask &= ~comp
    return comps


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


# -- exact tree-depth ------------------------------------------------------------


class _BudgetExceeded(Exception):
    pass


def _exact_component(verts: list[int], adj, budget: int) -> tuple[int, dict[int, int]]:
    """Exact tree-depth of one connected vertex set; returns (depth, parent map)."""
    local = {v: i for i, v in enumerate(verts)}
    adjm = [0] * len(verts)
    for v in verts:
        for y in adj[v]:
            if y in local:
                adjm[local[v]] |= 1 << local[y]
    memo: dict[int, tuple[int, int]] = {}

    def td(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        size = bin(mask).count("1")
        if size == 1:
            memo[mask] = (1, mask.bit_length() - 1)
            return 1
        if len(memo) >= budget:
            raise _BudgetExceeded
        best, root = size + 1, -1
        order = sorted(_bits(mask), key=lambda x: -bin(adjm[x] & mask).count("1"))
        for v in order:
            worst = 0
            comps = sorted(_mask_components(mask & ~(1 << v), adjm), key=lambda c: -bin(c).count("1"))
            for comp in comps:
                worst = max(worst, td(comp))
                if 1 + worst >= best:
                    break
            if 1 + worst < best:
                best, root = 1 + worst, v
                if best == 2:
                    break
        memo[mask] = (best, root)
        return best

    full = (1 << len(verts)) - 1
    depth = td(full)
    parent: dict[int, int] = {}
    stack = [(full, -1)]
    while stack:
        mask, par = stack.pop()
        td(mask)
        r = memo[mask][1]
        parent[verts[r]] = par
        for comp in _mask_components(mask & ~(1 << r), adjm):
            stack.append((comp, verts[r]))
    return depth, parent


def treedepth_exact(g: Graph, limit: int = EXACT_LIMIT, budget: int = DEFAULT_BUDGET) -> TreeDepthResult:
    """Exact tree-depth with a witnessing forest.

    Components larger than ``limit`` (or whose search exceeds ``budget``
    memo states) fall back to :func:`heuristic_forest`; the result is then
    flagged as an upper bound only.
    """
    adj = g.underlying_adjacency()
    parent = [-1] * g.n
    exact = True
    for comp in _components(adj, set(range(g.n))):
        sub = None
        if len(comp) <= limit:
            try:
                _, sub = _exact_component(comp, adj, budget)
            except _BudgetExceeded:
                logger.warning("tree-depth budget exhausted on a component of size %d", len(comp))
        if sub is None:
            exact = False
            sub = _heuristic_component(comp, adj)
        for v, p in sub.items():
            parent[v] = p
    forest = EliminationForest(parent)
    require_valid_forest(g, forest)
    return TreeDepthResult(forest.height, forest, exact)


# -- heuristic forest ------------------------------------------------------------


def _largest_after_removal(v: int, verts: set[int], adj) -> int:
    rest = verts - {v}
    return max((len(c) for c in _components(adj, rest)), default=0)


def _pick_root(verts: set[int], adj) -> int:
    if len(verts) <= 2:
        return min(verts)
    by_degree = sorted(verts, key=lambda x: (-len(adj[x] & verts), x))
    if len(verts) > 2000:
        return by_degree[0]
    if len(verts) <= 400:
        cands = by_degree
    else:
        step = max(1, len(verts) // 40)
        cands = list(dict.fromkeys(by_degree[:40] + sorted(verts)[::step]))
    return min(cands, key=lambda x: (_largest_after_removal(x, verts, adj), -len(adj[x] & verts), x))


def _bag_separator(verts: set[int], adj) -> tuple[list[int], int]:
    """Best bag of a min-degree decomposition of the component as a separator."""
    order = sorted(verts)
    local = {v: i for i, v in enumerate(order)}
    sub = Graph(len(order), [(local[v], local[y]) for v in order for y in adj[v] if y in local and v < y],
                directed=False, weighted=False)
    td = heuristic_td(sub)
    best = None
    for bag in td.bags:
        sep = {order[b] for b in bag}
        if len(sep) >= len(verts):
            continue
        largest = max((len(c) for c in _components(adj, verts - sep)), default=0)
        key = (len(sep) + math.log2(largest + 1), len(sep))
        if best is None or key < best[0]:
            best = (key, sorted(sep, key=lambda x: (-len(adj[x] & verts), x)), largest)
    return (best[1], best[2]) if best else ([], len(verts))


def _heuristic_component(comp: list[int], adj) -> dict[int, int]:
    parent: dict[int, int] = {}
    stack = [(set(comp), -1)]
    while stack:
        verts, par = stack.pop()
        r = _pick_root(verts, adj)
        chain = [r]
        single = _largest_after_removal(r, verts, adj)
        if single > 2 * len(verts) // 3 and len(verts) > 8:
            sep, largest = _bag_separator(verts, adj)
            if sep and len(sep) + math.log2(largest + 1) < 1 + math.log2(single + 1):
                chain = sep
        for v in chain:
            parent[v] = par
            par = v
        rest = verts - set(chain)
        for sub in _components(adj, rest):
            stack.append((set(sub), par))
    return parent


def heuristic_forest(g: Graph) -> EliminationForest:
    """Recursive separator forest: remove the vertex that best splits its
    component (highest degree breaks ties), recurse on the pieces."""
    adj = g.underlying_adjacency()
    parent = [-1] * g.n
    for comp in _components(adj, set(range(g.n))):
        for v, p in _heuristic_component(comp, adj).items():
            parent[v] = p
    forest = EliminationForest(parent)
    require_valid_forest(g, forest)
    return forest


def restrict_forest(forest: EliminationForest, keep: Sequence[int]) -> tuple[EliminationForest, list[int]]:
    """Forest on ``sorted(keep)`` (relabelled) where each vertex hangs below
    its nearest kept ancestor."""
    old = sorted(set(keep))
    new_id = {v: i for i, v in enumerate(old)}
    parent = []
    for v in old:
        p = forest.parent[v]
        while p != -1 and p not in new_id:
            p = forest.parent[p]
        parent.append(-1 if p == -1 else new_id[p])
    return EliminationForest(parent), old


# -- colorings ------------------------------------------------------------------


def depth_coloring(forest: EliminationForest) -> LowTDColoring:
    """Color every vertex by its depth (0-based) in the forest."""
    return LowTDColoring([d - 1 for d in forest.depths()])


@dataclass
class ColoringReport:
    k: int
    checked: int = 0
    violations: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    unverified: list[tuple[int, ...]] = field(default_factory=list)
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def _union_treedepth(g: Graph, adj, verts: set[int], limit: int, budget: int) -> tuple[int, bool]:
    """Tree-depth of the subgraph induced by verts; exact flag."""
    worst, exact = 0, True
    for comp in _components(adj, verts):
        if len(comp) <= limit:
            try:
                depth, _ = _exact_component(comp, adj, budget)
                worst = max(worst, depth)
                continue
            except _BudgetExceeded:
                pass
        exact = False
        parent = _heuristic_component(comp, adj)
        worst = max(worst, EliminationForest(_dense_parent(parent, comp)).height)
    return worst, exact


def _dense_parent(parent: dict[int, int], comp: list[int]) -> list[int]:
    idx = {v: i for i, v in enumerate(comp)}
    return [-1 if parent[v] == -1 else idx[parent[v]] for v in comp]


def validate_low_td_coloring(
    g: Graph,
    coloring: LowTDColoring,
    k: int,
    limit: int = EXACT_LIMIT,
    budget: int = DEFAULT_BUDGET,
    max_subsets: int = 4000,
    seed: int = 0,
) -> ColoringReport:
    """Check that every union of i <= k color classes has tree-depth <= i.

    Components too large for the exact search are accepted only when the
    heuristic forest already proves the bound; otherwise the subset is
    listed as unverified.  More than ``max_subsets`` subsets are sampled.
    """
    if len(coloring.colors) != g.n:
        raise ColoringError(f"coloring has {len(coloring.colors)} entries, graph has {g.n}")
    classes = coloring.classes()
    names = list(classes)
    report = ColoringReport(k)
    subsets = [s for i in range(1, min(k, len(names)) + 1) for s in itertools.combinations(names, i)]
    if len(subsets) > max_subsets:
        rng = make_rng(seed)
        pick = rng.choice(len(subsets), size=max_subsets, replace=False)
        subsets = [subsets[int(i)] for i in sorted(pick)]
        report.sampled = True
    adj = g.underlying_adjacency()
    for sub in subsets:
        verts = {v for col in sub for v in classes[col]}
        depth, exact = _union_treedepth(g, adj, verts, limit, budget)
        report.checked += 1
        if depth <= len(sub):
            continue
        if exact:
            report.violations.append((sub, depth))
        else:
            report.unverified.append(sub)
    return report


def parse_coloring(text: str, n: int | None = None) -> LowTDColoring:
    found: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "color":
            raise ColoringError(f"line {lineno}: expected 'color <v> <c>'")
        try:
            v, col = int(parts[1]), int(parts[2])
        except ValueError:
            raise ColoringError(f"line {lineno}: non-integer token") from None
        if v < 0 or (n is not None and v >= n):
            raise ColoringError(f"line {lineno}: vertex {v} out of range")
        if v in found:
            raise ColoringError(f"line {lineno}: vertex {v} colored twice")
        found[v] = col
    size = n if n is not None else (max(found) + 1 if found else 0)
    missing = [v for v in range(size) if v not in found]
    if missing:
        raise ColoringError(f"vertex {missing[0]} has no color")
    return LowTDColoring([found[v] for v in range(size)])


def format_coloring(coloring: LowTDColoring) -> str:
    return "".join(f"color {v} {c}\n" for v, c in enumerate(coloring.colors))


# -- diameter decider -------------------------------------------------------------


@dataclass
class DiameterDecision:
    answer: bool
    witness: tuple[int, int] | None
    witness_distance: int | float | None
    colors: int
    unions: int
    merged_k: int
    forest_height: int | None = None

    def __bool__(self) -> bool:
        return self.answer


def _bfs(g: Graph, s: int) -> list:
    dist = [INF] * g.n
    dist[s] = 0
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y, _ in g.out_arcs[x]:
            if dist[y] is INF:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def bfs_diameter(g: Graph) -> int | float:
    return max((max(_bfs(g, s)) for s in range(g.n)), default=0)


def _truncate(L: HubLabeling, k: int) -> HubLabeling:
    out_lab = [{h: d for h, d in zip(hs, ds) if d <= k} for hs, ds in zip(L.out_hubs, L.out_dist)]
    in_lab = [{h: d for h, d in zip(hs, ds) if d <= k} for hs, ds in zip(L.in_hubs, L.in_dist)]
    return HubLabeling(out_lab, in_lab, L.flavor)


def union_labels(
    g: Graph,
    k: int,
    coloring: LowTDColoring,
    forest: EliminationForest | None = None,
    truncate: bool = True,
) -> tuple[HubLabeling, int]:
    """Merged labels over every union of k+1 color classes.

    With ``forest`` (the forest the coloring came from) each union reuses the
    restricted forest; otherwise every union gets its own forest.  Entries
    above k are dropped when ``truncate`` is set: they cannot lie on a
    shortest path of length at most k.
    """
    classes = coloring.classes()
    names = list(classes)
    p = min(k + 1, len(names))
    parts = []
    unions = 0
    for combo in itertools.combinations(names, p):
        verts = sorted(v for col in combo for v in classes[col])
        sub, old = g.induced(verts)
        if forest is not None:
            sub_forest, _ = restrict_forest(forest, verts)
        else:
            sub_forest = treedepth_exact(sub).forest
        L = tighten(sub, build_elimination(sub, sub_forest))
        if truncate:
            L = _truncate(L, k)
        parts.append(lift(L, old, g.n))
        unions += 1
    merged = concat(parts)
    return (_truncate(merged, k) if truncate else merged), unions


def decide_diameter_le_k(
    g: Graph,
    k: int,
    coloring: LowTDColoring | None = None,
    color_cap: int = COLOR_CAP,
    k_cap: int = K_CAP,
    label_cap: int = LABEL_CAP,
    forest: EliminationForest | None = None,
) -> DiameterDecision:
    """Decide whether the diameter of a connected unweighted undirected graph
    is at most k.

    ``coloring=None`` builds a depth coloring from a heuristic forest.  A
    shortest path of length k has k+1 vertices, so unions of k+1 classes are
    used; the cap is checked on the merged label bound (k+1) * C(c-1, k).
    """
    if g.directed:
        raise GraphError("diameter decider needs an undirected graph")
    if g.weighted:
        raise GraphError("diameter decider needs an unweighted graph")
    if k < 1:
        raise GraphError("k must be at least 1")
    if g.n and max(_bfs(g, 0)) is INF:
        raise GraphError("graph is not connected")
    if k > k_cap:
        raise CapExceededError(f"k={k} exceeds the cap {k_cap}")
    if coloring is None:
        if forest is None:
            forest = treedepth_exact(g).forest if g.n <= EXACT_LIMIT else heuristic_forest(g)
        coloring = depth_coloring(forest)
    elif len(coloring.colors) != g.n:
        raise ColoringError(f"coloring has {len(coloring.colors)} entries, graph has {g.n}")
    c = coloring.c
    p = min(k + 1, c)
    # a vertex lies in C(c-1, p-1) unions and gets at most p hubs from each
    size = p * math.comb(c - 1, p - 1)
    if c > color_cap:
        raise CapExceededError(f"coloring uses {c} colors, cap is {color_cap}")
    if size > label_cap:
        raise CapExceededError(f"(k+1)*C(c-1,k) = {size} exceeds the label cap {label_cap}")
    merged, unions = union_labels(g, k, coloring, forest)
    engine = SimpleEngine(merged, cap=max(label_cap, merged.k), strategy="grouped")
    height = forest.height if forest is not None else None
    for u in range(g.n):
        ecc, w = engine.ecc(u)
        if ecc > k:
            true = _bfs(g, u)[w]
            if true <= k:
                raise GraphError(f"label estimate for ({u},{w}) exceeds k but BFS distance is {true}")
            return DiameterDecision(False, (u, w), true, c, unions, merged.k, height)
    return DiameterDecision(True, None, None, c, unions, merged.k, height)
