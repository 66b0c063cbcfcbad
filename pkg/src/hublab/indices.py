"""Distance-based topological indices of undirected unweighted graphs.

Vertex-pair indices (Wiener, power sums, Hyper-Wiener, MTI, Harary, RCW) come
from per-source aggregates of :class:`~hublab.engine.SimpleEngine`.  The
closer counts behind Szeged and Padmakar-Ivan use the two engines below.
They pad every label to the common width k with dummy hubs n, n+1, ...
Dummy hubs never match a real hub, so one tree per engine suffices.
"""

from __future__ import annotations

import math
import time
from collections import deque
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .engine import SimpleEngine, _check_cap, placement_box, pruned_placements, realized_placements
from .graph import INF, Graph, GraphError, dijkstra
from .labeling import Flavor, HubLabeling, LabelingError, build_elimination, build_pruned, tighten
from .rangetree import BoxBuilder, RangeTree

INDEX_K_CAP = 64
MAX_ALPHA = 8


class BudgetExceededError(GraphError):
    """A computation ran past its time budget."""


def _pair_index(k: int, a: int, c: int) -> int:
    """Offset of the pair (a, c), a < c, in the combinations order over k."""
    return a * (2 * k - a - 1) // 2 + (c - a - 1)


_FLIP = {"lt": "gt", "le": "ge", "gt": "lt", "ge": "le"}
_STATIC = {
    "lt": lambda b: 0 < b,
    "le": lambda b: 0 <= b,
    "gt": lambda b: 0 > b,
    "ge": lambda b: 0 >= b,
}


def _diff(b: BoxBuilder, base: int, k: int, a: int, c: int, op: str, bound: int) -> bool:
    """Constrain d[a] - d[c] `op` bound inside one pairwise-difference block."""
    if a == c:
        return _STATIC[op](bound)
    if a > c:
        a, c, op, bound = c, a, _FLIP[op], -bound
    return getattr(b, op)(base + _pair_index(k, a, c), bound)


def _padded(L: HubLabeling, rows: Sequence[int], k: int) -> tuple[np.ndarray, np.ndarray]:
    H = np.empty((len(rows), k), dtype=np.int64)
    D = np.zeros((len(rows), k), dtype=np.int64)
    for r, v in enumerate(rows):
        hubs, dists = L.in_hubs[v], L.in_dist[v]
        w = len(hubs)
        H[r, :w] = hubs
        H[r, w:] = np.arange(L.n, L.n + k - w)
        D[r, :w] = dists
    return H, D


def _pair_block(D: np.ndarray) -> np.ndarray:
    k = D.shape[1]
    cols = [D[:, a] - D[:, c] for a in range(k) for c in range(a + 1, k)]
    if not cols:
        return np.zeros((D.shape[0], 0), dtype=np.int64)
    return np.stack(cols, axis=1)


class _Levels:
    """Nested least-hub search shared by both closer engines."""

    def __init__(self, tree: RangeTree, strategy: str, prefix: RangeTree | None):
        self.tree = tree
        self.strategy = strategy
        self.prefix = prefix

    def groups(self, blocks, specs, total: int):
        dim = self.tree.d
        if self.strategy == "grouped":
            for pls, cnt in realized_placements(blocks, [s[0] for s in specs]):
                yield pls, placement_box(dim, specs, pls), cnt
        else:
            yield from pruned_placements(self.prefix, dim, specs, total)

    def descend(self, levels, b: BoxBuilder, cnt: int, chosen: list) -> Iterator[tuple[BoxBuilder, int, list]]:
        """``levels`` holds (members, dist, diff_base) per level; each level
        picks the least hub realizing its distance."""
        if not levels:
            yield b, cnt, chosen
            return
        (members, dist, base), rest = levels[0], levels[1:]
        k = self.k
        left = cnt
        for x, lx in members:
            nb = b.copy()
            ok = True
            for x2, l2 in members:
                if x2 != x:
                    op = "gt" if x2 < x else "ge"
                    ok = _diff(nb, base, k, l2, lx, op, dist[x] - dist[x2]) and ok
            if not ok:
                continue
            c = self.tree.count_query(nb)
            if not c:
                continue
            yield from self.descend(rest, nb, c, chosen + [(x, lx)])
            left -= c
            if left <= 0:
                return


class CloserEngine(_Levels):
    """Counts n_uv = |{z : dist(u, z) < dist(v, z)}| for exact labels.

    One point per vertex z: its padded hub list followed by every pairwise
    difference d(q_a, z) - d(q_c, z), a < c.
    """

    def __init__(self, L: HubLabeling, cap: int = INDEX_K_CAP, strategy: str = "grouped", leaf_size: int = 12):
        _check_cap(L.k, cap)
        self.L = L
        self.k = k = max(L.k, 1)
        rows = list(range(L.n))
        self.H, D = _padded(L, rows, k)
        pts = np.hstack([self.H, _pair_block(D)])
        owners = np.arange(L.n, dtype=np.int64)
        tree = RangeTree(pts, np.zeros((L.n, 1), dtype=np.int64), owners, leaf_size=leaf_size)
        prefix = RangeTree(self.H, np.zeros((L.n, 1), dtype=np.int64), owners, leaf_size=leaf_size)
        super().__init__(tree, strategy, prefix)

    def counts(self, u: int, v: int) -> tuple[int, int]:
        """(n_uv, n_vu); vertices at equal distance count for neither."""
        if u == v:
            return 0, 0
        L, k = self.L, self.k
        hu, hv = L.out_hubs[u], L.out_hubs[v]
        du, dv = dict(zip(hu, L.out_dist[u])), dict(zip(hv, L.out_dist[v]))
        specs = [(hu, 0, k), (hv, 0, k)]
        closer_u = closer_v = 0
        for (pu, pv), box, cnt in self.groups([self.H, self.H], specs, self.tree.m):
            X, Y = pu.members(hu), pv.members(hv)
            if not X or not Y:
                raise LabelingError(f"labels do not cover the pairs of {u} or {v}")
            levels = [(X, du, k), (Y, dv, k)]
            for b, c, ((x, lx), (y, ly)) in self.descend(levels, box, cnt, []):
                bound = dv[y] - du[x]
                for op in ("lt", "gt"):
                    nb = b.copy()
                    if _diff(nb, k, k, lx, ly, op, bound):
                        got = c if lx == ly else self.tree.count_query(nb)
                        if op == "lt":
                            closer_u += got
                        else:
                            closer_v += got
        return closer_u, closer_v

    def n_closer(self, u: int, v: int) -> int:
        return self.counts(u, v)[0]


class EdgeCloserEngine(_Levels):
    """Counts n^e_uv = |{e : dist(u, e) < dist(v, e)}|, dist(u, zz') = min.

    One point per edge zz' (z < z'): both padded hub lists, the pairwise
    difference blocks of z and of z', and every cross difference
    d(q_a, z) - d(q'_c, z').  The endpoint realizing dist(u, e) is the one
    with the smaller distance (z on ties).
    """

    def __init__(self, L: HubLabeling, edges: Sequence[tuple[int, int]], cap: int = INDEX_K_CAP,
                 strategy: str = "grouped", leaf_size: int = 12):
        _check_cap(L.k, cap)
        self.L = L
        self.k = k = max(L.k, 1)
        self.edges = [(min(a, b), max(a, b)) for a, b in edges]
        zs = [a for a, _ in self.edges]
        zps = [b for _, b in self.edges]
        self.Hz, Dz = _padded(L, zs, k)
        self.Hzp, Dzp = _padded(L, zps, k)
        pairs = k * (k - 1) // 2
        self.base_pz = 2 * k
        self.base_pzp = 2 * k + pairs
        self.base_cross = 2 * k + 2 * pairs
        m = len(self.edges)
        cross = (Dz[:, :, None] - Dzp[:, None, :]).reshape(m, k * k)
        pts = np.hstack([self.Hz, self.Hzp, _pair_block(Dz), _pair_block(Dzp), cross])
        owners = np.arange(m, dtype=np.int64)
        zeros = np.zeros((m, 1), dtype=np.int64)
        tree = RangeTree(pts, zeros, owners, leaf_size=leaf_size, dim=self.base_cross + k * k)
        prefix = RangeTree(np.hstack([self.Hz, self.Hzp]), zeros, owners, leaf_size=leaf_size, dim=2 * k)
        super().__init__(tree, strategy, prefix)

    def _cross(self, b: BoxBuilder, a: int, c: int, op: str, bound: int) -> bool:
        return getattr(b, op)(self.base_cross + a * self.k + c, bound)

    def counts(self, u: int, v: int) -> tuple[int, int]:
        """(n^e_uv, n^e_vu); edges at equal distance count for neither."""
        if u == v or not self.edges:
            return 0, 0
        L, k = self.L, self.k
        hu, hv = L.out_hubs[u], L.out_hubs[v]
        du, dv = dict(zip(hu, L.out_dist[u])), dict(zip(hv, L.out_dist[v]))
        specs = [(hu, 0, k), (hu, k, k), (hv, 0, k), (hv, k, k)]
        blocks = [self.Hz, self.Hzp, self.Hz, self.Hzp]
        totals = [0, 0]
        for pls, box, cnt in self.groups(blocks, specs, self.tree.m):
            X, Xp, Y, Yp = (pl.members(h) for pl, h in zip(pls, (hu, hu, hv, hv)))
            if not (X and Xp and Y and Yp):
                raise LabelingError(f"labels do not cover the pairs of {u} or {v}")
            levels = [(X, du, self.base_pz), (Xp, du, self.base_pzp), (Y, dv, self.base_pz), (Yp, dv, self.base_pzp)]
            for b, c, chosen in self.descend(levels, box, cnt, []):
                self._cases(b, c, chosen, du, dv, totals)
        return totals[0], totals[1]

    def _cases(self, b: BoxBuilder, cnt: int, chosen, du, dv, totals) -> None:
        (x, lx), (xp, lxp), (y, ly), (yp, lyp) = chosen
        k = self.k
        left = cnt
        for u_at_z in (True, False):
            bu = b.copy()
            if not self._cross(bu, lx, lxp, "le" if u_at_z else "gt", du[xp] - du[x]):
                continue
            cu = self.tree.count_query(bu)
            if not cu:
                continue
            left_v = cu
            for v_at_z in (True, False):
                bv = bu.copy()
                if not self._cross(bv, ly, lyp, "le" if v_at_z else "gt", dv[yp] - dv[y]):
                    continue
                cv = self.tree.count_query(bv)
                if not cv:
                    continue
                for side, op in ((0, "lt"), (1, "gt")):
                    bc = bv.copy()
                    # dist(u, e) - dist(v, e) compared against 0
                    if u_at_z and v_at_z:
                        ok = _diff(bc, self.base_pz, k, lx, ly, op, dv[y] - du[x])
                        static = lx == ly
                    elif u_at_z:
                        ok = self._cross(bc, lx, lyp, op, dv[yp] - du[x])
                        static = False
                    elif v_at_z:
                        # d_z'[lxp] + du[xp] vs d_z[ly] + dv[y]  <=>  d_z[ly] - d_z'[lxp] flip
                        ok = self._cross(bc, ly, lxp, _FLIP[op], du[xp] - dv[y])
                        static = False
                    else:
                        ok = _diff(bc, self.base_pzp, k, lxp, lyp, op, dv[yp] - du[xp])
                        static = lxp == lyp
                    if ok:
                        totals[side] += cv if static else self.tree.count_query(bc)
                left_v -= cv
                if left_v <= 0:
                    break
            left -= cu
            if left <= 0:
                break

    def n_edge_closer(self, u: int, v: int) -> int:
        return self.counts(u, v)[0]


# -- labels ------------------------------------------------------------------------


def index_labels(g: Graph) -> HubLabeling:
    """Exact labels with the smaller maximum size of two constructions:
    pruned landmark labels and tightened elimination-forest labels."""
    from .sparse import EXACT_LIMIT, heuristic_forest, treedepth_exact

    forest = treedepth_exact(g).forest if g.n <= EXACT_LIMIT else heuristic_forest(g)
    elim = tighten(g, build_elimination(g, forest))
    pruned = build_pruned(g)
    return min((pruned, elim), key=lambda L: (L.k, sum(len(h) for h in L.out_hubs)))


def require_index_graph(g: Graph, allow_weighted: bool = False) -> None:
    if g.directed:
        raise GraphError("indices need an undirected graph")
    if g.weighted and not allow_weighted:
        raise GraphError("indices need an unweighted graph (use allow_weighted for Wiener and power sums)")
    if g.n == 0:
        raise GraphError("empty graph")
    if any(d is INF for d in dijkstra(g, 0)):
        raise GraphError("graph is not connected")


class IndexSuite:
    """Lazily evaluated indices of one connected undirected graph.

    Pair sums are accumulated over ordered pairs; ``ordered=False`` halves
    them.  ``time_budget`` (seconds) bounds the edge-based indices.
    """

    def __init__(
        self,
        g: Graph,
        L: HubLabeling | None = None,
        cap: int = INDEX_K_CAP,
        strategy: str = "grouped",
        allow_weighted: bool = False,
        alpha: int = 3,
        leaf_size: int = 12,
    ):
        require_index_graph(g, allow_weighted)
        if not 1 <= alpha <= MAX_ALPHA:
            raise GraphError(f"alpha must be in 1..{MAX_ALPHA}")
        self.g = g
        self.L = index_labels(g) if L is None else L
        if self.L.flavor is not Flavor.EXACT:
            raise LabelingError("indices need exact labels")
        if self.L.n != g.n:
            raise LabelingError("labeling and graph sizes differ")
        _check_cap(self.L.k, cap)
        self.cap = cap
        self.strategy = strategy
        self.alpha = alpha
        self.leaf_size = leaf_size
        self._base = None
        self._recip = None
        self._closer = None
        self._edge = None

    def _require_unweighted(self, what: str) -> None:
        if self.g.weighted:
            raise GraphError(f"{what} needs an unweighted graph")

    # -- per-source passes --

    def _base_pass(self):
        if self._base is None:
            eng = SimpleEngine(self.L, cap=self.cap, leaf_size=self.leaf_size, strategy=self.strategy,
                               alpha=self.alpha, degrees=self.g.degrees())
            self._base = [eng.query(u) for u in range(self.g.n)]
        return self._base

    def _recip_pass(self):
        if self._recip is None:
            diam = self.diameter()
            eng = SimpleEngine(self.L, cap=self.cap, leaf_size=self.leaf_size, strategy=self.strategy,
                               alpha=1, isw=True)
            self._recip = [eng.query(u, diameter=diam) for u in range(self.g.n)]
        return self._recip

    def diameter(self) -> int:
        return max(r.ecc for r in self._base_pass())

    def power_sum(self, alpha: int, ordered: bool = True) -> int:
        if not 1 <= alpha <= MAX_ALPHA:
            raise GraphError(f"alpha must be in 1..{MAX_ALPHA}")
        if alpha > self.alpha:
            self.alpha = alpha
            self._base = None
        total = sum(r.powers[alpha] for r in self._base_pass())
        return total if ordered else total // 2

    def wiener(self, ordered: bool = False) -> int:
        return self.power_sum(1, ordered)

    def hyper_wiener(self) -> int:
        """Sum over unordered pairs of (d + d^2) / 2."""
        self._require_unweighted("Hyper-Wiener")
        return (self.power_sum(1) + self.power_sum(2)) // 4

    def mti(self, ordered: bool = True) -> int:
        """sum over u != v of (deg u + deg v) dist(u, v)."""
        self._require_unweighted("MTI")
        deg = self.g.degrees()
        total = sum(deg[u] * r.powers[1] + r.deg_dist for u, r in enumerate(self._base_pass()))
        return total if ordered else total // 2

    def harary(self, ordered: bool = False) -> Fraction:
        self._require_unweighted("Harary")
        total = sum((r.harary for r in self._recip_pass()), Fraction(0))
        return total if ordered else total / 2

    def rcw(self, ordered: bool = False) -> Fraction:
        self._require_unweighted("RCW")
        total = sum((r.rcw for r in self._recip_pass()), Fraction(0))
        return total if ordered else total / 2

    # -- closer counts --

    def closer_engine(self) -> CloserEngine:
        self._require_unweighted("closer counts")
        if self._closer is None:
            self._closer = CloserEngine(self.L, self.cap, self.strategy, self.leaf_size)
        return self._closer

    def edge_closer_engine(self) -> EdgeCloserEngine:
        self._require_unweighted("edge closer counts")
        if self._edge is None:
            edges = [(a, b) for a, b, _ in self.g.edges]
            self._edge = EdgeCloserEngine(self.L, edges, self.cap, self.strategy, self.leaf_size)
        return self._edge

    def _check_vertices(self, u: int, v: int) -> None:
        for x in (u, v):
            if not 0 <= x < self.g.n:
                raise GraphError(f"vertex {x} out of range")

    def n_closer(self, u: int, v: int) -> int:
        self._check_vertices(u, v)
        return self.closer_engine().n_closer(u, v)

    def n_edge_closer(self, u: int, v: int) -> int:
        self._check_vertices(u, v)
        return self.edge_closer_engine().n_edge_closer(u, v)

    def szeged(self, time_budget: float | None = None) -> int:
        eng = self.closer_engine()
        start = time.monotonic()
        total = 0
        for a, b, _ in self.g.edges:
            nab, nba = eng.counts(a, b)
            total += nab * nba
            _check_budget(start, time_budget, "Szeged")
        return total

    def padmakar_ivan(self, time_budget: float | None = None) -> int:
        eng = self.edge_closer_engine()
        start = time.monotonic()
        total = 0
        for a, b, _ in self.g.edges:
            total += sum(eng.counts(a, b))
            _check_budget(start, time_budget, "PI")
        return total

    def all_indices(self, time_budget: float | None = None) -> dict:
        out = {
            "wiener": self.wiener(),
            "wiener_ordered": self.wiener(ordered=True),
            "hyper_wiener": self.hyper_wiener(),
            "mti": self.mti(),
            "mti_unordered": self.mti(ordered=False),
            "harary": self.harary(),
            "harary_ordered": self.harary(ordered=True),
            "rcw": self.rcw(),
            "rcw_ordered": self.rcw(ordered=True),
            "szeged": self.szeged(time_budget),
            "padmakar_ivan": self.padmakar_ivan(time_budget),
        }
        for a in range(1, self.alpha + 1):
            out[f"power_sum_{a}"] = self.power_sum(a)
        return out


def _check_budget(start: float, budget: float | None, what: str) -> None:
    if budget is not None and time.monotonic() - start > budget:
        raise BudgetExceededError(f"{what} exceeded its time budget of {budget:g}s")


# -- brute force ----------------------------------------------------------------------


def _bfs_all(g: Graph) -> list[list]:
    if g.weighted:
        return [dijkstra(g, s) for s in range(g.n)]
    out = []
    for s in range(g.n):
        dist = [INF] * g.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y, _ in g.out_arcs[x]:
                if dist[y] is INF:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        out.append(dist)
    return out


def oracle_closer(dist, u: int, v: int) -> int:
    return sum(1 for z in range(len(dist)) if dist[u][z] < dist[v][z])


def oracle_edge_closer(dist, edges, u: int, v: int) -> int:
    return sum(
        1 for a, b in edges if min(dist[u][a], dist[u][b]) < min(dist[v][a], dist[v][b])
    )


def oracle_indices(g: Graph, alpha: int = 3) -> dict:
    """Every index by definition from all-pairs distances."""
    require_index_graph(g, allow_weighted=False)
    dist = _bfs_all(g)
    n = g.n
    deg = g.degrees()
    diam = max(max(row) for row in dist)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    edges = [(a, b) for a, b, _ in g.edges]
    out = {
        "wiener": sum(dist[u][v] for u, v in pairs) // 2,
        "wiener_ordered": sum(dist[u][v] for u, v in pairs),
        "hyper_wiener": sum(dist[u][v] + dist[u][v] ** 2 for u, v in pairs) // 4,
        "mti": sum((deg[u] + deg[v]) * dist[u][v] for u, v in pairs),
        "mti_unordered": sum((deg[u] + deg[v]) * dist[u][v] for u, v in pairs) // 2,
        "harary_ordered": sum((Fraction(1, dist[u][v]) for u, v in pairs), Fraction(0)),
        "rcw_ordered": sum((Fraction(1, diam + 1 - dist[u][v]) for u, v in pairs), Fraction(0)),
        "szeged": sum(oracle_closer(dist, a, b) * oracle_closer(dist, b, a) for a, b in edges),
        "padmakar_ivan": sum(
            oracle_edge_closer(dist, edges, a, b) + oracle_edge_closer(dist, edges, b, a) for a, b in edges
        ),
        "randic": sum(1 / math.sqrt(deg[a] * deg[b]) for a, b in edges),
        "diameter": diam,
    }
    out["harary"] = out["harary_ordered"] / 2
    out["rcw"] = out["rcw_ordered"] / 2
    for a in range(1, alpha + 1):
        out[f"power_sum_{a}"] = sum(dist[u][v] ** a for u, v in pairs)
    return out
