"""Directed weighted graphs, shortest paths and the brute-force oracle."""

from __future__ import annotations

import enum
import heapq
import logging
import math
from collections import deque
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

INF = math.inf
MAX_INPUT_DISTANCE = 1 << 62
DEFAULT_ORACLE_LIMIT = 2000


class GraphError(ValueError):
    """Invalid graph input or a graph that violates an engine precondition."""


class OracleLimitError(GraphError):
    pass


class DistanceMode(enum.Enum):
    SOURCE = "source"
    MIN = "min"
    MAX = "max"
    ROUNDTRIP = "roundtrip"

    @classmethod
    def parse(cls, name: str | DistanceMode) -> DistanceMode:
        if isinstance(name, DistanceMode):
            return name
        return cls(name.lower())


ALL_MODES = tuple(DistanceMode)


class Graph:
    """Immutable graph over vertices ``0..n-1``.

    Undirected graphs are stored as symmetric directed graphs; ``edges`` keeps
    the canonical ``(min, max, w)`` list for them.
    """

    __slots__ = ("n", "directed", "weighted", "out_arcs", "in_arcs", "edges", "_m")

    def __init__(
        self,
        n: int,
        arcs: Iterable[tuple[int, int] | tuple[int, int, int]],
        directed: bool = True,
        weighted: bool | None = None,
    ):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        best: dict[tuple[int, int], int] = {}
        saw_weight = False
        dropped = 0
        for arc in arcs:
            if len(arc) == 3:
                u, v, w = arc
                saw_weight = True
            else:
                u, v = arc
                w = 1
            u, v, w = int(u), int(v), int(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"arc ({u},{v}) out of range for n={n}")
            if w <= 0:
                raise GraphError(f"arc ({u},{v}) has non-positive weight {w}")
            if w >= MAX_INPUT_DISTANCE:
                raise GraphError(f"arc ({u},{v}) weight {w} exceeds 2^62")
            if u == v:
                dropped += 1
                continue
            keys = [(u, v)] if directed else [(min(u, v), max(u, v))]
            for key in keys:
                if key not in best or w < best[key]:
                    best[key] = w
        if dropped:
            logger.warning("dropped %d self-loop(s)", dropped)
        self.n = n
        self.directed = directed
        self.weighted = saw_weight if weighted is None else weighted
        if not self.weighted and any(w != 1 for w in best.values()):
            raise GraphError("unweighted graph with weight != 1")
        out_arcs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        in_arcs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (u, v), w in sorted(best.items()):
            out_arcs[u].append((v, w))
            in_arcs[v].append((u, w))
            if not directed:
                out_arcs[v].append((u, w))
                in_arcs[u].append((v, w))
        for lst in out_arcs:
            lst.sort()
        for lst in in_arcs:
            lst.sort()
        self.out_arcs = out_arcs
        self.in_arcs = in_arcs
        self.edges = [] if directed else [(u, v, w) for (u, v), w in sorted(best.items())]
        self._m = len(best)

    @property
    def m(self) -> int:
        """Arc count for directed graphs, edge count for undirected ones."""
        return self._m

    def degree(self, v: int) -> int:
        if self.directed:
            return len(self.out_arcs[v]) + len(self.in_arcs[v])
        return len(self.out_arcs[v])

    def degrees(self) -> list[int]:
        return [self.degree(v) for v in range(self.n)]

    def arcs(self) -> list[tuple[int, int, int]]:
        return [(u, v, w) for u in range(self.n) for v, w in self.out_arcs[u]]

    def neighbors(self, v: int) -> list[int]:
        """Neighbours in the underlying undirected graph."""
        if not self.directed:
            return [x for x, _ in self.out_arcs[v]]
        return sorted({x for x, _ in self.out_arcs[v]} | {x for x, _ in self.in_arcs[v]})

    def underlying_adjacency(self) -> list[set[int]]:
        return [set(self.neighbors(v)) for v in range(self.n)]

    def induced(self, vertices: Sequence[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled to ``0..len-1``; returns it with the old IDs."""
        old = sorted(set(vertices))
        new_id = {v: i for i, v in enumerate(old)}
        arcs = []
        if self.directed:
            for u in old:
                for v, w in self.out_arcs[u]:
                    if v in new_id:
                        arcs.append((new_id[u], new_id[v], w))
        else:
            for u, v, w in self.edges:
                if u in new_id and v in new_id:
                    arcs.append((new_id[u], new_id[v], w))
        return Graph(len(old), arcs, self.directed, self.weighted), old

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.m}, {kind}, weighted={self.weighted})"


def dijkstra(g: Graph, source: int, direction: str = "out", allowed=None) -> list:
    """Single-source distances; ``direction='in'`` gives distances *to* source.

    ``allowed`` optionally restricts the search to a vertex subset.
    Unreachable vertices get ``INF``.
    """
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range")
    adj = g.out_arcs if direction == "out" else g.in_arcs
    dist: list = [INF] * g.n
    dist[source] = 0
    if not g.weighted:
        q = deque([source])
        while q:
            u = q.popleft()
            du = dist[u] + 1
            for v, _ in adj[u]:
                if dist[v] is INF and (allowed is None or v in allowed):
                    dist[v] = du
                    q.append(v)
        return dist
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v] and (allowed is None or v in allowed):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def check_strongly_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return INF not in dijkstra(g, 0, "out") and INF not in dijkstra(g, 0, "in")


def require_strongly_connected(g: Graph) -> None:
    if not check_strongly_connected(g):
        raise GraphError("graph is not strongly connected")


def oracle_all_pairs(g: Graph, limit: int = DEFAULT_ORACLE_LIMIT) -> list[list]:
    if g.n > limit:
        raise OracleLimitError(f"oracle refused: n={g.n} exceeds oracle limit {limit}")
    return [dijkstra(g, u, "out") for u in range(g.n)]


def mode_value(duv, dvu, mode: DistanceMode):
    if mode is DistanceMode.SOURCE:
        return duv
    if mode is DistanceMode.MIN:
        return min(duv, dvu)
    if mode is DistanceMode.MAX:
        return max(duv, dvu)
    if duv >= MAX_INPUT_DISTANCE or dvu >= MAX_INPUT_DISTANCE:
        if duv is INF or dvu is INF:
            return INF
        raise OverflowError("roundtrip distance inputs must be < 2^62")
    return duv + dvu


def ecc_dsum_from_matrix(dist: Sequence[Sequence], mode: DistanceMode) -> tuple[list, list]:
    n = len(dist)
    ecc, dsum = [], []
    for u in range(n):
        row = [mode_value(dist[u][v], dist[v][u], mode) for v in range(n)]
        ecc.append(max(row))
        dsum.append(sum(row))
    return ecc, dsum


def oracle_ecc_dsum(
    g: Graph, mode: DistanceMode | str, limit: int = DEFAULT_ORACLE_LIMIT
) -> tuple[list, list]:
    mode = DistanceMode.parse(mode)
    require_strongly_connected(g)
    return ecc_dsum_from_matrix(oracle_all_pairs(g, limit), mode)


# -- text format -------------------------------------------------------------


def parse_graph(text: str) -> Graph:
    header = None
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "p" or len(parts) != 5:
                raise GraphError(f"line {lineno}: expected 'p <n> <m> <directed|undirected> <weighted|unweighted>'")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: bad header counts") from None
            if parts[3] not in ("directed", "undirected") or parts[4] not in ("weighted", "unweighted"):
                raise GraphError(f"line {lineno}: bad header flags")
            header = (n, m, parts[3] == "directed", parts[4] == "weighted")
            continue
        weighted = header[3]
        if len(parts) != (3 if weighted else 2) and not (not weighted and len(parts) == 3 and parts[2] == "1"):
            raise GraphError(f"line {lineno}: expected 'u v{' w' if weighted else ''}'")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer token") from None
        arcs.append(tuple(nums[:3]) if weighted else (nums[0], nums[1]))
    if header is None:
        raise GraphError("missing 'p' header line")
    n, m, directed, weighted = header
    if len(arcs) != m:
        raise GraphError(f"header declares {m} arcs, found {len(arcs)}")
    try:
        return Graph(n, arcs, directed=directed, weighted=weighted)
    except GraphError as exc:
        raise GraphError(f"invalid graph: {exc}") from None


def format_graph(g: Graph) -> str:
    rows = g.arcs() if g.directed else g.edges
    kind = "directed" if g.directed else "undirected"
    wk = "weighted" if g.weighted else "unweighted"
    lines = [f"p {g.n} {len(rows)} {kind} {wk}"]
    for u, v, w in rows:
        lines.append(f"{u} {v} {w}" if g.weighted else f"{u} {v}")
    return "\n".join(lines) + "\n"
