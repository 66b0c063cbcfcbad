"""Hub labelings (2-hopsets): builders, validation, tightening, merging, I/O."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .forest import EliminationForest, require_valid_forest
from .graph import (
    DEFAULT_ORACLE_LIMIT,
    INF,
    Graph,
    GraphError,
    dijkstra,
    require_strongly_connected,
)
from .generators import make_rng


class Flavor(enum.Enum):
    EXACT = "exact"
    ADMISSIBLE = "admissible"


class LabelingError(GraphError):
    pass


class LabelParseError(LabelingError):
    pass


class HubLabeling:
    """Per-vertex out/in labels stored as parallel hub/distance tuples.

    ``out_hubs[v]`` lists L+(v) sorted by hub ID with ``out_dist[v][r]`` =
    stored dist(v, hub); ``in_hubs``/``in_dist`` hold L-(v) with stored
    dist(hub, v).
    """

    __slots__ = ("out_hubs", "out_dist", "in_hubs", "in_dist", "flavor")

    def __init__(self, out_labels, in_labels, flavor: Flavor = Flavor.EXACT):
        if len(out_labels) != len(in_labels):
            raise LabelingError("out/in label lists differ in length")
        self.out_hubs, self.out_dist = _split(out_labels)
        self.in_hubs, self.in_dist = _split(in_labels)
        self.flavor = Flavor(flavor)

    @property
    def n(self) -> int:
        return len(self.out_hubs)

    @property
    def k(self) -> int:
        return max([len(h) for h in self.out_hubs] + [len(h) for h in self.in_hubs], default=0)

    def out_label(self, v: int) -> list[tuple[int, int]]:
        return list(zip(self.out_hubs[v], self.out_dist[v]))

    def in_label(self, v: int) -> list[tuple[int, int]]:
        return list(zip(self.in_hubs[v], self.in_dist[v]))

    def estimate(self, u: int, v: int):
        """min over common hubs x of stored d(u,x) + d(x,v); INF if none."""
        ah, ad = self.out_hubs[u], self.out_dist[u]
        bh, bd = self.in_hubs[v], self.in_dist[v]
        i = j = 0
        best = INF
        while i < len(ah) and j < len(bh):
            if ah[i] == bh[j]:
                s = ad[i] + bd[j]
                if s < best:
                    best = s
                i += 1
                j += 1
            elif ah[i] < bh[j]:
                i += 1
            else:
                j += 1
        return best

    def is_symmetric(self) -> bool:
        return self.out_hubs == self.in_hubs and self.out_dist == self.in_dist

    def structure_errors(self) -> list[str]:
        errors = []
        for side, hubs_all, dists_all in (("out", self.out_hubs, self.out_dist), ("in", self.in_hubs, self.in_dist)):
            for v, (hubs, dists) in enumerate(zip(hubs_all, dists_all)):
                if any(a >= b for a, b in zip(hubs, hubs[1:])):
                    errors.append(f"{side} label of {v} not strictly sorted")
                if v not in hubs or dists[hubs.index(v)] != 0:
                    errors.append(f"{side} label of {v} lacks self-hub ({v},0)")
                if any(not 0 <= h < self.n for h in hubs):
                    errors.append(f"{side} label of {v} has out-of-range hub")
        return errors

    def __eq__(self, other) -> bool:
        if not isinstance(other, HubLabeling):
            return NotImplemented
        return (
            self.out_hubs == other.out_hubs
            and self.out_dist == other.out_dist
            and self.in_hubs == other.in_hubs
            and self.in_dist == other.in_dist
            and self.flavor == other.flavor
        )

    def __repr__(self) -> str:
        return f"HubLabeling(n={self.n}, k={self.k}, flavor={self.flavor.value})"


def _split(labels) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    hubs, dists = [], []
    for lab in labels:
        items = sorted(dict(lab).items()) if isinstance(lab, dict) else sorted(lab)
        hubs.append(tuple(h for h, _ in items))
        dists.append(tuple(d for _, d in items))
    return hubs, dists


@dataclass
class LabelReport:
    uncovered: list[tuple[int, int]] = field(default_factory=list)
    inexact: list[tuple[str, int, int]] = field(default_factory=list)
    structure: list[str] = field(default_factory=list)
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not (self.uncovered or self.inexact or self.structure)


def validate(
    g: Graph,
    L: HubLabeling,
    check_exactness: bool = False,
    limit: int = DEFAULT_ORACLE_LIMIT,
    samples: int = 64,
    seed: int = 0,
) -> LabelReport:
    """Compare a labeling against Dijkstra distances.

    ``uncovered`` collects pairs whose label estimate differs from the true
    distance; ``inexact`` collects stored entries that differ from the true
    distance (exactness mode) or undercut it (always, since that breaks
    admissibility).  Above ``limit`` vertices only ``samples`` random
    sources are checked and the report is flagged ``sampled``.
    """
    if L.n != g.n:
        raise LabelingError(f"labeling has {L.n} vertices, graph has {g.n}")
    report = LabelReport(structure=L.structure_errors())
    if g.n > limit:
        rng = make_rng(seed)
        sources = sorted({int(x) for x in rng.integers(0, g.n, size=samples)})
        report.sampled = True
    else:
        sources = list(range(g.n))
    for u in sources:
        dout = dijkstra(g, u, "out")
        din = dijkstra(g, u, "in")
        for v in range(g.n):
            if L.estimate(u, v) != dout[v]:
                report.uncovered.append((u, v))
        for h, d in zip(L.out_hubs[u], L.out_dist[u]):
            if d < dout[h] or (check_exactness and d != dout[h]):
                report.inexact.append(("out", u, h))
        for h, d in zip(L.in_hubs[u], L.in_dist[u]):
            if d < din[h] or (check_exactness and d != din[h]):
                report.inexact.append(("in", u, h))
    return report


def build_pruned(g: Graph) -> HubLabeling:
    """Pruned landmark labeling, vertices by descending degree then ID."""
    require_strongly_connected(g)
    n = g.n
    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    out_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    in_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    scratch = [INF] * n
    for r in order:
        # forward: stored dist(r, v) lands in L-(v)
        _pruned_search(g.out_arcs, r, out_lab[r], in_lab, scratch)
        # backward: stored dist(v, r) lands in L+(v)
        _pruned_search(g.in_arcs, r, in_lab[r], out_lab, scratch)
    return HubLabeling(out_lab, in_lab, Flavor.EXACT)


def _pruned_search(adj, r: int, root_label: dict[int, int], target_labels, scratch) -> None:
    for h, d in root_label.items():
        scratch[h] = d
    dist = {r: 0}
    heap = [(0, r)]
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        lab = target_labels[v]
        covered = INF
        for h, dh in lab.items():
            s = scratch[h] + dh
            if s < covered:
                covered = s
        if covered <= d:
            continue
        lab[r] = d
        for x, w in adj[v]:
            nd = d + w
            if x not in done and nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, x))
    for h in root_label:
        scratch[h] = INF


def _is_split(g: Graph, K: Sequence[int]) -> str | None:
    kset = set(K)
    if any(not 0 <= c < g.n for c in kset):
        return "clique vertex out of range"
    adj = g.underlying_adjacency()
    for a in kset:
        if not (kset - {a}) <= adj[a]:
            return f"K is not a clique (vertex {a})"
    for v in range(g.n):
        if v not in kset and any(x not in kset for x in adj[v]):
            return f"vertex {v} outside K has a neighbour outside K"
    return None


def build_split(g: Graph, K: Iterable[int]) -> HubLabeling:
    """L(v) = K + {v} with exact distances (one search per clique vertex)."""
    K = sorted(set(K))
    if g.directed:
        raise LabelingError("split labeling needs an undirected graph")
    problem = _is_split(g, K)
    if problem:
        raise LabelingError(f"not a split partition: {problem}")
    if not K:
        raise LabelingError("empty clique")
    out_lab: list[dict[int, int]] = [{v: 0} for v in range(g.n)]
    for c in K:
        d = dijkstra(g, c, "out")
        for v in range(g.n):
            if d[v] is INF:
                raise LabelingError(f"vertex {v} has no path to clique vertex {c}")
            out_lab[v][c] = d[v]
    return HubLabeling(out_lab, [dict(x) for x in out_lab], Flavor.EXACT)


def build_elimination(g: Graph, forest: EliminationForest) -> HubLabeling:
    """Ancestor labels with distances restricted to each ancestor's subtree."""
    require_valid_forest(g, forest)
    n = g.n
    out_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    in_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    children = forest.children()
    for a in range(n):
        sub = set(forest.descendants(a, children))
        fwd = dijkstra(g, a, "out", allowed=sub)
        bwd = fwd if not g.directed else dijkstra(g, a, "in", allowed=sub)
        for v in sub:
            if fwd[v] is not INF:
                in_lab[v][a] = fwd[v]
            if bwd[v] is not INF:
                out_lab[v][a] = bwd[v]
    return HubLabeling(out_lab, in_lab, Flavor.ADMISSIBLE)


def tighten(g: Graph, L: HubLabeling) -> HubLabeling:
    """Replace each stored entry by the label estimate of its own pair."""
    if L.n != g.n:
        raise LabelingError("labeling and graph sizes differ")
    out_lab = [
        {x: L.estimate(u, x) for x in L.out_hubs[u]} for u in range(L.n)
    ]
    in_lab = [
        {x: L.estimate(x, v) for x in L.in_hubs[v]} for v in range(L.n)
    ]
    return HubLabeling(out_lab, in_lab, Flavor.EXACT)


def concat(labelings: Sequence[HubLabeling]) -> HubLabeling:
    """Union of hub sets per vertex, keeping the minimum stored distance.

    The result is admissible but not necessarily cover-correct.
    """
    if not labelings:
        raise LabelingError("nothing to concatenate")
    n = labelings[0].n
    if any(L.n != n for L in labelings):
        raise LabelingError("labelings cover different vertex sets")
    out_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    in_lab: list[dict[int, int]] = [dict() for _ in range(n)]
    for L in labelings:
        for v in range(n):
            for target, hubs, dists in ((out_lab[v], L.out_hubs[v], L.out_dist[v]), (in_lab[v], L.in_hubs[v], L.in_dist[v])):
                for h, d in zip(hubs, dists):
                    if d < target.get(h, INF):
                        target[h] = d
    return HubLabeling(out_lab, in_lab, Flavor.ADMISSIBLE)


def lift(L: HubLabeling, old_ids: Sequence[int], n: int) -> HubLabeling:
    """Re-express a labeling of an induced subgraph over the full vertex set.

    Vertices outside the subgraph get the lone self-hub.
    """
    out_lab: list[dict[int, int]] = [{v: 0} for v in range(n)]
    in_lab: list[dict[int, int]] = [{v: 0} for v in range(n)]
    for i, v in enumerate(old_ids):
        out_lab[v] = {old_ids[h]: d for h, d in zip(L.out_hubs[i], L.out_dist[i])}
        in_lab[v] = {old_ids[h]: d for h, d in zip(L.in_hubs[i], L.in_dist[i])}
    return HubLabeling(out_lab, in_lab, Flavor.ADMISSIBLE)


# -- file format -------------------------------------------------------------


def format_labeling(L: HubLabeling) -> str:
    lines = [f"hl {L.n} {L.k} {L.flavor.value}"]
    for v in range(L.n):
        for side, hubs, dists in (("out", L.out_hubs[v], L.out_dist[v]), ("in", L.in_hubs[v], L.in_dist[v])):
            lines.append(" ".join([side, str(v)] + [f"{h}:{d}" for h, d in zip(hubs, dists)]))
    return "\n".join(lines) + "\n"


def parse_labeling(text: str) -> HubLabeling:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise LabelParseError("line 1: empty labeling file")
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 4 or parts[0] != "hl":
        raise LabelParseError(f"line {lineno}: expected 'hl <n> <maxLabelSize> <exact|admissible>'")
    try:
        n, k = int(parts[1]), int(parts[2])
        flavor = Flavor(parts[3])
    except ValueError:
        raise LabelParseError(f"line {lineno}: bad header") from None
    out_lab: list = [None] * n
    in_lab: list = [None] * n
    for lineno, line in lines[1:]:
        parts = line.split()
        if parts[0] not in ("out", "in") or len(parts) < 2:
            raise LabelParseError(f"line {lineno}: expected 'out <v> ...' or 'in <v> ...'")
        try:
            v = int(parts[1])
        except ValueError:
            raise LabelParseError(f"line {lineno}: bad vertex id") from None
        if not 0 <= v < n:
            raise LabelParseError(f"line {lineno}: vertex {v} out of range")
        entries = []
        for col, tok in enumerate(parts[2:], 3):
            try:
                h, d = (int(x) for x in tok.split(":"))
            except ValueError:
                raise LabelParseError(f"line {lineno}, field {col}: expected 'hub:dist', got {tok!r}") from None
            if not 0 <= h < n or d < 0:
                raise LabelParseError(f"line {lineno}, field {col}: bad entry {tok!r}")
            if entries and h <= entries[-1][0]:
                raise LabelParseError(f"line {lineno}, field {col}: hubs not strictly ascending")
            entries.append((h, d))
        if (v, 0) not in entries:
            raise LabelParseError(f"line {lineno}: label of {v} lacks mandatory self-hub {v}:0")
        target = out_lab if parts[0] == "out" else in_lab
        if target[v] is not None:
            raise LabelParseError(f"line {lineno}: duplicate {parts[0]} label for {v}")
        target[v] = entries
    for v in range(n):
        if out_lab[v] is None or in_lab[v] is None:
            raise LabelParseError(f"end of file: vertex {v} is missing a label line")
    L = HubLabeling(out_lab, in_lab, flavor)
    if L.k != k:
        raise LabelParseError(f"line 1: header maxLabelSize {k} but labels have {L.k}")
    return L
