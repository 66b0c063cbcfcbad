"""Tree decompositions: PACE ``.td`` I/O, validation, heuristics, separators."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .graph import Graph, GraphError


class TDParseError(GraphError):
    pass


@dataclass
class TreeDecomposition:
    bags: list[list[int]]
    tree_edges: list[tuple[int, int]]
    n: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def restrict(self, keep: set[int] | frozenset[int]) -> TreeDecomposition:
        return TreeDecomposition([[v for v in bag if v in keep] for bag in self.bags], list(self.tree_edges), self.n)


@dataclass
class TDReport:
    width: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def parse_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, list[int]] = {}
    tree_edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise TDParseError(f"line {lineno}: expected 's td <bags> <width+1> <n>'")
                header = (int(parts[2]), int(parts[3]), int(parts[4]))
            elif parts[0] == "b":
                if header is None:
                    raise TDParseError(f"line {lineno}: bag before header")
                bid = int(parts[1])
                if not 1 <= bid <= header[0] or bid in bags:
                    raise TDParseError(f"line {lineno}: bad bag id {bid}")
                verts = [int(x) - 1 for x in parts[2:]]
                if any(not 0 <= v < header[2] for v in verts):
                    raise TDParseError(f"line {lineno}: vertex out of range")
                bags[bid] = sorted(set(verts))
            else:
                if header is None or len(parts) != 2:
                    raise TDParseError(f"line {lineno}: expected '<id1> <id2>'")
                a, b = int(parts[0]), int(parts[1])
                if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                    raise TDParseError(f"line {lineno}: tree edge references unknown bag")
                tree_edges.append((a - 1, b - 1))
        except ValueError:
            raise TDParseError(f"line {lineno}: non-integer token") from None
    if header is None:
        raise TDParseError("missing 's td' header")
    nbags, _, n = header
    if len(bags) != nbags:
        raise TDParseError(f"header declares {nbags} bags, found {len(bags)}")
    return TreeDecomposition([bags[i + 1] for i in range(nbags)], tree_edges, n)


def format_td(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {td.n}"]
    for i, bag in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in bag]))
    lines.extend(f"{a + 1} {b + 1}" for a, b in td.tree_edges)
    return "\n".join(lines) + "\n"


def validate_td(g: Graph, td: TreeDecomposition, vertices=None) -> TDReport:
    """Check both decomposition axioms for the underlying graph of ``g``.

    ``vertices`` restricts the check to an induced subgraph.
    """
    report = TDReport(width=td.width)
    verts = range(g.n) if vertices is None else sorted(vertices)
    nb = len(td.bags)
    if len(td.tree_edges) != max(nb - 1, 0):
        report.violations.append(f"tree has {len(td.tree_edges)} edges for {nb} bags")
    adj = td.adjacency()
    seen = {0} if nb else set()
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in adj[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    if len(seen) != nb:
        report.violations.append("decomposition tree is disconnected")
    occ: dict[int, list[int]] = {v: [] for v in verts}
    for t, bag in enumerate(td.bags):
        for v in bag:
            if v in occ:
                occ[v].append(t)
    for v in verts:
        nodes = set(occ[v])
        if not nodes:
            report.violations.append(f"vertex {v} in no bag")
            continue
        start = next(iter(nodes))
        reach = {start}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for s in adj[t]:
                if s in nodes and s not in reach:
                    reach.add(s)
                    queue.append(s)
        if reach != nodes:
            report.violations.append(f"bags of vertex {v} do not form a connected subtree")
    bag_sets = [set(b) for b in td.bags]
    vset = set(verts)
    for u in verts:
        for v in g.neighbors(u):
            if u < v and v in vset and not any(u in b and v in b for b in bag_sets):
                report.violations.append(f"edge {u}-{v} not covered by any bag")
    return report


def heuristic_td(g: Graph) -> TreeDecomposition:
    """Min-degree elimination ordering decomposition (width not minimal)."""
    adj = g.underlying_adjacency()
    n = g.n
    if n == 0:
        return TreeDecomposition([], [], 0)
    remaining = set(range(n))
    order: list[int] = []
    bag_of: dict[int, list[int]] = {}
    while remaining:
        v = min(remaining, key=lambda x: (len(adj[x]), x))
        nbrs = adj[v]
        bag_of[v] = sorted(nbrs | {v})
        for a in nbrs:
            adj[a] |= nbrs - {a}
            adj[a].discard(v)
        order.append(v)
        remaining.discard(v)
        adj[v] = set()
    pos = {v: i for i, v in enumerate(order)}
    bags = [bag_of[v] for v in order]
    tree_edges = []
    for i, v in enumerate(order):
        later = [u for u in bag_of[v] if u != v]
        if later:
            nxt = min(later, key=lambda u: pos[u])
            tree_edges.append((i, pos[nxt]))
    # join the components of a disconnected input into one tree
    linked = {a for a, _ in tree_edges}
    tops = [i for i in range(len(order)) if i not in linked]
    for a, b in zip(tops, tops[1:]):
        tree_edges.append((a, b))
    return TreeDecomposition(bags, tree_edges, n)


@dataclass
class SeparatorSplit:
    C: list[int]
    A: list[int]
    B: list[int]


def _components(adj, verts: set[int], removed: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(verts):
        if s in removed or s in seen:
            continue
        comp = [s]
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in verts and y not in removed and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def balanced_separator(g: Graph, td: TreeDecomposition, vertices=None, adj=None) -> SeparatorSplit:
    """Pick a bag C and split the rest into A, B with no A-B edge.

    Chooses the bag minimising the largest component of ``G - C`` and packs
    components greedily (largest first, into the lighter side).
    """
    verts = set(range(g.n)) if vertices is None else set(vertices)
    adj = g.underlying_adjacency() if adj is None else adj
    best = None
    for t, bag in enumerate(td.bags):
        bag_set = {v for v in bag if v in verts}
        if not bag_set:
            continue
        comps = _components(adj, verts, bag_set)
        largest = max((len(c) for c in comps), default=0)
        key = (largest, len(bag_set), t)
        if best is None or key < best[0]:
            best = (key, bag_set, comps)
    if best is None:
        return SeparatorSplit([], sorted(verts), [])
    _, bag_set, comps = best
    A: list[int] = []
    B: list[int] = []
    for comp in sorted(comps, key=lambda c: (-len(c), c[0])):
        (A if len(A) <= len(B) else B).extend(comp)
    return SeparatorSplit(sorted(bag_set), sorted(A), sorted(B))


def separator_balanced(split: SeparatorSplit, n: int) -> bool:
    return max(len(split.A), len(split.B)) <= math.ceil(2 * n / 3)
