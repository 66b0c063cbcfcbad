"""Rooted elimination forests (tree-depth witnesses)."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, GraphError


class ForestError(GraphError):
    pass


@dataclass
class EliminationForest:
    """Parent array over ``0..n-1``; roots have parent ``-1``."""

    parent: list[int]

    @property
    def n(self) -> int:
        return len(self.parent)

    def depths(self) -> list[int]:
        """1-based depth of every vertex (roots have depth 1)."""
        depth = [0] * self.n
        for v in range(self.n):
            chain = []
            x = v
            while x != -1 and depth[x] == 0:
                chain.append(x)
                x = self.parent[x]
                if len(chain) > self.n:
                    raise ForestError("parent array contains a cycle")
            base = 0 if x == -1 else depth[x]
            for y in reversed(chain):
                base += 1
                depth[y] = base
        return depth

    @property
    def height(self) -> int:
        return max(self.depths(), default=0)

    def ancestors(self, v: int) -> list[int]:
        """Ancestors of v from v itself up to its root."""
        out = []
        while v != -1:
            out.append(v)
            v = self.parent[v]
        return out

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p != -1:
                ch[p].append(v)
        return ch

    def descendants(self, v: int, children=None) -> list[int]:
        children = self.children() if children is None else children
        out, stack = [], [v]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(children[x])
        return out


def forest_violations(g: Graph, forest: EliminationForest) -> list[str]:
    """Edges of g whose endpoints are not ancestor-related, plus shape errors."""
    if forest.n != g.n:
        return [f"forest has {forest.n} vertices, graph has {g.n}"]
    problems = []
    for v, p in enumerate(forest.parent):
        if not (p == -1 or 0 <= p < g.n) or p == v:
            problems.append(f"bad parent {p} for vertex {v}")
    if problems:
        return problems
    try:
        depth = forest.depths()
    except ForestError as exc:
        return [str(exc)]

    def related(a: int, b: int) -> bool:
        if depth[a] < depth[b]:
            a, b = b, a
        while depth[a] > depth[b]:
            a = forest.parent[a]
        return a == b

    for u in range(g.n):
        for v in g.neighbors(u):
            if u < v and not related(u, v):
                problems.append(f"edge {u}-{v} joins incomparable vertices")
    return problems


def require_valid_forest(g: Graph, forest: EliminationForest) -> None:
    problems = forest_violations(g, forest)
    if problems:
        raise ForestError("invalid elimination forest: " + "; ".join(problems[:5]))
