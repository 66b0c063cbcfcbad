"""Eccentricity and distance-sum queries over hub labels via range trees.

Every target v with label sizes (i, j) contributes the points p(v, s, t)
(0-based s < i, t < j), laid out as

    [in-label hub ids (i)] [out-label hub ids (j)]
    [dIn(q_r, v) - dIn(q_s, v), r != s] [dOut(v, q_r) - dOut(v, q_t), r != t]
    [dIn(q_s, v) - dOut(v, q_t)]

with channels f0 = dIn(q_s, v), f1 = dOut(v, q_t), f_rt = f0 + f1 and a zero
channel (its max query returns the smallest owner).  For a source u, a
target is classified by the common-hub sets X = L+(u) & L-(v) and
Y = L-(u) & L+(v), the positions of those hubs inside v's labels, the least
hubs x, y realising dist(u, v) and dist(v, u), and the side of the
comparison dist(u, v) <= dist(v, u).  Each class is one box in one tree,
so every target is matched exactly once.
"""

from __future__ import annotations

import enum
import itertools
import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import INF, DistanceMode, Graph, GraphError, require_strongly_connected
from .labeling import HubLabeling, LabelingError, validate
from .rangetree import Aggregate, Box, BoxBuilder, RangeTree

DEFAULT_K_CAP = 12

CH_F0, CH_F1, CH_RT, CH_ZERO = 0, 1, 2, 3
STRATEGIES = ("pruned", "grouped", "exhaustive")


class CapExceededError(GraphError):
    """A configured size cap would be exceeded."""


class Side(enum.Enum):
    LE = "le"
    GT = "gt"


@dataclass(frozen=True)
class WitnessTuple:
    """(i, j, X, Y, x, y) relative to a query source."""

    i: int
    j: int
    X: tuple[int, ...]
    Y: tuple[int, ...]
    x: int
    y: int


@dataclass(frozen=True)
class Placement:
    """Where the hubs of one of u's labels fall inside a target's label.

    ``slots[n]`` is ``(pos, inside)`` for the n-th hub of u's label: when
    ``inside`` the hub equals coordinate ``pos``, otherwise it lies strictly
    between coordinates ``pos - 1`` and ``pos``.
    """

    slots: tuple[tuple[int, bool], ...]

    def members(self, hubs: Sequence[int]) -> list[tuple[int, int]]:
        return [(z, pos) for z, (pos, inside) in zip(hubs, self.slots) if inside]


class ModeResult:
    __slots__ = ("ecc", "witness", "dsum")

    def __init__(self):
        self.ecc = None
        self.witness = None
        self.dsum = 0

    def offer(self, value, owner: int, total) -> None:
        if self.ecc is None or value > self.ecc or (value == self.ecc and owner < self.witness):
            self.ecc, self.witness = value, owner
        self.dsum += total

    def add(self, offset, agg: Aggregate, channel: int) -> None:
        if not agg.count:
            return
        top, owner = agg.maxes[channel]
        self.offer(offset + top, owner, offset * agg.count + agg.sums[channel])

    def add_unreachable(self, agg: Aggregate) -> None:
        if agg.count:
            self.offer(INF, agg.maxes[CH_ZERO][1], INF)

    def add_unreachable_owner(self, agg: Aggregate) -> None:
        if agg.count:
            self.offer(INF, agg.maxes[0][1], INF)

    def as_tuple(self):
        return self.ecc, self.witness, self.dsum


@dataclass
class SourceResult:
    per_mode: dict
    count: int

    def ecc(self, mode: DistanceMode):
        return self.per_mode[mode].ecc, self.per_mode[mode].witness

    def dsum(self, mode: DistanceMode):
        return self.per_mode[mode].dsum


def _check_cap(k: int, cap: int) -> None:
    if k > cap:
        raise CapExceededError(
            f"maximum label size {k} exceeds the cap {cap}; the box family grows like 2^O(k)"
        )


def _diff_block(D: np.ndarray, s: int) -> np.ndarray:
    cols = [r for r in range(D.shape[1]) if r != s]
    return D[:, cols] - D[:, [s]]


def _diff_index(r: int, s: int) -> int:
    return r if r < s else r - 1


def _label_arrays(hubs, dists, members: Sequence[int], width: int):
    H = np.array([hubs[v] for v in members], dtype=np.int64).reshape(len(members), width)
    D = np.array([dists[v] for v in members], dtype=np.int64).reshape(len(members), width)
    return H, D


def point_coords(L: HubLabeling, v: int, s: int, t: int) -> list[int]:
    """Coordinates of p(v, s, t) recomputed from the labeling (0-based s, t)."""
    qm, dm = L.in_hubs[v], L.in_dist[v]
    qp, dp = L.out_hubs[v], L.out_dist[v]
    out = list(qm) + list(qp)
    out += [dm[r] - dm[s] for r in range(len(qm)) if r != s]
    out += [dp[r] - dp[t] for r in range(len(qp)) if r != t]
    out.append(dm[s] - dp[t])
    return out


def _add_hub(b: BoxBuilder, base: int, size: int, z: int, pos: int, inside: bool, full: bool = False) -> bool:
    """Constrain the hub block ``[base, base + size)`` for one hub z."""
    if inside:
        return b.eq(base + pos, z)
    if full:
        ok = True
        for ell in range(size):
            ok = (b.lt(base + ell, z) if ell < pos else b.gt(base + ell, z)) and ok
        return ok
    # labels are strictly sorted, so the two neighbours of the slot suffice
    if pos > 0 and not b.lt(base + pos - 1, z):
        return False
    if pos < size and not b.gt(base + pos, z):
        return False
    return True


def _placement_of(hubs: Sequence[int], target: Sequence[int]) -> Placement:
    slots = []
    for z in hubs:
        pos = bisect_left(target, z)
        slots.append((pos, pos < len(target) and target[pos] == z))
    return Placement(tuple(slots))


def realized_placements(blocks: Sequence[np.ndarray], hub_lists: Sequence[Sequence[int]]):
    """Distinct placements of each hub list inside the paired label block.

    ``blocks[b]`` holds one sorted label per row; rows of all blocks are
    aligned (same target).  Yields ``(placements, count)`` with one
    :class:`Placement` per hub list.
    """
    cols = []
    widths = []
    for H, hubs in zip(blocks, hub_lists):
        q = np.asarray(hubs, dtype=np.int64)
        H3 = H[:, :, None]
        cols.append(2 * (H3 < q).sum(axis=1) + (H3 == q).any(axis=1))
        widths.append(len(q))
    rows, counts = np.unique(np.hstack(cols), axis=0, return_counts=True)
    for row, cnt in zip(rows.tolist(), counts.tolist()):
        out, at = [], 0
        for w in widths:
            out.append(Placement(tuple((c >> 1, bool(c & 1)) for c in row[at:at + w])))
            at += w
        yield tuple(out), cnt


def placement_box(dim: int, specs, placements) -> BoxBuilder:
    """Hub constraints for ``placements``; ``specs`` are (hubs, base, size)."""
    b = BoxBuilder(dim)
    for (hubs, base, size), pl in zip(specs, placements):
        for z, (pos, inside) in zip(hubs, pl.slots):
            _add_hub(b, base, size, z, pos, inside)
    return b


def pruned_placements(prefix: RangeTree, dim: int, specs, total: int):
    """Depth-first placement search cut by count queries on ``prefix``.

    ``prefix`` holds the hub blocks only (its dimension is a prefix of
    ``dim``).  Within one spec the slots are non-decreasing because labels
    are sorted; the search stops a level once its children account for
    every target of the parent.
    """
    flat = [(z, base, size, n) for n, (hubs, base, size) in enumerate(specs) for z in hubs]
    widths = [len(h) for h, _, _ in specs]
    pdim = prefix.d
    slots: list[tuple[int, bool]] = []

    def emit(b: BoxBuilder, cnt: int):
        out, at = [], 0
        for w in widths:
            out.append(Placement(tuple(slots[at:at + w])))
            at += w
        return tuple(out), b, cnt

    def rec(idx: int, low: int, b: BoxBuilder, cnt: int):
        if idx == len(flat):
            yield emit(b, cnt)
            return
        z, base, size, spec = flat[idx]
        if idx == 0 or flat[idx - 1][3] != spec:
            low = 0
        left = cnt
        for pos in range(low, size + 1):
            for inside in (True, False):
                if left <= 0:
                    return
                if inside and pos == size:
                    continue
                if inside and z not in prefix.column_values(base + pos):
                    continue
                nb = b.copy()
                if not _add_hub(nb, base, size, z, pos, inside):
                    continue
                c = prefix.count_query(nb.view(pdim))
                if not c:
                    continue
                left -= c
                slots.append((pos, inside))
                yield from rec(idx + 1, pos + 1 if inside else pos, nb, c)
                slots.pop()

    if total:
        yield from rec(0, 0, BoxBuilder(dim), total)


class _Class:
    """Points of all targets with label sizes (i, j)."""

    def __init__(self, L: HubLabeling, i: int, j: int, members: list[int], leaf_size: int, sides: bool):
        self.i, self.j = i, j
        self.members = members
        Hm, Dm = _label_arrays(L.in_hubs, L.in_dist, members, i)
        Hp, Dp = _label_arrays(L.out_hubs, L.out_dist, members, j)
        owners = np.array(members, dtype=np.int64)
        hubs = np.hstack([Hm, Hp])
        zeros = np.zeros(len(members), dtype=np.int64)
        self.prefix = RangeTree(hubs, zeros.reshape(-1, 1), owners, leaf_size=leaf_size, dim=i + j)
        self.dim = 2 * (i + j) - 1
        self.trees: dict[tuple[int, int], RangeTree] = {}
        self.Hm, self.Hp = Hm, Hp
        self._parts = (hubs, Dm, Dp, owners, zeros, leaf_size)

    def tree(self, s: int, t: int) -> RangeTree:
        got = self.trees.get((s, t))
        if got is None:
            hubs, Dm, Dp, owners, zeros, leaf_size = self._parts
            f0, f1 = Dm[:, s], Dp[:, t]
            pts = np.hstack([hubs, _diff_block(Dm, s), _diff_block(Dp, t), (f0 - f1)[:, None]])
            ch = np.stack([f0, f1, f0 + f1, zeros], axis=1)
            got = self.trees[(s, t)] = RangeTree(pts, ch, owners, leaf_size=leaf_size, dim=self.dim)
        return got

    def build_all(self) -> None:
        for s in range(self.i):
            for t in range(self.j):
                self.tree(s, t)


class Engine:
    """Eccentricity / distance-sum engine for all four distance modes."""

    def __init__(
        self,
        g: Graph | None,
        L: HubLabeling,
        modes: Iterable[DistanceMode] = tuple(DistanceMode),
        cap: int = DEFAULT_K_CAP,
        leaf_size: int = 12,
        strategy: str = "grouped",
        check_labels: bool = False,
        threads: int = 1,
    ):
        _check_cap(L.k, cap)
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        if g is not None:
            if g.n != L.n:
                raise LabelingError(f"labeling has {L.n} vertices, graph has {g.n}")
            if check_labels:
                require_strongly_connected(g)
                report = validate(g, L)
                if not report.ok:
                    raise LabelingError(f"labeling is not cover-correct: {report}")
        self.g = g
        self.L = L
        self.n = L.n
        self.modes = frozenset(DistanceMode.parse(m) for m in modes)
        self.strategy = strategy
        self.threads = threads
        groups: dict[tuple[int, int], list[int]] = {}
        for v in range(self.n):
            groups.setdefault((len(L.in_hubs[v]), len(L.out_hubs[v])), []).append(v)
        self.classes = {key: _Class(L, *key, members, leaf_size, True) for key, members in sorted(groups.items())}
        self._cache: dict[int, SourceResult] = {}

    # -- point / box construction -------------------------------------------

    def bank_sizes(self) -> dict[tuple[int, int], int]:
        """Points per (i, j) tree: one per member and index pair (s, t)."""
        return {key: len(c.members) for key, c in self.classes.items()}

    def points(self, i: int, j: int, s: int, t: int) -> np.ndarray:
        return self.classes[(i, j)].tree(s, t).coords

    def _hub_placements(self, u: int, cls: _Class) -> Iterator[tuple[Placement, Placement, BoxBuilder, int]]:
        """Realized hub placements of u's labels in class targets, with counts."""
        specs = [(self.L.out_hubs[u], 0, cls.i), (self.L.in_hubs[u], cls.i, cls.j)]
        if self.strategy == "grouped":
            for (px, py), cnt in realized_placements([cls.Hm, cls.Hp], [specs[0][0], specs[1][0]]):
                yield px, py, placement_box(cls.dim, specs, (px, py)), cnt
            return
        for (px, py), b, cnt in pruned_placements(cls.prefix, cls.dim, specs, len(cls.members)):
            yield px, py, b, cnt

    def _witness_boxes(self, u: int, cls: _Class, px: Placement, py: Placement, hub_box: BoxBuilder):
        """Boxes for every (x, y, side) given hub placements."""
        i, j = cls.i, cls.j
        L = self.L
        out_u = dict(zip(L.out_hubs[u], L.out_dist[u]))
        in_u = dict(zip(L.in_hubs[u], L.in_dist[u]))
        X = px.members(L.out_hubs[u])
        Y = py.members(L.in_hubs[u])
        last = 2 * (i + j) - 2
        for x, lx in X:
            bx = hub_box.copy()
            ok = True
            for x2, l2 in X:
                if x2 == x:
                    continue
                dim = i + j + _diff_index(l2, lx)
                bound = out_u[x] - out_u[x2]
                ok = (bx.gt(dim, bound) if x2 < x else bx.ge(dim, bound)) and ok
            if not ok:
                continue
            for y, ly in Y:
                by = bx.copy()
                ok = True
                for y2, l2 in Y:
                    if y2 == y:
                        continue
                    dim = 2 * i + j - 1 + _diff_index(l2, ly)
                    bound = in_u[y] - in_u[y2]
                    ok = (by.gt(dim, bound) if y2 < y else by.ge(dim, bound)) and ok
                if not ok:
                    continue
                split = in_u[y] - out_u[x]
                le = by.copy()
                if le.le(last, split):
                    yield WitnessTuple(i, j, tuple(z for z, _ in X), tuple(z for z, _ in Y), x, y), Side.LE, (lx, ly), le
                gt = by.copy()
                if gt.gt(last, split):
                    yield WitnessTuple(i, j, tuple(z for z, _ in X), tuple(z for z, _ in Y), x, y), Side.GT, (lx, ly), gt

    def iter_boxes(self, u: int):
        """Yield ``(key, phi, side, (s, t), box)`` covering every target once.

        ``phi`` is ``None`` for targets sharing no hub with u in at least one
        direction; those boxes live in the (i, j) hub-prefix tree.
        """
        if self.strategy == "exhaustive":
            yield from self._exhaustive_boxes(u)
            return
        for key, cls in self.classes.items():
            for px, py, hub_box, _ in self._hub_placements(u, cls):
                X = px.members(self.L.out_hubs[u])
                Y = py.members(self.L.in_hubs[u])
                if X and Y:
                    for phi, side, st, box in self._witness_boxes(u, cls, px, py, hub_box):
                        yield key, phi, side, st, box.freeze()
                else:
                    yield key, None, (bool(X), bool(Y)), None, hub_box.view(cls.i + cls.j).freeze()

    def boxes_for(self, u: int, phi: WitnessTuple, side: Side, full: bool = True) -> list[tuple[tuple[int, int], Box]]:
        """All boxes for one witness tuple and side, enumerating positions.

        Positions of X (resp. Y) range over increasing tuples in [0, i)
        (resp. [0, j)); every excluded hub of u's label independently picks a
        slot in [0, i] (resp. [0, j]).  Empty boxes are dropped, duplicates
        merged.
        """
        i, j = phi.i, phi.j
        L = self.L
        out_u = dict(zip(L.out_hubs[u], L.out_dist[u]))
        in_u = dict(zip(L.in_hubs[u], L.in_dist[u]))
        X, Y = sorted(phi.X), sorted(phi.Y)
        zx = [z for z in L.out_hubs[u] if z not in phi.X]
        zy = [z for z in L.in_hubs[u] if z not in phi.Y]
        dim = 2 * (i + j) - 1
        out: dict = {}
        for posx in itertools.combinations(range(i), len(X)):
            for posy in itertools.combinations(range(j), len(Y)):
                for slx in itertools.product(range(i + 1), repeat=len(zx)):
                    for sly in itertools.product(range(j + 1), repeat=len(zy)):
                        b = BoxBuilder(dim)
                        ok = True
                        for z, p in zip(X, posx):
                            ok = _add_hub(b, 0, i, z, p, True) and ok
                        for z, p in zip(zx, slx):
                            ok = _add_hub(b, 0, i, z, p, False, full=full) and ok
                        for z, p in zip(Y, posy):
                            ok = _add_hub(b, i, j, z, p, True) and ok
                        for z, p in zip(zy, sly):
                            ok = _add_hub(b, i, j, z, p, False, full=full) and ok
                        lx = posx[X.index(phi.x)]
                        ly = posy[Y.index(phi.y)]
                        for x2, l2 in zip(X, posx):
                            if x2 != phi.x:
                                d = i + j + _diff_index(l2, lx)
                                bound = out_u[phi.x] - out_u[x2]
                                ok = (b.gt(d, bound) if x2 < phi.x else b.ge(d, bound)) and ok
                        for y2, l2 in zip(Y, posy):
                            if y2 != phi.y:
                                d = 2 * i + j - 1 + _diff_index(l2, ly)
                                bound = in_u[phi.y] - in_u[y2]
                                ok = (b.gt(d, bound) if y2 < phi.y else b.ge(d, bound)) and ok
                        split = in_u[phi.y] - out_u[phi.x]
                        ok = (b.le(dim - 1, split) if side is Side.LE else b.gt(dim - 1, split)) and ok
                        if ok:
                            box = b.freeze()
                            out.setdefault(box.key(), ((lx, ly), box))
        return list(out.values())

    def _exhaustive_boxes(self, u: int):
        L = self.L
        qp, qm = L.out_hubs[u], L.in_hubs[u]
        for key, cls in self.classes.items():
            i, j = key
            for ax in range(1, min(i, len(qp)) + 1):
                for X in itertools.combinations(qp, ax):
                    for ay in range(1, min(j, len(qm)) + 1):
                        for Y in itertools.combinations(qm, ay):
                            for x in X:
                                for y in Y:
                                    phi = WitnessTuple(i, j, X, Y, x, y)
                                    for side in Side:
                                        for st, box in self.boxes_for(u, phi, side):
                                            yield key, phi, side, st, box.freeze()

    # -- queries --------------------------------------------------------------

    def _evaluate(self, u: int) -> SourceResult:
        L = self.L
        out_u = dict(zip(L.out_hubs[u], L.out_dist[u]))
        in_u = dict(zip(L.in_hubs[u], L.in_dist[u]))
        res = {m: ModeResult() for m in DistanceMode}
        S, MN, MX, RT = res[DistanceMode.SOURCE], res[DistanceMode.MIN], res[DistanceMode.MAX], res[DistanceMode.ROUNDTRIP]
        count = 0
        for cls in self.classes.values():
            for px, py, hub_box, size in self._hub_placements(u, cls):
                X = px.members(L.out_hubs[u])
                Y = py.members(L.in_hubs[u])
                if not (X and Y):
                    hub_only = hub_box.view(cls.i + cls.j)
                    if X:
                        # dist(v, u) is not covered: one point per v via t = 0
                        for x, agg in self._one_sided(u, cls, hub_only, forward=True):
                            S.add(out_u[x], agg, CH_F0)
                            MN.add(out_u[x], agg, CH_F0)
                            MX.add_unreachable(agg)
                            RT.add_unreachable(agg)
                            count += agg.count
                    elif Y:
                        for y, agg in self._one_sided(u, cls, hub_only, forward=False):
                            S.add_unreachable(agg)
                            MN.add(in_u[y], agg, CH_F1)
                            MX.add_unreachable(agg)
                            RT.add_unreachable(agg)
                            count += agg.count
                    else:
                        agg = cls.prefix.aggregate(hub_only)
                        for r in res.values():
                            r.add_unreachable_owner(agg)
                        count += agg.count
                    continue
                left = size
                for phi, side, st, box in self._witness_boxes(u, cls, px, py, hub_box):
                    agg = cls.tree(*st).aggregate(box)
                    if not agg.count:
                        continue
                    count += agg.count
                    dx, dy = out_u[phi.x], in_u[phi.y]
                    S.add(dx, agg, CH_F0)
                    RT.add(dx + dy, agg, CH_RT)
                    if side is Side.LE:
                        MN.add(dx, agg, CH_F0)
                        MX.add(dy, agg, CH_F1)
                    else:
                        MN.add(dy, agg, CH_F1)
                        MX.add(dx, agg, CH_F0)
                    left -= agg.count
                    if left <= 0:
                        # the remaining boxes of this placement are empty
                        break
        return SourceResult(res, count)

    def audit_partition(self, u: int) -> int:
        """Sum of count queries over every box of u, with no early exit."""
        total = 0
        for key, phi, side, st, box in self.iter_boxes(u):
            cls = self.classes[key]
            if phi is not None:
                total += cls.tree(*st).count_query(box)
            elif side[0] or side[1]:
                total += sum(a.count for _, a in self._one_sided(u, cls, BoxBuilder.from_box(box), forward=side[0]))
            else:
                total += cls.prefix.count_query(box)
        return total

    def _one_sided(self, u: int, cls: _Class, hub_box: BoxBuilder, forward: bool):
        """Aggregates per least hub when only one direction is covered."""
        L = self.L
        i, j = cls.i, cls.j
        if forward:
            dist_u = dict(zip(L.out_hubs[u], L.out_dist[u]))
            block = range(0, i)
            diff_base = i + j
        else:
            dist_u = dict(zip(L.in_hubs[u], L.in_dist[u]))
            block = range(i, i + j)
            diff_base = 2 * i + j - 1
        pinned = []
        for d in block:
            iv = hub_box.interval(d)
            if iv.lo is not None and iv.lo == iv.hi:
                pinned.append((iv.lo, d - block.start))
        out = []
        for x, lx in pinned:
            b = BoxBuilder(cls.dim, hub_box.c)
            ok = True
            for x2, l2 in pinned:
                if x2 != x:
                    bound = dist_u[x] - dist_u[x2]
                    d = diff_base + _diff_index(l2, lx)
                    ok = (b.gt(d, bound) if x2 < x else b.ge(d, bound)) and ok
            if ok:
                st = (lx, 0) if forward else (0, lx)
                out.append((x, cls.tree(*st).aggregate(b)))
        return out

    def query(self, u: int) -> SourceResult:
        if not 0 <= u < self.n:
            raise GraphError(f"vertex {u} out of range")
        got = self._cache.get(u)
        if got is None:
            got = self._cache[u] = self._evaluate(u)
        return got

    def _require(self, mode) -> DistanceMode:
        mode = DistanceMode.parse(mode)
        if mode not in self.modes:
            raise GraphError(f"engine was not built for mode {mode.value}")
        return mode

    def ecc(self, u: int, mode) -> tuple:
        """(eccentricity, witness vertex) of u."""
        return self.query(u).ecc(self._require(mode))

    def dsum(self, u: int, mode):
        return self.query(u).dsum(self._require(mode))

    def partition_count(self, u: int) -> int:
        return self.query(u).count

    def _all(self) -> list[SourceResult]:
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                return list(pool.map(self.query, range(self.n)))
        return [self.query(u) for u in range(self.n)]

    def all_ecc(self, mode) -> list:
        mode = self._require(mode)
        return [r.ecc(mode)[0] for r in self._all()]

    def all_dsum(self, mode) -> list:
        mode = self._require(mode)
        return [r.dsum(mode) for r in self._all()]

    def diameter(self, mode) -> tuple:
        """(value, u, w): the largest eccentricity, its source and witness."""
        mode = self._require(mode)
        best = None
        for u, r in enumerate(self._all()):
            e, w = r.ecc(mode)
            if best is None or e > best[0]:
                best = (e, u, w)
        return best

    def radius(self, mode) -> tuple:
        """(value, u): the smallest eccentricity and its first centre."""
        mode = self._require(mode)
        best = None
        for u, r in enumerate(self._all()):
            e = r.ecc(mode)[0]
            if best is None or e < best[0]:
                best = (e, u)
        return best

    def median(self, mode) -> tuple:
        """(smallest distance-sum, every vertex attaining it)."""
        sums = self.all_dsum(mode)
        low = min(sums)
        return low, [u for u, s in enumerate(sums) if s == low]

    def wiener(self, mode):
        """Sum of all distance-sums (ordered pairs)."""
        return sum(self.all_dsum(mode))


def build_engine(g: Graph | None, L: HubLabeling, modes=tuple(DistanceMode), **kw) -> Engine:
    return Engine(g, L, modes, **kw)


# -- Source-only engine over single labels -------------------------------------


class SimpleResult:
    """Per-source aggregates of a :class:`SimpleEngine` query."""

    __slots__ = ("ecc", "witness", "count", "powers", "deg_dist", "harary", "rcw")

    def __init__(self, alpha: int):
        self.ecc = None
        self.witness = None
        self.count = 0
        self.powers = [0] * (alpha + 1)
        self.deg_dist = 0
        self.harary = Fraction(0)
        self.rcw = Fraction(0)

    @property
    def dsum(self):
        return self.powers[1] if len(self.powers) > 1 else None


class SimpleEngine:
    """Source-distance engine over the in-labels only.

    For Source distance only X = L+(u) & L-(v) and its least hub x matter,
    so a target contributes the points

        [in-label hub ids (i)] [dIn(q_r, v) - dIn(q_s, v), r != s]

    with channels f = dIn(q_s, v), a zero channel, the powers f^2..f^alpha
    and, when degrees are given, deg(v) and deg(v) * f.  With ``isw`` a
    second tree family appends the coordinate v and keeps only points with
    f != 0; it answers the reciprocal sums (channels f and -f).
    """

    def __init__(
        self,
        L: HubLabeling,
        cap: int = DEFAULT_K_CAP,
        leaf_size: int = 12,
        strategy: str = "pruned",
        alpha: int = 1,
        degrees: Sequence[int] | None = None,
        isw: bool = False,
    ):
        _check_cap(L.k, cap)
        if strategy not in ("pruned", "grouped"):
            raise ValueError(f"unknown strategy {strategy!r}")
        if alpha < 1:
            raise ValueError("alpha must be >= 1")
        self.L = L
        self.n = L.n
        self.strategy = strategy
        self.alpha = alpha
        self.has_deg = degrees is not None
        self.isw = isw
        self.ch_deg = alpha + 1
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(len(L.in_hubs[v]), []).append(v)
        self.classes = {}
        deg = None if degrees is None else np.asarray(degrees, dtype=np.int64)
        for i, members in sorted(groups.items()):
            H, D = _label_arrays(L.in_hubs, L.in_dist, members, i)
            owners = np.array(members, dtype=np.int64)
            zeros = np.zeros(len(members), dtype=np.int64)
            trees, isw_trees = [], []
            for s_ in range(i):
                f = D[:, s_]
                pts = np.hstack([H, _diff_block(D, s_)])
                cols = [f, zeros] + [f ** t for t in range(2, alpha + 1)]
                if deg is not None:
                    dv = deg[owners]
                    cols += [dv, dv * f]
                ch = np.stack(cols, axis=1)
                if any(int(np.abs(c).max(initial=0)) >= (1 << 62) for c in cols):
                    ch = np.stack([np.array([int(x) for x in c], dtype=object) for c in cols], axis=1)
                trees.append(RangeTree(pts, ch, owners, leaf_size=leaf_size, dim=2 * i - 1))
                if isw:
                    keep = f != 0
                    ipts = np.hstack([pts[keep], owners[keep][:, None]])
                    ich = np.stack([f[keep], -f[keep]], axis=1)
                    isw_trees.append(RangeTree(ipts, ich, owners[keep], isw_channel=(0, 1),
                                               leaf_size=leaf_size, dim=2 * i, n_channels=2))
            prefix = RangeTree(H, zeros.reshape(-1, 1), owners, leaf_size=leaf_size, dim=i)
            self.classes[i] = (prefix, trees, isw_trees, H, members)

    def _groups(self, u: int, i: int):
        prefix, trees, _, H, members = self.classes[i]
        specs = [(self.L.out_hubs[u], 0, i)]
        if self.strategy == "grouped":
            for (px,), cnt in realized_placements([H], [specs[0][0]]):
                yield px, placement_box(2 * i - 1, specs, (px,)), cnt
        else:
            for (px,), b, cnt in pruned_placements(prefix, 2 * i - 1, specs, len(members)):
                yield px, b, cnt

    def query(self, u: int, diameter: int | None = None) -> SimpleResult:
        """Aggregates over all targets v of u (including v = u).

        Reciprocal sums skip v = u; ``diameter`` enables the complementary
        reciprocal sum 1 / (diameter + 1 - dist).
        """
        if not 0 <= u < self.n:
            raise GraphError(f"vertex {u} out of range")
        L = self.L
        out_hubs = L.out_hubs[u]
        out_u = dict(zip(out_hubs, L.out_dist[u]))
        res = SimpleResult(self.alpha)
        cutoffs = sorted(out_hubs)
        if self.isw:
            for x, d in out_u.items():
                if x != u:
                    res.harary += Fraction(1, d)
                    if diameter is not None:
                        res.rcw += Fraction(1, diameter + 1 - d)
        binoms = [[math.comb(a, t) for t in range(a + 1)] for a in range(self.alpha + 1)]
        for i, (prefix, trees, isw_trees, H, members) in self.classes.items():
            for px, hub_box, size in self._groups(u, i):
                X = px.members(out_hubs)
                if not X:
                    agg = prefix.aggregate(hub_box.view(i))
                    if agg.count:
                        self._offer(res, INF, agg.maxes[0][1])
                        res.count += agg.count
                        res.powers = [INF] * len(res.powers)
                    continue
                left = size
                for x, lx in X:
                    b = hub_box.copy()
                    ok = True
                    for x2, l2 in X:
                        if x2 != x:
                            bound = out_u[x] - out_u[x2]
                            d = i + _diff_index(l2, lx)
                            ok = (b.gt(d, bound) if x2 < x else b.ge(d, bound)) and ok
                    if not ok:
                        continue
                    agg = trees[lx].aggregate(b)
                    if not agg.count:
                        continue
                    self._absorb(res, out_u[x], agg, binoms)
                    if self.isw:
                        self._reciprocals(res, isw_trees[lx], b, out_u[x], cutoffs, members, diameter)
                    left -= agg.count
                    if left <= 0:
                        break
        return res

    @staticmethod
    def _offer(res: SimpleResult, value, owner: int) -> None:
        if res.ecc is None or value > res.ecc or (value == res.ecc and owner < res.witness):
            res.ecc, res.witness = value, owner

    def _absorb(self, res: SimpleResult, dx: int, agg: Aggregate, binoms) -> None:
        top, owner = agg.maxes[CH_F0]
        self._offer(res, dx + top, owner)
        res.count += agg.count
        # sum_v (dx + f)^a = sum_t C(a, t) dx^(a - t) sum_v f^t
        fsum = [agg.count, agg.sums[0]] + [agg.sums[t] for t in range(2, self.alpha + 1)]
        for a in range(1, self.alpha + 1):
            res.powers[a] += sum(binoms[a][t] * dx ** (a - t) * fsum[t] for t in range(a + 1))
        res.powers[0] += agg.count
        if self.has_deg:
            res.deg_dist += dx * agg.sums[self.ch_deg] + agg.sums[self.ch_deg + 1]

    def _reciprocals(self, res, tree: RangeTree, b: BoxBuilder, dx: int, cutoffs, members, diameter) -> None:
        vdim = tree.d - 1
        # open intervals between consecutive hubs of u; targets in L(u) are
        # covered by the direct label term
        bounds = [None] + cutoffs + [None]
        for lo, hi in zip(bounds, bounds[1:]):
            first = 0 if lo is None else bisect_left(members, lo + 1)
            if first >= len(members) or (hi is not None and members[first] >= hi):
                continue
            sb = BoxBuilder(tree.d, b.c)
            if lo is not None:
                sb.gt(vdim, lo)
            if hi is not None:
                sb.lt(vdim, hi)
            requests = [(dx, 0)] if diameter is None else [(dx, 0), (diameter + 1 - dx, 1)]
            got = tree.isw_many(sb, requests, positive=True)
            res.harary += got[0]
            if diameter is not None:
                res.rcw += got[1]

    def ecc(self, u: int) -> tuple:
        r = self.query(u)
        return r.ecc, r.witness

    def dsum(self, u: int):
        return self.query(u).powers[1]


FastSourceEngine = SimpleEngine


# -- uniform-label bi-chromatic engine -----------------------------------------


class BiEngine:
    """Queries from sources A over targets B when every vertex is labelled
    with the same hub list C in both directions.

    ``to_hubs[v][c]`` is dist(v, C[c]) and ``from_hubs[v][c]`` is
    dist(C[c], v).  With X = Y = C the hub-membership part of the boxes is
    void, so points keep only the difference and comparison coordinates.
    """

    def __init__(self, C: Sequence[int], A: Sequence[int], B: Sequence[int], to_hubs, from_hubs,
                 modes=(DistanceMode.ROUNDTRIP,), leaf_size: int = 12):
        self.C = list(C)
        c = len(self.C)
        if c == 0:
            raise LabelingError("uniform labels need a nonempty hub set")
        for v in itertools.chain(A, B):
            for row in (to_hubs[v], from_hubs[v]):
                if len(row) != c or any(d is INF or (isinstance(d, float) and math.isinf(d)) for d in row):
                    raise LabelingError(f"labels of vertex {v} are not uniform over the hub set")
        self.modes = frozenset(DistanceMode.parse(m) for m in modes)
        self.sides = bool(self.modes & {DistanceMode.MIN, DistanceMode.MAX})
        self.A = list(A)
        self.B = list(B)
        self.to_hubs = to_hubs
        self.from_hubs = from_hubs
        self.c = c
        self.trees = {}
        if self.B:
            Dm = np.array([from_hubs[v] for v in self.B], dtype=np.int64).reshape(len(self.B), c)
            Dp = np.array([to_hubs[v] for v in self.B], dtype=np.int64).reshape(len(self.B), c)
            owners = np.array(self.B, dtype=np.int64)
            zeros = np.zeros(len(self.B), dtype=np.int64)
            for s in range(c):
                for t in range(c):
                    f0, f1 = Dm[:, s], Dp[:, t]
                    pts = np.hstack([_diff_block(Dm, s), _diff_block(Dp, t), (f0 - f1)[:, None]])
                    ch = np.stack([f0, f1, f0 + f1, zeros], axis=1)
                    self.trees[(s, t)] = RangeTree(pts, ch, owners, leaf_size=leaf_size, dim=2 * c - 1)

    def query(self, a: int) -> dict:
        """Per mode (ecc, witness, dsum) over B; ecc is None when B is empty."""
        res = {m: ModeResult() for m in self.modes}
        if not self.B:
            return {m: r.as_tuple() for m, r in res.items()}
        c = self.c
        out_a = self.to_hubs[a]
        in_a = self.from_hubs[a]
        C = self.C
        order = sorted(range(c), key=lambda h: C[h])
        rank = {h: r for r, h in enumerate(order)}
        for x in range(c):
            bx = BoxBuilder(2 * c - 1)
            for x2 in range(c):
                if x2 != x:
                    bound = out_a[x] - out_a[x2]
                    d = _diff_index(x2, x)
                    (bx.gt if rank[x2] < rank[x] else bx.ge)(d, bound)
            for y in range(c):
                by = bx.copy()
                for y2 in range(c):
                    if y2 != y:
                        bound = in_a[y] - in_a[y2]
                        d = c - 1 + _diff_index(y2, y)
                        (by.gt if rank[y2] < rank[y] else by.ge)(d, bound)
                tree = self.trees[(x, y)]
                dx, dy = out_a[x], in_a[y]
                split = dy - dx
                parts = [(None, by)]
                if self.sides:
                    le, gt = by.copy(), by.copy()
                    le.le(2 * c - 2, split)
                    gt.gt(2 * c - 2, split)
                    parts = [(Side.LE, le), (Side.GT, gt)]
                for side, b in parts:
                    box = b.freeze()
                    if box.is_empty():
                        continue
                    agg = tree.aggregate(box)
                    if not agg.count:
                        continue
                    for m, r in res.items():
                        if m is DistanceMode.SOURCE:
                            r.add(dx, agg, CH_F0)
                        elif m is DistanceMode.ROUNDTRIP:
                            r.add(dx + dy, agg, CH_RT)
                        elif (m is DistanceMode.MIN) == (side is Side.LE):
                            r.add(dx, agg, CH_F0)
                        else:
                            r.add(dy, agg, CH_F1)
        return {m: r.as_tuple() for m, r in res.items()}

    def ecc_bi(self, a: int, mode=DistanceMode.ROUNDTRIP) -> tuple:
        e, w, _ = self.query(a)[DistanceMode.parse(mode)]
        return e, w

    def dsum_bi(self, a: int, mode=DistanceMode.ROUNDTRIP):
        return self.query(a)[DistanceMode.parse(mode)][2]


def build_uniform_engine(C, A, B, to_hubs, from_hubs, modes=(DistanceMode.ROUNDTRIP,), **kw) -> BiEngine:
    return BiEngine(C, A, B, to_hubs, from_hubs, modes, **kw)


def uniform_labels(g: Graph, C: Sequence[int], allowed=None) -> tuple[dict, dict]:
    """dist(v, c) and dist(c, v) for every hub c via 2|C| Dijkstra runs."""
    from .graph import dijkstra

    to_hubs: dict[int, list] = {}
    from_hubs: dict[int, list] = {}
    cols_in = [dijkstra(g, c, "in", allowed) for c in C]
    cols_out = [dijkstra(g, c, "out", allowed) for c in C]
    verts = range(g.n) if allowed is None else allowed
    for v in verts:
        to_hubs[v] = [col[v] for col in cols_in]
        from_hubs[v] = [col[v] for col in cols_out]
    return to_hubs, from_hubs
