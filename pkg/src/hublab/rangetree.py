"""Static multi-level range trees with max / sum / count / ISW queries.

A tree over d-dimensional integer points is a balanced search tree on the
first constrained coordinate whose canonical nodes carry associated trees on
the next constrained coordinate, and so on; the last level keeps per-node
aggregates.  Associated structures are materialised on first use and cached,
so unconstrained coordinates cost nothing and memory follows the query load.
Ranges of at most ``leaf_size`` points are scanned directly, and an
equality constraint selects its run of equal keys as one canonical node.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

_INT64_SAFE = (1 << 63) - 1


class RangeTreeError(ValueError):
    pass


class SingularityError(ArithmeticError):
    """An ISW query hit a point with delta + value == 0."""


@dataclass(frozen=True)
class Interval:
    """Interval on one coordinate; ``None`` bounds are infinite."""

    lo: int | None = None
    hi: int | None = None
    lo_open: bool = False
    hi_open: bool = False

    @classmethod
    def point(cls, z: int) -> Interval:
        return cls(z, z)

    def contains(self, x: int) -> bool:
        if self.lo is not None and (x < self.lo or (self.lo_open and x == self.lo)):
            return False
        if self.hi is not None and (x > self.hi or (self.hi_open and x == self.hi)):
            return False
        return True

    @property
    def unbounded(self) -> bool:
        return self.lo is None and self.hi is None

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    def intersect(self, other: Interval) -> Interval:
        lo, lo_open = self.lo, self.lo_open
        if other.lo is not None and (lo is None or other.lo > lo or (other.lo == lo and other.lo_open)):
            lo, lo_open = other.lo, other.lo_open
        hi, hi_open = self.hi, self.hi_open
        if other.hi is not None and (hi is None or other.hi < hi or (other.hi == hi and other.hi_open)):
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def key(self) -> tuple:
        return (self.lo, self.hi, self.lo_open, self.hi_open)


FULL = Interval()


class Box:
    """Axis-parallel box: one :class:`Interval` per coordinate."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Interval]):
        self.intervals = tuple(intervals)

    @classmethod
    def full(cls, d: int) -> Box:
        return cls([FULL] * d)

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def is_empty(self) -> bool:
        return any(iv.is_empty() for iv in self.intervals)

    def contains(self, point: Sequence[int]) -> bool:
        return all(iv.contains(int(x)) for iv, x in zip(self.intervals, point))

    def key(self) -> tuple:
        return tuple(iv.key() for iv in self.intervals)

    def constrained(self):
        return [(d, (iv.lo, iv.lo_open, iv.hi, iv.hi_open)) for d, iv in enumerate(self.intervals) if not iv.unbounded]

    def __eq__(self, other) -> bool:
        return isinstance(other, Box) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Box({list(self.intervals)})"


_FREE = (None, False, None, False)


class BoxBuilder:
    """Mutable box that stores only its constrained coordinates.

    Each entry is ``(lo, lo_open, hi, hi_open)``; trees accept a builder
    wherever they accept a :class:`Box`.
    """

    __slots__ = ("dim", "c")

    def __init__(self, d: int, c: dict | None = None):
        self.dim = d
        self.c = {} if c is None else dict(c)

    def copy(self) -> BoxBuilder:
        return BoxBuilder(self.dim, self.c)

    @classmethod
    def from_box(cls, box: Box) -> BoxBuilder:
        return cls(box.dim, dict(box.constrained()))

    def view(self, d: int) -> BoxBuilder:
        """The same constraints seen as a box of dimension ``d``."""
        if any(k >= d for k in self.c):
            raise RangeTreeError("constraints exceed the requested dimension")
        return BoxBuilder(d, self.c)

    def _lower(self, dim: int, z: int, strict: bool) -> bool:
        lo, lo_open, hi, hi_open = self.c.get(dim, _FREE)
        if lo is None or z > lo or (z == lo and strict):
            lo, lo_open = z, strict
        self.c[dim] = (lo, lo_open, hi, hi_open)
        return hi is None or lo < hi or (lo == hi and not lo_open and not hi_open)

    def _upper(self, dim: int, z: int, strict: bool) -> bool:
        lo, lo_open, hi, hi_open = self.c.get(dim, _FREE)
        if hi is None or z < hi or (z == hi and strict):
            hi, hi_open = z, strict
        self.c[dim] = (lo, lo_open, hi, hi_open)
        return lo is None or lo < hi or (lo == hi and not lo_open and not hi_open)

    def eq(self, dim: int, z: int) -> bool:
        return self._lower(dim, z, False) & self._upper(dim, z, False)

    def lt(self, dim: int, z: int) -> bool:
        return self._upper(dim, z, True)

    def le(self, dim: int, z: int) -> bool:
        return self._upper(dim, z, False)

    def gt(self, dim: int, z: int) -> bool:
        return self._lower(dim, z, True)

    def ge(self, dim: int, z: int) -> bool:
        return self._lower(dim, z, False)

    def add(self, dim: int, iv: Interval) -> bool:
        """Intersect coordinate ``dim`` with ``iv``; False once empty."""
        ok = True
        if iv.lo is not None:
            ok = self._lower(dim, iv.lo, iv.lo_open) and ok
        if iv.hi is not None:
            ok = self._upper(dim, iv.hi, iv.hi_open) and ok
        return ok

    def interval(self, dim: int) -> Interval:
        got = self.c.get(dim)
        return FULL if got is None else Interval(got[0], got[2], got[1], got[3])

    def constrained(self):
        return sorted(self.c.items())

    def is_empty(self) -> bool:
        return any(self.interval(d).is_empty() for d in self.c)

    def freeze(self) -> Box:
        return Box(self.interval(d) for d in range(self.dim))


class Aggregate:
    """Count, per-channel sums and per-channel (max, argmax owner)."""

    __slots__ = ("count", "sums", "maxes")

    def __init__(self, count: int, sums: list[int], maxes: list):
        self.count = count
        self.sums = sums
        self.maxes = maxes

    @classmethod
    def empty(cls, channels: int) -> Aggregate:
        return cls(0, [0] * channels, [None] * channels)

    def merge(self, other: Aggregate) -> None:
        if not other.count:
            return
        self.count += other.count
        for c in range(len(self.sums)):
            self.sums[c] += other.sums[c]
            om = other.maxes[c]
            sm = self.maxes[c]
            if sm is None or om[0] > sm[0] or (om[0] == sm[0] and om[1] < sm[1]):
                self.maxes[c] = om


class RangeTree:
    """Range tree over ``points`` (m x d) with integer value channels.

    ``owners`` tags each point (ties in max queries go to the smaller tag);
    ``isw_channel`` designates the channel used by :meth:`isw_query`.
    """

    def __init__(
        self,
        points,
        channels=None,
        owners=None,
        isw_channel: int | Sequence[int] | None = None,
        leaf_size: int = 12,
        dim: int | None = None,
        n_channels: int | None = None,
    ):
        pts = [list(p) for p in points] if not isinstance(points, np.ndarray) else points
        if isinstance(pts, list):
            dims = {len(p) for p in pts}
            if len(dims) > 1:
                raise RangeTreeError(f"mixed point dimensions {sorted(dims)}")
            d = dims.pop() if dims else (dim or 0)
            pts = np.array(pts, dtype=np.int64).reshape(len(pts), d)
        self.coords = pts
        self.m, self.d = pts.shape
        if dim is not None and self.m and dim != self.d:
            raise RangeTreeError(f"points have dimension {self.d}, expected {dim}")
        if dim is not None:
            self.d = dim
        if self.d < 1:
            raise RangeTreeError("dimension must be >= 1")
        if channels is None or (self.m == 0 and len(channels) == 0):
            channels = np.zeros((self.m, n_channels or 0), dtype=np.int64)
        ch = np.asarray(channels)
        if ch.ndim == 1:
            ch = ch.reshape(-1, 1)
        if ch.shape[0] != self.m:
            raise RangeTreeError("channel rows do not match point count")
        if ch.dtype != object:
            ch = ch.astype(np.int64)
            top = int(np.abs(ch).max()) if ch.size else 0
            if top and top * max(self.m, 1) > _INT64_SAFE:
                ch = ch.astype(object)
        self.channels = ch
        self.nch = ch.shape[1]
        self.owners = np.arange(self.m, dtype=np.int64) if owners is None else np.asarray(owners, dtype=np.int64)
        if isw_channel is None:
            self.isw_channels: tuple[int, ...] = ()
        elif isinstance(isw_channel, (int, np.integer)):
            self.isw_channels = (int(isw_channel),)
        else:
            self.isw_channels = tuple(int(c) for c in isw_channel)
        for c in self.isw_channels:
            if not 0 <= c < self.nch:
                raise RangeTreeError(f"bad ISW channel {c}")
        self.isw_channel = self.isw_channels[0] if self.isw_channels else None
        self.leaf_size = leaf_size
        self._roots: dict[int, _Level] = {}
        self._all = np.arange(self.m, dtype=np.int64)
        self._full_agg: Aggregate | None = None
        self._full_isw = None
        self._colsets: dict = {}

    # -- public queries ----------------------------------------------------

    def aggregate(self, box: Box) -> Aggregate:
        agg = Aggregate.empty(self.nch)
        for piece in self._pieces(box):
            agg.merge(piece.agg(self) if isinstance(piece, _Piece) else self._agg_of(piece))
        return agg

    def max_query(self, box: Box, channel: int = 0):
        self._check_channel(channel)
        return self.aggregate(box).maxes[channel]

    def sum_query(self, box: Box, channel: int = 0) -> int:
        self._check_channel(channel)
        return self.aggregate(box).sums[channel]

    def column_values(self, dim: int) -> frozenset:
        """Distinct values of one coordinate (cached)."""
        got = self._colsets.get(dim)
        if got is None:
            got = self._colsets[dim] = frozenset(np.unique(self.coords[:, dim]).tolist())
        return got

    def count_query(self, box: Box) -> int:
        total = 0
        # counts need no canonical split of the last dimension: one slice per path
        for piece in self._pieces(box, flat_last=True):
            if isinstance(piece, _Piece):
                total += piece.size
            else:
                total += self.m if piece is _WHOLE else len(piece)
        return total

    def isw_query(self, box: Box, delta: int, channel: int | None = None) -> Fraction:
        """Exact sum of 1 / (delta + value) over the matching points."""
        if not self.isw_channels:
            raise RangeTreeError("tree was built without an ISW channel")
        channel = self.isw_channel if channel is None else channel
        if channel not in self.isw_channels:
            raise RangeTreeError(f"channel {channel} is not an ISW channel")
        total = Fraction(0)
        for piece in self._pieces(box):
            vals, counts = piece.isw(self, channel) if isinstance(piece, _Piece) else self._isw_of(piece, channel)
            total += _isw_sum(vals, counts, delta)
        return total

    def isw_many(self, box: Box, requests: Sequence[tuple[int, int]], positive: bool = False) -> list[Fraction]:
        """Several ISW sums ``(delta, channel)`` over one decomposition of box.

        With ``positive`` every denominator must be positive.
        """
        for _, channel in requests:
            if channel not in self.isw_channels:
                raise RangeTreeError(f"channel {channel} is not an ISW channel")
        totals = [Fraction(0) for _ in requests]
        for piece in self._pieces(box):
            for r, (delta, channel) in enumerate(requests):
                vals, counts = piece.isw(self, channel) if isinstance(piece, _Piece) else self._isw_of(piece, channel)
                totals[r] += _isw_sum(vals, counts, delta, positive)
        return totals

    def canonical_nodes(self, box: Box) -> list[np.ndarray]:
        """Point-index sets of the canonical pieces answering ``box``."""
        return [self._piece_idx(p) for p in self._pieces(box)]

    def linear_scan(self, box: Box) -> np.ndarray:
        """Indices of matching points by brute force (testing aid)."""
        return np.array([i for i in range(self.m) if box.contains(self.coords[i])], dtype=np.int64)

    # -- internals ---------------------------------------------------------

    def _check_channel(self, channel: int) -> None:
        if not 0 <= channel < self.nch:
            raise RangeTreeError(f"bad channel index {channel}")

    def _piece_idx(self, piece) -> np.ndarray:
        if isinstance(piece, _Piece):
            return piece.level.idx[piece.lo:piece.hi]
        if piece is _WHOLE:
            return self._all
        return piece

    def _pieces(self, box: Box, flat_last: bool = False) -> list:
        if box.dim != self.d:
            raise RangeTreeError(f"box dimension {box.dim} != tree dimension {self.d}")
        if self.m == 0:
            return []
        # coordinates are integers, so strict bounds become inclusive ones exactly
        dims, los, his = [], [], []
        for dim, (lo, lo_open, hi, hi_open) in box.constrained():
            if lo is not None and lo_open:
                lo += 1
            if hi is not None and hi_open:
                hi -= 1
            if lo is not None:
                if lo > _I64_MAX:
                    return []
                lo = None if lo <= _I64_MIN else lo
            if hi is not None:
                if hi < _I64_MIN:
                    return []
                hi = None if hi >= _I64_MAX else hi
            if lo is not None and hi is not None and lo > hi:
                return []
            if lo is None and hi is None:
                continue
            dims.append(dim)
            los.append(lo)
            his.append(hi)
        if not dims:
            return [_WHOLE]
        root = self._roots.get(dims[0])
        if root is None:
            root = self._roots[dims[0]] = _Level(self, self._all, dims[0])
        out: list = []
        root.query(self, _Cons(dims, los, his, flat_last), 0, out)
        return out

    def _agg_of(self, idx) -> Aggregate:
        if idx is _WHOLE:
            if self._full_agg is None:
                self._full_agg = self._compute_agg(self._all)
            return self._full_agg
        return self._compute_agg(idx)

    def _isw_of(self, idx, channel: int):
        if idx is _WHOLE:
            if self._full_isw is None:
                self._full_isw = {}
            got = self._full_isw.get(channel)
            if got is None:
                got = self._full_isw[channel] = _unique_counts(self.channels[self._all, channel])
            return got
        return _unique_counts(self.channels[idx, channel])

    def _compute_agg(self, idx: np.ndarray) -> Aggregate:
        cnt = len(idx)
        if cnt == 0:
            return Aggregate.empty(self.nch)
        if cnt == 1:
            i = int(idx[0])
            row = [int(x) for x in self.channels[i]]
            owner = int(self.owners[i])
            return Aggregate(1, row, [(x, owner) for x in row])
        block = self.channels[idx]
        if block.dtype == object:
            sums = [sum(int(x) for x in block[:, c]) for c in range(self.nch)]
        else:
            sums = [int(s) for s in block.sum(axis=0)]
        owners = self.owners[idx]
        maxes = []
        for c in range(self.nch):
            col = block[:, c]
            top = col.max()
            maxes.append((int(top), int(owners[col == top].min())))
        return Aggregate(cnt, sums, maxes)


class _WholeSet:
    def __len__(self) -> int:  # pragma: no cover - only used via tree.m
        raise TypeError


_WHOLE = _WholeSet()


class _Piece:
    """Canonical node ``level.idx[lo:hi]`` with cached aggregates."""

    __slots__ = ("level", "lo", "hi")

    def __init__(self, level: _Level, lo: int, hi: int):
        self.level = level
        self.lo = lo
        self.hi = hi

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def agg(self, tree: RangeTree) -> Aggregate:
        key = (self.lo, self.hi)
        cache = self.level.aggs
        got = cache.get(key)
        if got is None:
            got = cache[key] = tree._compute_agg(self.level.idx[self.lo:self.hi])
        return got

    def isw(self, tree: RangeTree, channel: int):
        key = (self.lo, self.hi, channel)
        cache = self.level.aggs
        got = cache.get(key)
        if got is None:
            got = cache[key] = _unique_counts(tree.channels[self.level.idx[self.lo:self.hi], channel])
        return got


class _Level:
    """One level: points sorted on coordinate ``dim``."""

    __slots__ = ("dim", "idx", "keys", "sub", "aggs")

    def __init__(self, tree: RangeTree, idx: np.ndarray, dim: int):
        keys = tree.coords[idx, dim]
        order = np.argsort(keys, kind="stable")
        self.dim = dim
        self.idx = idx[order]
        self.keys = keys[order]
        self.sub: dict = {}
        self.aggs: dict = {}

    def query(self, tree: RangeTree, cons: _Cons, p: int, out: list) -> None:
        lo, hi = cons.los[p], cons.his[p]
        keys = self.keys
        a = 0 if lo is None else int(keys.searchsorted(lo, "left"))
        b = len(keys) if hi is None else int(keys.searchsorted(hi, "right"))
        if a >= b:
            return
        last = p + 1 == len(cons.dims)
        if b - a <= tree.leaf_size and not last:
            cand = self.idx[a:b]
            rd, rlo, rhi = cons.rest(p)
            pts = tree.coords[cand][:, rd]
            mask = ((pts >= rlo) & (pts <= rhi)).all(axis=1)
            if mask.all():
                out.append(cand)
            elif mask.any():
                out.append(cand[mask])
            return
        if last and cons.flat_last:
            out.append(_Piece(self, a, b))
            return
        if lo is not None and lo == hi:
            # an equality range is kept whole; distinct keys never overlap
            self._emit(tree, cons, p, out, a, b, last)
            return
        # canonical decomposition of [a, b) over the implicit balanced tree
        stack = [(0, len(keys))]
        while stack:
            nlo, nhi = stack.pop()
            if nhi <= a or b <= nlo:
                continue
            if a <= nlo and nhi <= b:
                self._emit(tree, cons, p, out, nlo, nhi, last)
                continue
            mid = (nlo + nhi) // 2
            stack.append((mid, nhi))
            stack.append((nlo, mid))

    def _emit(self, tree: RangeTree, cons: _Cons, p: int, out: list, lo: int, hi: int, last: bool) -> None:
        if last:
            out.append(_Piece(self, lo, hi))
            return
        nd = cons.dims[p + 1]
        child = self.sub.get((lo, hi, nd))
        if child is None:
            child = self.sub[(lo, hi, nd)] = _Level(tree, self.idx[lo:hi], nd)
        child.query(tree, cons, p + 1, out)


_I64_MIN = -(1 << 63)
_I64_MAX = (1 << 63) - 1


class _Cons:
    """Constrained dimensions of one query with inclusive integer bounds."""

    __slots__ = ("dims", "los", "his", "flat_last", "_arrs")

    def __init__(self, dims, los, his, flat_last=False):
        self.dims = dims
        self.flat_last = flat_last
        self.los = los
        self.his = his
        self._arrs = None

    def rest(self, p: int):
        """(dims, lo array, hi array) of the dimensions after position p."""
        if self._arrs is None:
            self._arrs = (
                np.array(self.dims, dtype=np.int64),
                np.array([_I64_MIN if x is None else x for x in self.los], dtype=np.int64),
                np.array([_I64_MAX if x is None else x for x in self.his], dtype=np.int64),
            )
        d, lo, hi = self._arrs
        return d[p + 1:], lo[p + 1:], hi[p + 1:]


def _unique_counts(vals):
    if len(vals) == 0:
        return (), ()
    if getattr(vals, "dtype", None) == object:
        vals = np.array([int(v) for v in vals], dtype=object)
        uniq = sorted(set(vals.tolist()))
        counts = [int((vals == u).sum()) for u in uniq]
        return tuple(uniq), tuple(counts)
    uniq, counts = np.unique(vals, return_counts=True)
    return tuple(int(u) for u in uniq), tuple(int(c) for c in counts)


def _isw_sum(vals, counts, delta: int, positive: bool = False) -> Fraction:
    total = Fraction(0)
    for v, c in zip(vals, counts):
        den = delta + v
        if den == 0 or (positive and den < 0):
            raise SingularityError(f"ISW denominator {delta} + {v} = {den} is not allowed")
        total += Fraction(c, den)
    return total


def scan_aggregate(points, channels, owners, box: Box, n_channels: int | None = None):
    """Brute-force reference aggregate (count, sums, maxes) over a point list."""
    nch = n_channels if n_channels is not None else (len(channels[0]) if len(channels) else 0)
    agg = Aggregate.empty(nch)
    for p, ch, o in zip(points, channels, owners):
        if box.contains(p):
            agg.merge(Aggregate(1, [int(x) for x in ch], [(int(x), int(o)) for x in ch]))
    return agg
