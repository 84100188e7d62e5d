"""Target sets and a packed R-tree with incremental nearest-neighbour search."""

from __future__ import annotations

import hashlib
import heapq
import math
import struct
from typing import Iterator, List, Optional, Sequence, Tuple

from .geometry import Point

NODE_CAPACITY = 8


class RTree:
    """Static R-tree bulk-loaded with Sort-Tile-Recursive packing.

    Leaves hold point ids.  ``incremental(p)`` streams ``(id, distance)`` in
    nondecreasing distance with ties broken by id.
    """

    def __init__(self, points: Sequence, capacity: int = NODE_CAPACITY):
        self.points = [(float(x), float(y)) for x, y in points]
        self.capacity = capacity
        # each node: (xmin, ymin, xmax, ymax, is_leaf, children)
        self.nodes: List[tuple] = []
        self.root: Optional[int] = None
        if self.points:
            self._build()

    def _build(self):
        cap = self.capacity
        level = []
        for chunk in _str_groups(list(range(len(self.points))), lambda i: self.points[i], cap):
            xs = [self.points[i][0] for i in chunk]
            ys = [self.points[i][1] for i in chunk]
            level.append(self._add(min(xs), min(ys), max(xs), max(ys), True, tuple(chunk)))
        while len(level) > 1:
            nxt = []
            centre = lambda n: ((self.nodes[n][0] + self.nodes[n][2]) / 2, (self.nodes[n][1] + self.nodes[n][3]) / 2)
            for chunk in _str_groups(level, centre, cap):
                boxes = [self.nodes[n] for n in chunk]
                nxt.append(
                    self._add(
                        min(b[0] for b in boxes),
                        min(b[1] for b in boxes),
                        max(b[2] for b in boxes),
                        max(b[3] for b in boxes),
                        False,
                        tuple(chunk),
                    )
                )
            level = nxt
        self.root = level[0]

    def _add(self, x0, y0, x1, y1, leaf, children) -> int:
        self.nodes.append((x0, y0, x1, y1, leaf, children))
        return len(self.nodes) - 1

    def __len__(self):
        return len(self.points)

    def incremental(self, p) -> Iterator[Tuple[int, float]]:
        """Resumable stream of ``(id, d_e(p, point))`` in nondecreasing distance."""
        if self.root is None:
            return
        px, py = p
        nodes, pts = self.nodes, self.points
        # nodes sort before points at equal distance so id ties resolve correctly
        heap = [(0.0, 0, self.root)]
        while heap:
            d, kind, ident = heapq.heappop(heap)
            if kind == 1:
                yield ident, d
                continue
            x0, y0, x1, y1, leaf, children = nodes[ident]
            if leaf:
                for i in children:
                    qx, qy = pts[i]
                    heapq.heappush(heap, (math.hypot(qx - px, qy - py), 1, i))
            else:
                for c in children:
                    b = nodes[c]
                    dx = b[0] - px if px < b[0] else (px - b[2] if px > b[2] else 0.0)
                    dy = b[1] - py if py < b[1] else (py - b[3] if py > b[3] else 0.0)
                    heapq.heappush(heap, (math.hypot(dx, dy), 0, c))

    def nearest(self, p, k: int, skip=()) -> List[Tuple[int, float]]:
        out = []
        if k <= 0:
            return out
        for i, d in self.incremental(p):
            if i in skip:
                continue
            out.append((i, d))
            if len(out) >= k:
                break
        return out


def _str_groups(items, key, cap):
    """Sort-Tile-Recursive grouping of ``items`` into runs of at most ``cap``."""
    n = len(items)
    if n <= cap:
        return [items]
    leaves = math.ceil(n / cap)
    slices = math.ceil(math.sqrt(leaves))
    per_slice = slices * cap
    by_x = sorted(items, key=lambda i: (key(i)[0], key(i)[1]))
    groups = []
    for s in range(0, n, per_slice):
        strip = sorted(by_x[s : s + per_slice], key=lambda i: (key(i)[1], key(i)[0]))
        for c in range(0, len(strip), cap):
            groups.append(strip[c : c + cap])
    return groups


class TargetSet:
    """Candidate points with an incremental Euclidean nearest-neighbour index."""

    def __init__(self, points: Sequence):
        self.points: List[Point] = [Point(float(x), float(y)) for x, y in points]
        self.index = RTree(self.points)
        self._goal_cache = {}

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(enumerate(self.points))

    @property
    def targets(self) -> List[Tuple[int, Point]]:
        return list(enumerate(self.points))

    def incremental(self, q) -> Iterator[Tuple[int, float]]:
        return self.index.incremental(q)

    def digest(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        for p in self.points:
            h.update(struct.pack("<dd", p.x, p.y))
        return h.digest()

    def goals(self, mesh):
        """Map polygon id -> [(target id, point)] for every polygon containing a target."""
        key = id(mesh)
        cached = self._goal_cache.get(key)
        if cached is not None and cached[0] is mesh:
            return cached[1]
        from .navmesh import locate_all

        goals = {}
        for tid, p in enumerate(self.points):
            for pid in locate_all(mesh, p):
                goals.setdefault(pid, []).append((tid, p))
        self._goal_cache[key] = (mesh, goals)
        return goals
