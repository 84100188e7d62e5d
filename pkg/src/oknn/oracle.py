"""Brute-force ground truth: full visibility graph plus Dijkstra.

Slow by design and only meant for small scenes in tests and debugging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from .geometry import EPS_GEOM, Point
from .navmesh import Scene

EPS_CROSS = 1e-12


class _Obstacles:
    """Obstacle edges and vertices packed into arrays."""

    def __init__(self, scene: Scene):
        rings = [np.asarray(r, dtype=float) for r in scene.obstacles]
        self.rings = rings
        if rings:
            self.verts = np.concatenate(rings)
            self.a = self.verts
            self.b = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
        else:
            self.verts = np.zeros((0, 2))
            self.a = self.b = np.zeros((0, 2))
        self.boxes = [(r.min(axis=0), r.max(axis=0)) for r in rings]

    def strictly_inside(self, pts: np.ndarray) -> np.ndarray:
        """Which points lie in some obstacle's open interior (farther than EPS_GEOM from its boundary)."""
        out = np.zeros(len(pts), dtype=bool)
        if len(pts) == 0:
            return out
        for ring, (lo, hi) in zip(self.rings, self.boxes):
            cand = np.flatnonzero(
                (pts[:, 0] > lo[0]) & (pts[:, 0] < hi[0]) & (pts[:, 1] > lo[1]) & (pts[:, 1] < hi[1])
            )
            if cand.size == 0:
                continue
            p = pts[cand]
            x, y = p[:, 0:1], p[:, 1:2]
            xi, yi = ring[:, 0], ring[:, 1]
            xj, yj = np.roll(xi, -1), np.roll(yi, -1)
            straddle = (yi > y) != (yj > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            inside = ((straddle & (x < xc)).sum(axis=1) % 2) == 1
            dx, dy = xj - xi, yj - yi
            ll = dx * dx + dy * dy
            t = np.clip(((x - xi) * dx + (y - yi) * dy) / ll, 0.0, 1.0)
            d = np.hypot(xi + t * dx - x, yi + t * dy - y).min(axis=1)
            out[cand] |= inside & (d > EPS_GEOM)
        return out

    def visible(self, p, Q: np.ndarray) -> np.ndarray:
        """Visibility of every row of ``Q`` from point ``p``.

        A segment is blocked when it properly crosses an obstacle edge or when
        some piece of it between obstacle contacts lies inside an obstacle.
        Grazing a vertex or running along an edge is allowed.
        """
        n = len(Q)
        ok = np.ones(n, dtype=bool)
        if n == 0 or len(self.a) == 0:
            return ok
        px, py = float(p[0]), float(p[1])
        A, B = self.a, self.b
        dx = Q[:, 0:1] - px
        dy = Q[:, 1:2] - py
        seg_len = np.hypot(dx, dy)
        # orientation of edge endpoints w.r.t. segment, and of segment endpoints w.r.t. edge
        c1 = dx * (A[:, 1] - py) - dy * (A[:, 0] - px)
        c2 = dx * (B[:, 1] - py) - dy * (B[:, 0] - px)
        ex, ey = B[:, 0] - A[:, 0], B[:, 1] - A[:, 1]
        elen = np.hypot(ex, ey)
        c3 = ex * (py - A[:, 1]) - ey * (px - A[:, 0])
        c3 = np.broadcast_to(c3, c1.shape)
        c4 = ex * (Q[:, 1:2] - A[:, 1]) - ey * (Q[:, 0:1] - A[:, 0])
        tol1 = EPS_GEOM * seg_len
        tol2 = EPS_GEOM * elen
        proper = (((c1 > tol1) & (c2 < -tol1)) | ((c1 < -tol1) & (c2 > tol1))) & (
            ((c3 > tol2) & (c4 < -tol2)) | ((c3 < -tol2) & (c4 > tol2))
        )
        ok &= ~proper.any(axis=1)
        # obstacle vertices touching the open segment split it into pieces
        V = self.verts
        with np.errstate(divide="ignore", invalid="ignore"):
            t = ((V[:, 0] - px) * dx + (V[:, 1] - py) * dy) / (seg_len * seg_len)
        off = np.abs(dx * (V[:, 1] - py) - dy * (V[:, 0] - px))
        touch = (off <= tol1) & (t > 0.0) & (t < 1.0)
        touch &= ok[:, None]
        simple = ok & ~touch.any(axis=1) & (seg_len[:, 0] > 0.0)
        idx = np.flatnonzero(simple)
        if idx.size:
            mid = np.column_stack([px + 0.5 * dx[idx, 0], py + 0.5 * dy[idx, 0]])
            ok[idx] &= ~self.strictly_inside(mid)
        for i in np.flatnonzero(ok & touch.any(axis=1)):
            ts = np.unique(np.concatenate([[0.0, 1.0], t[i][touch[i]]]))
            mids = 0.5 * (ts[:-1] + ts[1:])
            pts = np.column_stack([px + mids * dx[i, 0], py + mids * dy[i, 0]])
            if self.strictly_inside(pts).any():
                ok[i] = False
        return ok


@dataclass
class VisibilityGraph:
    """Nodes are obstacle vertices followed by the extra points."""

    nodes: List[Point]
    weights: np.ndarray  # d_e for co-visible pairs, inf otherwise
    num_obstacle_vertices: int

    def has_edge(self, u: int, v: int) -> bool:
        return bool(np.isfinite(self.weights[u, v]))

    def edges(self) -> List[Tuple[int, int]]:
        iu, iv = np.nonzero(np.isfinite(self.weights))
        return [(int(u), int(v)) for u, v in zip(iu, iv) if u < v]


def build_vg(scene: Scene, extra_points: Sequence = ()) -> VisibilityGraph:
    obs = _Obstacles(scene)
    nodes = [Point(float(x), float(y)) for x, y in obs.verts.tolist()]
    nobs = len(nodes)
    nodes += [Point(float(x), float(y)) for x, y in extra_points]
    pts = np.asarray(nodes, dtype=float).reshape(-1, 2)
    n = len(nodes)
    W = np.full((n, n), np.inf)
    for i in range(n):
        if i + 1 >= n:
            break
        vis = obs.visible(pts[i], pts[i + 1 :])
        d = np.hypot(pts[i + 1 :, 0] - pts[i, 0], pts[i + 1 :, 1] - pts[i, 1])
        row = np.where(vis, d, np.inf)
        W[i, i + 1 :] = row
        W[i + 1 :, i] = row
    np.fill_diagonal(W, 0.0)
    return VisibilityGraph(nodes, W, nobs)


def _shortest(W: np.ndarray, source: int) -> np.ndarray:
    graph = csgraph_from_dense(W, null_value=np.inf)
    return dijkstra(graph, directed=False, indices=source)


def visible_from(scene: Scene, p, points) -> np.ndarray:
    """Boolean array: which of ``points`` are visible from ``p``."""
    return _Obstacles(scene).visible(p, np.asarray(points, dtype=float).reshape(-1, 2))


def is_visible(scene: Scene, p, q) -> bool:
    """True if segment pq does not enter any obstacle's open interior."""
    return bool(_Obstacles(scene).visible(p, np.asarray([q], dtype=float))[0])


def oracle_distance(scene: Scene, q, t) -> Optional[float]:
    """d_o(q, t) by Dijkstra over the visibility graph; None if disconnected."""
    vg = build_vg(scene, [q, t])
    n = len(vg.nodes)
    d = _shortest(vg.weights, n - 2)[n - 1]
    return float(d) if math.isfinite(d) else None


class Oracle:
    """Visibility graph over obstacle vertices and targets, reused across queries."""

    def __init__(self, scene: Scene, targets: Optional[Sequence] = None):
        self.scene = scene
        self.targets = [Point(float(x), float(y)) for x, y in (scene.targets if targets is None else targets)]
        self._obs = _Obstacles(scene)
        self.vg = build_vg(scene, self.targets)
        self._pts = np.asarray(self.vg.nodes, dtype=float).reshape(-1, 2)
        tgt = np.asarray(self.targets, dtype=float).reshape(-1, 2)
        self._blocked_targets = self._obs.strictly_inside(tgt) if len(tgt) else np.zeros(0, dtype=bool)
        self._all_pairs = None

    def distances_from(self, q) -> np.ndarray:
        """Obstacle distance from ``q`` to every target (inf when unreachable)."""
        q = np.asarray(q, dtype=float)
        n = len(self._pts)
        W = np.full((n + 1, n + 1), np.inf)
        W[:n, :n] = self.vg.weights
        vis = self._obs.visible(q, self._pts)
        d = np.hypot(self._pts[:, 0] - q[0], self._pts[:, 1] - q[1])
        row = np.where(vis, d, np.inf)
        W[n, :n] = row
        W[:n, n] = row
        W[n, n] = 0.0
        if self._obs.strictly_inside(q[None, :])[0]:
            return np.full(len(self.targets), np.inf)
        dist = _shortest(W, n)
        out = dist[self.vg.num_obstacle_vertices : n].copy()
        out[self._blocked_targets] = np.inf
        return out

    def distances_to_targets(self, points, target_ids: Sequence[int]) -> np.ndarray:
        """Matrix of obstacle distances, one row per point and one column per target id.

        Uses all-pairs distances between graph nodes, so many points can be
        handled with one visibility pass per node.
        """
        P = np.asarray(points, dtype=float).reshape(-1, 2)
        if self._all_pairs is None:
            graph = csgraph_from_dense(self.vg.weights, null_value=np.inf)
            self._all_pairs = dijkstra(graph, directed=False)
        n = len(self._pts)
        first = np.full((len(P), n), np.inf)
        for v in range(n):
            x, y = self._pts[v]
            vis = self._obs.visible((x, y), P)
            first[:, v] = np.where(vis, np.hypot(P[:, 0] - x, P[:, 1] - y), np.inf)
        base = self.vg.num_obstacle_vertices
        cols = [(first + self._all_pairs[:, base + t][None, :]).min(axis=1) for t in target_ids]
        return np.column_stack(cols) if cols else np.zeros((len(P), 0))

    def distance(self, q, t) -> Optional[float]:
        d = oracle_distance(self.scene, q, t)
        return d

    def knn(self, q, k: int) -> List[Tuple[int, float]]:
        if k < 1:
            raise ValueError("k must be at least 1")
        d = self.distances_from(q)
        order = sorted((float(d[i]), i) for i in range(len(d)) if math.isfinite(d[i]))
        return [(i, dd) for dd, i in order[:k]]


def oracle_knn(scene: Scene, q, k: int) -> List[Tuple[int, float]]:
    """The k nearest targets of ``scene`` by obstacle distance, ties broken by id."""
    return Oracle(scene).knn(q, k)
