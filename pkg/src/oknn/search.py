"""Interval search over a navigation mesh.

A node is a pair (interval on a mesh edge, root): every point of the interval
is visible from the root, and ``g`` is the length of the path that reached the
root.  Expanding a node pushes the interval across the polygon beyond it.
Final nodes carry a target and a point interval ``[t, t]``.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .geometry import EPS_GEOM, Point, Segment
from .heuristics import h_p_raw, h_t, h_v_raw
from .navmesh import NO_NEIGHBOUR, Mesh, NotTraversableError, locate_all

INF = math.inf
ROOT_EPS = 1e-9


class SearchNode:
    __slots__ = (
        "root",
        "root_vertex",
        "left",
        "right",
        "left_vertex",
        "right_vertex",
        "next_polygon",
        "g",
        "f",
        "parent",
        "target",
        "source_target",
        "root_is_query",
    )

    def __init__(
        self,
        root,
        root_vertex,
        left,
        right,
        left_vertex,
        right_vertex,
        next_polygon,
        g,
        parent=None,
        target=None,
        source_target=None,
        root_is_query=False,
    ):
        self.root = root
        self.root_vertex = root_vertex
        self.left = left
        self.right = right
        self.left_vertex = left_vertex
        self.right_vertex = right_vertex
        self.next_polygon = next_polygon
        self.g = g
        self.f = g
        self.parent = parent
        self.target = target
        self.source_target = source_target
        self.root_is_query = root_is_query

    @property
    def interval(self) -> Segment:
        return Segment(Point(*self.left), Point(*self.right))

    @property
    def is_final(self) -> bool:
        return self.target is not None

    def edge_key(self) -> Tuple[int, int]:
        u, v = self.left_vertex, self.right_vertex
        return (u, v) if u < v else (v, u)

    def __repr__(self):
        kind = f"target={self.target}" if self.target is not None else f"edge=({self.left_vertex},{self.right_vertex})"
        return (
            f"SearchNode(root={tuple(self.root)}, I=[{tuple(self.left)}, {tuple(self.right)}], "
            f"{kind}, next={self.next_polygon}, g={self.g:.6g}, f={self.f:.6g})"
        )


def _child(node, root, root_vertex, left, right, lv, rv, poly, g):
    return SearchNode(
        root,
        root_vertex,
        left,
        right,
        lv,
        rv,
        poly,
        g,
        node,
        None,
        node.source_target,
        node.root_is_query and root_vertex == node.root_vertex and root == node.root,
    )


def _final(node, root, root_vertex, t, tid, g):
    return SearchNode(
        root,
        root_vertex,
        t,
        t,
        -1,
        -1,
        node.next_polygon,
        g,
        node,
        tid,
        node.source_target,
        node.root_is_query and root == node.root,
    )


def successors(mesh: Mesh, node: SearchNode, goals=None) -> List[SearchNode]:
    """Observable and non-observable successors of ``node``.

    ``goals`` maps polygon id to ``[(target id, point)]``; targets inside the
    polygon being entered produce final nodes.
    """
    out: List[SearchNode] = []
    if node.target is not None:
        return out
    _expand(mesh, node, goals, out)
    return out


def _expand(mesh: Mesh, node: SearchNode, goals, out: list):
    P = node.next_polygon
    if P == NO_NEIGHBOUR:
        return
    poly = mesh.polygons[P]
    ring = poly.vertex_ids
    nbrs = poly.neighbor_ids
    n = len(ring)
    verts = mesh.vertices
    is_corner = mesh.is_corner
    i = mesh.ring_position[P][node.left_vertex]
    m = n - 1
    ids = [ring[(i + 1 + j) % n] for j in range(n)]
    W = [verts[v] for v in ids]
    edge_nb = [nbrs[(i + 1 + j) % n] for j in range(m)]
    r = node.root
    rx, ry = r
    L = node.left
    R = node.right
    lvid, rvid = node.left_vertex, node.right_vertex
    Lv = W[m]
    Rv = W[0]
    g = node.g
    poly_goals = goals.get(P) if goals else None

    right_corner = is_corner[rvid] and abs(R[0] - Rv[0]) <= EPS_GEOM and abs(R[1] - Rv[1]) <= EPS_GEOM
    left_corner = is_corner[lvid] and abs(L[0] - Lv[0]) <= EPS_GEOM and abs(L[1] - Lv[1]) <= EPS_GEOM

    ex, ey = Rv[0] - Lv[0], Rv[1] - Lv[1]
    elen = math.hypot(ex, ey)
    side = ex * (ry - Lv[1]) - ey * (rx - Lv[0])
    if side >= -EPS_GEOM * elen:
        _expand_collinear(node, r, L, R, Lv, Rv, lvid, rvid, left_corner, right_corner, ids, W, edge_nb, g, poly_goals, out)
        return

    # right boundary ray r -> R: positions [0, sR) of the chain lie strictly right of it
    dxr, dyr = R[0] - rx, R[1] - ry
    tol_r = EPS_GEOM * math.hypot(dxr, dyr)
    sr_vals = [dxr * (w[1] - ry) - dyr * (w[0] - rx) for w in W]
    last = -1
    for k in range(m, -1, -1):
        if sr_vals[k] < -tol_r:
            last = k
            break
    if last < 0:
        sR = 0.0
    elif last >= m:
        sR = float(m)
    elif sr_vals[last + 1] <= tol_r:
        sR = float(last + 1)
    else:
        a, b = sr_vals[last], sr_vals[last + 1]
        sR = _snap(last, a / (a - b), W)

    dxl, dyl = L[0] - rx, L[1] - ry
    tol_l = EPS_GEOM * math.hypot(dxl, dyl)
    sl_vals = [dxl * (w[1] - ry) - dyl * (w[0] - rx) for w in W]
    first = n
    for k in range(n):
        if sl_vals[k] > tol_l:
            first = k
            break
    if first >= n:
        sL = float(m)
    elif first == 0:
        sL = 0.0
    elif sl_vals[first - 1] >= -tol_l:
        sL = float(first - 1)
    else:
        a, b = sl_vals[first - 1], sl_vals[first]
        sL = _snap(first - 1, a / (a - b), W)
    if sR > sL:
        sR = sL = 0.5 * (sR + sL)

    gR = g + math.hypot(Rv[0] - rx, Rv[1] - ry) if right_corner else 0.0
    gL = g + math.hypot(Lv[0] - rx, Lv[1] - ry) if left_corner else 0.0
    for j in range(m):
        nb = edge_nb[j]
        if nb == NO_NEIGHBOUR:
            continue
        lo, hi = float(j), float(j + 1)
        wj, wk = ids[j], ids[j + 1]
        if right_corner and sR > lo:
            _emit(node, Rv, rvid, lo, min(hi, sR), j, W, wj, wk, nb, gR, is_corner, out)
        o0 = sR if sR > lo else lo
        o1 = sL if sL < hi else hi
        if o0 <= o1:
            _emit(node, r, node.root_vertex, o0, o1, j, W, wj, wk, nb, g, is_corner, out)
        if left_corner and sL < hi:
            _emit(node, Lv, lvid, max(lo, sL), hi, j, W, wj, wk, nb, gL, is_corner, out)

    if poly_goals:
        for tid, t in poly_goals:
            sr = dxr * (t[1] - ry) - dyr * (t[0] - rx)
            if sr < -tol_r:
                if right_corner:
                    out.append(_final(node, Rv, rvid, t, tid, gR))
                continue
            sl = dxl * (t[1] - ry) - dyl * (t[0] - rx)
            if sl > tol_l:
                if left_corner:
                    out.append(_final(node, Lv, lvid, t, tid, gL))
                continue
            out.append(_final(node, r, node.root_vertex, t, tid, g))


def _snap(k: int, t: float, W) -> float:
    """Chain position k + t, snapped to a vertex when within EPS_GEOM of it."""
    a, b = W[k], W[k + 1]
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    if t * length <= EPS_GEOM:
        return float(k)
    if (1.0 - t) * length <= EPS_GEOM:
        return float(k + 1)
    return k + t


def _at(s: float, j: int, W):
    if s == j:
        return W[j]
    if s == j + 1:
        return W[j + 1]
    t = s - j
    a, b = W[j], W[j + 1]
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def _emit(node, root, root_vertex, s0, s1, j, W, wj, wk, nb, g, is_corner, out):
    right = _at(s0, j, W)
    left = _at(s1, j, W)
    if s0 == s1 or math.hypot(left[0] - right[0], left[1] - right[1]) < EPS_GEOM:
        # point interval: only useful when it sits on a corner the path can turn around
        if s0 == j or s1 == j:
            v, p = wj, W[j]
        elif s0 == j + 1 or s1 == j + 1:
            v, p = wk, W[j + 1]
        else:
            return
        if not is_corner[v]:
            return
        left = right = p
    out.append(_child(node, root, root_vertex, left, right, wk, wj, nb, g))


def _expand_collinear(node, r, L, R, Lv, Rv, lvid, rvid, left_corner, right_corner, ids, W, edge_nb, g, poly_goals, out):
    """Root on the supporting line of the interval: the whole polygon is in view of one point."""
    m = len(W) - 1
    ux, uy = L[0] - R[0], L[1] - R[1]
    ll = ux * ux + uy * uy
    t = ((r[0] - R[0]) * ux + (r[1] - R[1]) * uy) / ll if ll > 0.0 else 0.0
    slack = EPS_GEOM / math.sqrt(ll) if ll > 0.0 else INF
    if ll == 0.0 and math.hypot(r[0] - R[0], r[1] - R[1]) > EPS_GEOM:
        t = -1.0 if math.hypot(r[0] - Rv[0], r[1] - Rv[1]) <= math.hypot(r[0] - Lv[0], r[1] - Lv[1]) else 2.0
        slack = 0.0
    if -slack <= t <= 1.0 + slack:
        root, rv_id, g2 = r, node.root_vertex, g
    elif t < 0.0:
        if not right_corner:
            return
        root, rv_id = Rv, rvid
        g2 = g + math.hypot(Rv[0] - r[0], Rv[1] - r[1])
    else:
        if not left_corner:
            return
        root, rv_id = Lv, lvid
        g2 = g + math.hypot(Lv[0] - r[0], Lv[1] - r[1])
    for j in range(m):
        nb = edge_nb[j]
        if nb == NO_NEIGHBOUR:
            continue
        out.append(_child(node, root, rv_id, W[j + 1], W[j], ids[j + 1], ids[j], nb, g2))
    if poly_goals:
        for tid, tp in poly_goals:
            out.append(_final(node, root, rv_id, tp, tid, g2))


# ---------------------------------------------------------------------------
# start nodes


def vertex_at(mesh: Mesh, p, polys: Iterable[int]) -> int:
    for pid in polys:
        for v in mesh.polygons[pid].vertex_ids:
            w = mesh.vertices[v]
            if abs(w[0] - p[0]) <= EPS_GEOM and abs(w[1] - p[1]) <= EPS_GEOM:
                return v
    return -1


def start_nodes(mesh: Mesh, p, goals=None, source_target=None) -> List[SearchNode]:
    """Nodes rooted at ``p`` for every edge of its containing polygon(s), plus
    final nodes for targets sharing a polygon with ``p``.

    Raises :class:`NotTraversableError` if ``p`` is in no polygon.
    """
    polys = locate_all(mesh, p)
    if not polys:
        raise NotTraversableError(f"point {tuple(p)} is not in traversable space")
    p = Point(float(p[0]), float(p[1]))
    rv = vertex_at(mesh, p, polys)
    if rv >= 0:
        p = mesh.vertices[rv]
    verts = mesh.vertices
    out = []
    seen = set()
    for pid in polys:
        poly = mesh.polygons[pid]
        ring = poly.vertex_ids
        n = len(ring)
        for k in range(n):
            nb = poly.neighbor_ids[k]
            if nb == NO_NEIGHBOUR:
                continue
            u, v = ring[k], ring[(k + 1) % n]
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            U, V = verts[u], verts[v]
            if _on_segment(p, U, V):
                continue
            seen.add(key)
            out.append(SearchNode(p, rv, V, U, v, u, nb, 0.0, None, None, source_target, True))
    if goals:
        done = set()
        for pid in polys:
            for tid, t in goals.get(pid, ()):
                if tid in done:
                    continue
                done.add(tid)
                node = SearchNode(p, rv, t, t, -1, -1, pid, 0.0, None, tid, source_target, True)
                out.append(node)
    return out


def _on_segment(p, a, b) -> bool:
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(a[0] + t * dx - p[0], a[1] + t * dy - p[1]) <= EPS_GEOM


# ---------------------------------------------------------------------------
# best-first engine


@dataclass
class SearchTrace:
    expansions: int = 0
    generated: int = 0
    pushed: int = 0
    root_pruned: int = 0
    heuristic_evals: int = 0
    heuristic_time: float = 0.0
    popped_f: Optional[List[float]] = None
    # smallest f(child) - f(parent) seen over all generated children
    min_f_step: float = INF
    exhausted: bool = False

    def add(self, other: "SearchTrace"):
        self.expansions += other.expansions
        self.generated += other.generated
        self.pushed += other.pushed
        self.root_pruned += other.root_pruned
        self.heuristic_evals += other.heuristic_evals
        self.heuristic_time += other.heuristic_time
        self.min_f_step = min(self.min_f_step, other.min_f_step)


def root_pruning(best_g: Dict[int, float], node: SearchNode, eps: float = ROOT_EPS) -> bool:
    """True if ``node`` should be kept; records its g for its root vertex.

    Nodes rooted off-mesh-vertices (the query or a target) are never pruned.
    """
    v = node.root_vertex
    if v < 0:
        return True
    best = best_g.get(v)
    if best is None or node.g < best:
        best_g[v] = node.g
        return True
    return node.g <= best + eps


def run_best_first(
    mesh: Mesh,
    start: Sequence[SearchNode],
    evaluate: Callable[[SearchNode, Optional[SearchNode]], float],
    termination: Optional[Callable[[SearchNode], bool]] = None,
    pruners: Sequence[Callable[[SearchNode], bool]] = (),
    goals=None,
    use_root_pruning: bool = True,
    record_f: bool = False,
    trace: Optional[SearchTrace] = None,
    best_g: Optional[Dict[int, float]] = None,
) -> SearchTrace:
    """Expand nodes in order of f (ties: larger g first).

    ``evaluate(node, parent)`` returns f; ``termination(node)`` is called on
    every popped node and stops the search when it returns True; each pruner
    is called on popped non-final nodes and a False result discards the node
    instead of expanding it.  Final nodes are never expanded.
    """
    if trace is None:
        trace = SearchTrace()
    if record_f and trace.popped_f is None:
        trace.popped_f = []
    if best_g is None:
        best_g = {}
    heap = []
    counter = itertools.count()
    clock = time.perf_counter
    push = heapq.heappush
    pop = heapq.heappop

    for node in start:
        if use_root_pruning and not root_pruning(best_g, node):
            trace.root_pruned += 1
            continue
        t0 = clock()
        node.f = evaluate(node, None)
        trace.heuristic_time += clock() - t0
        trace.heuristic_evals += 1
        push(heap, (node.f, -node.g, next(counter), node))
        trace.pushed += 1

    children: List[SearchNode] = []
    while heap:
        f, _, _, node = pop(heap)
        if use_root_pruning and node.root_vertex >= 0 and best_g.get(node.root_vertex, INF) + ROOT_EPS < node.g:
            trace.root_pruned += 1
            continue
        trace.expansions += 1
        if record_f:
            trace.popped_f.append(f)
        if termination is not None and termination(node):
            return trace
        if node.target is not None:
            continue
        if pruners and not all(p(node) for p in pruners):
            continue
        children.clear()
        _expand(mesh, node, goals, children)
        trace.generated += len(children)
        for child in children:
            if use_root_pruning and child.root_vertex >= 0 and not root_pruning(best_g, child):
                trace.root_pruned += 1
                continue
            t0 = clock()
            cf = evaluate(child, node)
            trace.heuristic_time += clock() - t0
            trace.heuristic_evals += 1
            child.f = cf
            step = cf - f
            if step < trace.min_f_step:
                trace.min_f_step = step
            push(heap, (cf, -child.g, next(counter), child))
            trace.pushed += 1
    trace.exhausted = True
    return trace


def node_path(node: SearchNode, end=None) -> List[Point]:
    """Turning points from the start to ``end`` (default: the node's own interval point)."""
    pts = []
    cur = node
    while cur is not None:
        r = Point(*cur.root)
        if not pts or pts[-1] != r:
            pts.append(r)
        cur = cur.parent
    pts.reverse()
    if end is None:
        end = node.left
    end = Point(*end)
    if pts[-1] != end:
        pts.append(end)
    return pts


# ---------------------------------------------------------------------------
# point-to-point


def point_to_point(mesh: Mesh, q, t, trace: Optional[SearchTrace] = None, record_f: bool = False):
    """Shortest obstacle-avoiding path from ``q`` to ``t``.

    Returns ``(distance, path)`` or None when ``t`` is unreachable.  Raises
    :class:`NotTraversableError` if ``q`` is not traversable.
    """
    t = Point(float(t[0]), float(t[1]))
    goal_polys = locate_all(mesh, t)
    goals = {pid: [(0, t)] for pid in goal_polys}
    starts = start_nodes(mesh, q, goals)
    if not goal_polys:
        return None
    found = []
    tx, ty = t

    def evaluate(node, parent):
        if node.target is not None:
            return node.g + math.hypot(tx - node.root[0], ty - node.root[1])
        return node.g + h_p_raw(node.root, node.left, node.right, t)

    def termination(node):
        if node.target is not None:
            found.append(node)
            return True
        return False

    trace = run_best_first(mesh, starts, evaluate, termination, goals=goals, trace=trace, record_f=record_f)
    if not found:
        return None
    node = found[0]
    d = node.g + math.hypot(tx - node.root[0], ty - node.root[1])
    return d, node_path(node, t)


# ---------------------------------------------------------------------------
# multi-target k nearest neighbours


@dataclass
class Neighbour:
    target: int
    distance: float
    path: List[Point] = field(default_factory=list)


@dataclass
class QueryResult:
    """Answer to one kNN query, nearest first, plus search counters."""

    k: int
    neighbours: List[Neighbour] = field(default_factory=list)
    complete: bool = True
    expansions: int = 0
    generated: int = 0
    heuristic_evals: int = 0
    heuristic_time: float = 0.0
    total_time: float = 0.0
    false_hits: int = 0
    searches: int = 0
    labels_touched: int = 0
    min_f_step: float = INF

    @property
    def distances(self) -> List[float]:
        return [n.distance for n in self.neighbours]

    @property
    def targets(self) -> List[int]:
        return [n.target for n in self.neighbours]

    def take_trace(self, trace: SearchTrace):
        self.expansions += trace.expansions
        self.generated += trace.generated
        self.heuristic_evals += trace.heuristic_evals
        self.heuristic_time += trace.heuristic_time
        self.min_f_step = min(self.min_f_step, trace.min_f_step)


def multi_target_search(mesh: Mesh, target_set, q, k: int, evaluate, goals=None, on_retrieve=None, record_f=False):
    """Best-first kNN search; a target is retrieved when its first final node is popped."""
    if k < 1:
        raise ValueError("k must be at least 1")
    t_start = time.perf_counter()
    if goals is None:
        goals = target_set.goals(mesh)
    starts = start_nodes(mesh, q, goals)
    result = QueryResult(k)
    retrieved = {}

    def termination(node):
        if node.target is None or node.target in retrieved:
            return False
        tgt = target_set.points[node.target]
        d = node.g + math.hypot(tgt[0] - node.root[0], tgt[1] - node.root[1])
        retrieved[node.target] = node
        result.neighbours.append(Neighbour(node.target, d, node_path(node, tgt)))
        if on_retrieve is not None:
            on_retrieve(node.target)
        return len(retrieved) >= k

    trace = run_best_first(mesh, starts, evaluate, termination, goals=goals, record_f=record_f)
    result.take_trace(trace)
    result.complete = len(result.neighbours) >= k
    result.total_time = time.perf_counter() - t_start
    result.trace = trace
    return result


def knn_hv(mesh: Mesh, target_set, q, k: int, record_f: bool = False) -> QueryResult:
    """kNN with the interval heuristic: f = g + distance from root to interval."""
    points = target_set.points

    def evaluate(node, parent):
        if node.target is not None:
            t = points[node.target]
            return node.g + math.hypot(t[0] - node.root[0], t[1] - node.root[1])
        return node.g + h_v_raw(node.root, node.left, node.right)

    return multi_target_search(mesh, target_set, q, k, evaluate, record_f=record_f)


def knn_ht(mesh: Mesh, target_set, q, k: int, debug: bool = False, stats=None, record_f: bool = False) -> QueryResult:
    """kNN with the target heuristic over the targets not yet retrieved.

    Open nodes keep the f they were pushed with; as targets are retrieved the
    stored values stay valid lower bounds because the minimum only grows.
    """
    points = target_set.points
    retrieved = set()

    def evaluate(node, parent):
        if node.target is not None:
            t = points[node.target]
            return node.g + math.hypot(t[0] - node.root[0], t[1] - node.root[1])
        if len(retrieved) >= len(points):
            return node.g + h_v_raw(node.root, node.left, node.right)
        return node.g + h_t(node, target_set, retrieved, debug=debug, stats=stats)

    return multi_target_search(mesh, target_set, q, k, evaluate, on_retrieve=retrieved.add, record_f=record_f)
