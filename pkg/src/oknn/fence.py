"""Fence labels: offline preprocessing and the queries that use it.

Preprocessing floods the mesh from every target at once.  Each mesh edge
keeps the flood nodes that crossed it and were not dominated by another node
on the same edge; these are the edge's labels.  A label remembers its root and
``g_p``, the obstacle distance from that root back to its source target.
"""

from __future__ import annotations

import math
import struct
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .geometry import Point
from .heuristics import h_p_raw, h_v_raw
from .navmesh import NO_NEIGHBOUR, Mesh, NotTraversableError, locate_all, mesh_hash
from .search import (
    QueryResult,
    SearchNode,
    multi_target_search,
    point_to_point,
    run_best_first,
    start_nodes,
)

INF = math.inf
MAGIC = b"FNCE"
FORMAT_VERSION = 1
_LABEL = struct.Struct("<8dI")


class FenceLabel(NamedTuple):
    """A surviving flood node on an edge.  ``a`` is the interval end nearer the
    edge's lower-id vertex, ``b`` the one nearer the higher-id vertex."""

    root: Point
    a: Point
    b: Point
    g_p: float
    source_target: int
    minmax: float
    mindist: float

    @property
    def interval(self):
        return (self.a, self.b)


@dataclass
class Fence:
    edge_id: int
    labels: List[FenceLabel] = field(default_factory=list)
    upper_bound: float = INF

    def recompute_upper_bound(self):
        self.upper_bound = min((lab.g_p + lab.minmax for lab in self.labels), default=INF)


class StaleStoreError(ValueError):
    pass


class StoreFormatError(ValueError):
    pass


@dataclass
class FenceStore:
    fences: Dict[int, Fence]
    mesh_hash: bytes
    targets_hash: bytes
    stats: dict = field(default_factory=dict)
    # (edge id, dominating label, dominated label) pairs seen while building, if recorded
    dominance_pairs: list = field(default_factory=list)

    def labels(self, edge_id: int) -> List[FenceLabel]:
        fence = self.fences.get(edge_id)
        return fence.labels if fence is not None else []

    def histogram(self) -> Dict[int, int]:
        """Number of fenced edges by label count."""
        return dict(sorted(Counter(len(f.labels) for f in self.fences.values() if f.labels).items()))

    def total_labels(self) -> int:
        return sum(len(f.labels) for f in self.fences.values())


def mindist_minmaxdist(root, a, b, A, B) -> Tuple[float, float]:
    """(distance from root to [a, b], max(|ra| + |aA|, |rb| + |bB|)).

    ``a`` must be the interval end nearer ``A``.
    """
    md = h_v_raw(root, a, b)
    mm = max(
        math.hypot(a[0] - root[0], a[1] - root[1]) + math.hypot(A[0] - a[0], A[1] - a[1]),
        math.hypot(b[0] - root[0], b[1] - root[1]) + math.hypot(B[0] - b[0], B[1] - b[1]),
    )
    return md, mm


def dominates(g1: float, minmax1: float, g2: float, mindist2: float) -> bool:
    return g1 + minmax1 <= g2 + mindist2


def label_dominates(n1: FenceLabel, n2: FenceLabel) -> bool:
    return dominates(n1.g_p, n1.minmax, n2.g_p, n2.mindist)


def _orient_to_edge(mesh: Mesh, node: SearchNode):
    """Edge id, A, B and the node's interval ends ordered (a near A, b near B)."""
    u, v = node.left_vertex, node.right_vertex
    if u < v:
        A, B = mesh.vertices[u], mesh.vertices[v]
        a, b = node.left, node.right
    else:
        A, B = mesh.vertices[v], mesh.vertices[u]
        a, b = node.right, node.left
    return mesh.edge_id(u, v), A, B, Point(*a), Point(*b)


def preprocess(mesh: Mesh, target_set, blocking: bool = True, record_pairs: bool = False) -> FenceStore:
    """Multi-source flood from all targets ordered by g + h_v.

    Before a node is expanded its edge's fence may block it (g + mindist >=
    upper bound).  Otherwise it becomes a label, evicts the labels it
    dominates and is expanded.  Root pruning is shared by all sources.
    """
    t0 = time.perf_counter()
    fences: Dict[int, Fence] = {}
    starts = []
    for tid, t in enumerate(target_set.points):
        if not locate_all(mesh, t):
            continue
        starts.extend(start_nodes(mesh, t, source_target=tid))
    pairs = [] if record_pairs else None
    counts = Counter()

    def evaluate(node, parent):
        return node.g + h_v_raw(node.root, node.left, node.right)

    def on_pop(node):
        eid, A, B, a, b = _orient_to_edge(mesh, node)
        md, mm = mindist_minmaxdist(node.root, a, b, A, B)
        fence = fences.get(eid)
        if fence is None:
            fence = fences[eid] = Fence(eid)
        lab = FenceLabel(Point(*node.root), a, b, node.g, node.source_target, mm, md)
        if blocking and node.g + md >= fence.upper_bound:
            counts["blocked"] += 1
            if pairs is not None:
                best = min(fence.labels, key=lambda x: x.g_p + x.minmax)
                pairs.append((eid, best, lab))
            return False
        if blocking:
            keep = []
            for old in fence.labels:
                if lab.g_p + lab.minmax <= old.g_p + old.mindist:
                    counts["evicted"] += 1
                    if pairs is not None:
                        pairs.append((eid, lab, old))
                else:
                    keep.append(old)
            keep.append(lab)
            fence.labels = keep
            fence.recompute_upper_bound()
        else:
            fence.labels.append(lab)
        return True

    trace = run_best_first(mesh, starts, evaluate, pruners=(on_pop,))
    store = FenceStore(
        {eid: f for eid, f in fences.items()},
        mesh_hash(mesh),
        target_set.digest(),
        dominance_pairs=pairs if pairs is not None else [],
    )
    store.stats = {
        "build_seconds": time.perf_counter() - t0,
        "expansions": trace.expansions,
        "generated": trace.generated,
        "blocked": counts["blocked"],
        "evicted": counts["evicted"],
        "labels": store.total_labels(),
        "fenced_edges": sum(1 for f in fences.values() if f.labels),
        "histogram": store.histogram(),
    }
    return store


# ---------------------------------------------------------------------------
# persistence


def save_store(store: FenceStore, mesh: Mesh) -> bytes:
    out = [MAGIC, struct.pack("<I", FORMAT_VERSION), store.mesh_hash, store.targets_hash]
    out.append(struct.pack("<I", len(mesh.edges)))
    for eid in range(len(mesh.edges)):
        labels = store.labels(eid)
        out.append(struct.pack("<I", len(labels)))
        for lab in labels:
            out.append(_LABEL.pack(*lab.root, *lab.a, *lab.b, lab.g_p, lab.minmax, lab.source_target))
    return b"".join(out)


def load_store(data: bytes, mesh: Mesh, target_set=None) -> FenceStore:
    """Parse a store; raises :class:`StaleStoreError` if it was built for another mesh or target set."""
    if data[:4] != MAGIC:
        raise StoreFormatError("not a fence store (bad magic)")
    pos = 4
    try:
        (version,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if version != FORMAT_VERSION:
            raise StoreFormatError(f"unsupported fence store version {version}")
        mh, th = data[pos : pos + 16], data[pos + 16 : pos + 32]
        pos += 32
        if mh != mesh_hash(mesh):
            raise StaleStoreError("fence store was built for a different mesh")
        if target_set is not None and th != target_set.digest():
            raise StaleStoreError("fence store was built for a different target set")
        (nedges,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if nedges != len(mesh.edges):
            raise StaleStoreError(f"store has {nedges} edges, mesh has {len(mesh.edges)}")
        fences = {}
        for eid in range(nedges):
            (count,) = struct.unpack_from("<I", data, pos)
            pos += 4
            fence = Fence(eid)
            for _ in range(count):
                rx, ry, ax, ay, bx, by, g_p, mm, src = _LABEL.unpack_from(data, pos)
                pos += _LABEL.size
                root, a, b = Point(rx, ry), Point(ax, ay), Point(bx, by)
                fence.labels.append(FenceLabel(root, a, b, g_p, src, mm, h_v_raw(root, a, b)))
            fence.recompute_upper_bound()
            if count:
                fences[eid] = fence
    except struct.error as exc:
        raise StoreFormatError(f"truncated fence store: {exc}") from None
    if pos != len(data):
        raise StoreFormatError("trailing bytes after fence store")
    store = FenceStore(fences, mh, th)
    store.stats = {"labels": store.total_labels(), "histogram": store.histogram()}
    return store


# ---------------------------------------------------------------------------
# queries


def _sees_through(q, root, a, b) -> bool:
    """q in the polygon on one side of [a, b]; True if segment q-root passes through [a, b]."""
    c1 = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
    c2 = (b[0] - a[0]) * (root[1] - a[1]) - (b[1] - a[1]) * (root[0] - a[0])
    if c1 * c2 > 0.0:
        return False
    c3 = (root[0] - q[0]) * (a[1] - q[1]) - (root[1] - q[1]) * (a[0] - q[0])
    c4 = (root[0] - q[0]) * (b[1] - q[1]) - (root[1] - q[1]) * (b[0] - q[0])
    return c3 * c4 <= 0.0


def surrounding_labels(mesh: Mesh, store: FenceStore, polys) -> List[FenceLabel]:
    out = []
    seen = set()
    for pid in polys:
        poly = mesh.polygons[pid]
        ring = poly.vertex_ids
        n = len(ring)
        for k in range(n):
            if poly.neighbor_ids[k] == NO_NEIGHBOUR:
                continue
            eid = mesh.edge_id(ring[k], ring[(k + 1) % n])
            if eid in seen:
                continue
            seen.add(eid)
            out.extend(store.labels(eid))
    return out


def fence_check_nn(mesh: Mesh, store: FenceStore, q, target_set=None, stats=None) -> Optional[Tuple[int, float]]:
    """Nearest target by obstacle distance, read off the fences around ``q``.

    Every label on an edge of q's polygon is a candidate with cost
    d_o(q, root) + g_p; candidates are tried in order of the lower bound
    d_e(q, root) + g_p and the exact distance to a root is found by a
    point-to-point search unless q sees the root through the label interval.
    Targets inside q's polygon are candidates at their straight-line distance.
    """
    polys = locate_all(mesh, q)
    if not polys:
        raise NotTraversableError(f"point {tuple(q)} is not in traversable space")
    qx, qy = q
    cands = []
    for lab in surrounding_labels(mesh, store, polys):
        r = lab.root
        cands.append((lab.g_p + math.hypot(r[0] - qx, r[1] - qy), 0, lab.source_target, lab))
    if target_set is not None:
        goals = target_set.goals(mesh)
        for pid in polys:
            for tid, t in goals.get(pid, ()):
                cands.append((math.hypot(t[0] - qx, t[1] - qy), 1, tid, None))
    if not cands:
        return None
    cands.sort(key=lambda c: (c[0], c[2], c[1]))
    best: Optional[Tuple[float, int]] = None
    root_dist: Dict[Tuple[float, float], Optional[float]] = {}
    searches = 0
    for lb, kind, tid, lab in cands:
        if best is not None and lb > best[0]:
            break
        if kind == 1:
            d = lb
        else:
            key = (lab.root[0], lab.root[1])
            if key not in root_dist:
                if _sees_through(q, lab.root, lab.a, lab.b):
                    root_dist[key] = math.hypot(key[0] - qx, key[1] - qy)
                else:
                    searches += 1
                    res = point_to_point(mesh, q, lab.root)
                    root_dist[key] = None if res is None else res[0]
            if root_dist[key] is None:
                continue
            d = root_dist[key] + lab.g_p
        if best is None or (d, tid) < best:
            best = (d, tid)
    if stats is not None:
        stats["labels"] = sum(1 for c in cands if c[1] == 0)
        stats["searches"] = searches
    if best is None:
        return None
    return best[1], best[0]


def fence_check_query(mesh: Mesh, store: FenceStore, target_set, q) -> QueryResult:
    """fence_check_nn wrapped as a k=1 QueryResult."""
    t0 = time.perf_counter()
    stats = {}
    res = fence_check_nn(mesh, store, q, target_set, stats)
    out = QueryResult(1)
    if res is not None:
        from .search import Neighbour

        out.neighbours.append(Neighbour(res[0], res[1], []))
    out.complete = res is not None
    out.labels_touched = stats.get("labels", 0)
    out.searches = stats.get("searches", 0)
    out.total_time = time.perf_counter() - t0
    return out


def knn_with_hf(mesh: Mesh, store: FenceStore, target_set, q, k: int, naive: bool = False, record_f: bool = False) -> QueryResult:
    """kNN by best-first search with f = max(f_parent, g + h'_f).

    With ``naive=True`` the parent clamp is dropped (f = g + h'_f), which is
    admissible but not consistent; the root-pruning table then only prunes
    nodes that are strictly worse, so results stay exact.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    points = target_set.points
    edge_ids = mesh.edge_ids
    fences = store.fences
    touched = [0]

    def evaluate(node, parent):
        f_parent = parent.f if parent is not None else 0.0
        r = node.root
        if node.target is not None:
            t = points[node.target]
            f = node.g + math.hypot(t[0] - r[0], t[1] - r[1])
            return f if naive else max(f_parent, f)
        u, v = node.left_vertex, node.right_vertex
        fence = fences.get(edge_ids[(u, v) if u < v else (v, u)])
        best = INF
        a, b = node.left, node.right
        if fence is not None:
            touched[0] += len(fence.labels)
            for lab in fence.labels:
                h = h_p_raw(r, a, b, lab.root) + lab.g_p
                if h < best:
                    best = h
        if best == INF:
            # no label on this edge: no target was reached through it
            best = h_v_raw(r, a, b)
        f = node.g + best
        return f if naive else max(f_parent, f)

    result = multi_target_search(mesh, target_set, q, k, evaluate, record_f=record_f)
    result.labels_touched = touched[0]
    return result
