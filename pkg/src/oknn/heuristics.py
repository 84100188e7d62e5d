"""Cost-to-go estimates for interval search nodes.

All estimators take a node exposing ``root``, ``left``, ``right`` and ``g``
(see :class:`oknn.search.SearchNode`); the ``*_raw`` variants work on plain
points and are what the search loops call.
"""

from __future__ import annotations

import math
from typing import Iterable

INF = math.inf
CANDIDATES_PER_QUERY = 8


def h_p_raw(r, a, b, t) -> float:
    """min over p in [a, b] of |r p| + |p t|."""
    rx, ry = r
    ax, ay = a
    bx, by = b
    tx, ty = t
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return math.hypot(rx - ax, ry - ay) + math.hypot(tx - ax, ty - ay)
    sr = dx * (ry - ay) - dy * (rx - ax)
    st = dx * (ty - ay) - dy * (tx - ax)
    if (sr > 0.0 and st > 0.0) or (sr < 0.0 and st < 0.0):
        # same side as the root: the path has to touch the interval first
        k = 2.0 * st / ll
        tx, ty = tx + k * dy, ty - k * dx
        st = -st
    if sr != st:
        lam = sr / (sr - st)
        px = rx + lam * (tx - rx)
        py = ry + lam * (ty - ry)
        u = ((px - ax) * dx + (py - ay) * dy) / ll
        if 0.0 <= u <= 1.0:
            return math.hypot(tx - rx, ty - ry)
    else:
        ur = ((rx - ax) * dx + (ry - ay) * dy) / ll
        ut = ((tx - ax) * dx + (ty - ay) * dy) / ll
        if min(ur, ut) <= 1.0 and max(ur, ut) >= 0.0:
            return math.hypot(tx - rx, ty - ry)
    via_a = math.hypot(ax - rx, ay - ry) + math.hypot(tx - ax, ty - ay)
    via_b = math.hypot(bx - rx, by - ry) + math.hypot(tx - bx, ty - by)
    return via_a if via_a < via_b else via_b


def h_p(node, t) -> float:
    """Lower bound on the root-to-``t`` distance for paths through the interval."""
    return h_p_raw(node.root, node.left, node.right, t)


def h_v_raw(r, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    px, py = r[0] - ax, r[1] - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return math.hypot(px, py)
    t = (px * dx + py * dy) / ll
    if t <= 0.0:
        return math.hypot(px, py)
    if t >= 1.0:
        return math.hypot(px - dx, py - dy)
    return math.hypot(px - t * dx, py - t * dy)


def h_v(node) -> float:
    """Distance from the root to the closest point of the interval."""
    return h_v_raw(node.root, node.left, node.right)


class HtMismatch(AssertionError):
    pass


def h_t(node, target_set, retrieved=frozenset(), debug: bool = False, stats=None) -> float:
    """min of h_p over the targets not yet retrieved.

    Candidates are the Euclidean neighbours of the root, both interval
    endpoints and the root mirrored through the interval's line; the best of
    those is then certified by streaming targets in increasing distance from
    the root until that distance reaches the current best (h_p never falls
    below it).
    """
    r, a, b = node.root, node.left, node.right
    index = target_set.index
    if len(retrieved) >= len(target_set):
        raise ValueError("h_t needs at least one unretrieved target")
    points = target_set.points
    probes = [r, a, b]
    if a != b:
        dx, dy = b[0] - a[0], b[1] - a[1]
        ll = dx * dx + dy * dy
        k = 2.0 * (dx * (r[1] - a[1]) - dy * (r[0] - a[0])) / ll
        probes.append((r[0] + k * dy, r[1] - k * dx))
    seen = set()
    best = INF
    for p in probes:
        for tid, _ in index.nearest(p, CANDIDATES_PER_QUERY, skip=retrieved):
            if tid in seen:
                continue
            seen.add(tid)
            v = h_p_raw(r, a, b, points[tid])
            if v < best:
                best = v
    union_best = best
    for tid, d in index.incremental(r):
        if d >= best:
            break
        if tid in seen or tid in retrieved:
            continue
        seen.add(tid)
        v = h_p_raw(r, a, b, points[tid])
        if v < best:
            best = v
    if stats is not None:
        stats["evaluations"] = stats.get("evaluations", 0) + 1
        stats["candidates"] = stats.get("candidates", 0) + len(seen)
        if union_best == best:
            stats["union_exact"] = stats.get("union_exact", 0) + 1
    if debug:
        exhaustive = min(h_p_raw(r, a, b, points[t]) for t in range(len(points)) if t not in retrieved)
        if exhaustive != best:
            raise HtMismatch(f"h_t shortcut {best!r} != exhaustive {exhaustive!r}")
        if stats is not None:
            stats["checked"] = stats.get("checked", 0) + 1
    return best


def h_f_naive(node, labels: Iterable) -> float:
    """min over fence labels of h_p(node, label root) + label g_p; inf on an empty fence."""
    r, a, b = node.root, node.left, node.right
    best = INF
    for lab in labels:
        v = h_p_raw(r, a, b, lab.root) + lab.g_p
        if v < best:
            best = v
    return best


def h_f(node, labels: Iterable, f_parent: float) -> float:
    """Fence estimate clamped so that the node's f never drops below its parent's."""
    return max(f_parent - node.g, h_f_naive(node, labels))
