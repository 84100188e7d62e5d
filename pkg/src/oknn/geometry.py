"""Planar primitives shared by the mesh, search and oracle code.

Everything works on plain ``(x, y)`` tuples; :class:`Point` and
:class:`Segment` are named tuples so they can be passed anywhere a tuple is
expected and vice versa.
"""

from __future__ import annotations

import math
from enum import IntEnum
from typing import NamedTuple, Optional, Tuple, Union

EPS_ORIENT = 1e-12
EPS_GEOM = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


class Orientation(IntEnum):
    RIGHT = -1
    COLLINEAR = 0
    LEFT = 1


class Overlap(NamedTuple):
    """Collinear overlap of two segments (may be a single point)."""

    a: Point
    b: Point


class DegenerateSegmentError(ValueError):
    pass


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def orientation(p, q, r) -> Orientation:
    c = cross(p, q, r)
    if c > EPS_ORIENT:
        return Orientation.LEFT
    if c < -EPS_ORIENT:
        return Orientation.RIGHT
    return Orientation.COLLINEAR


def points_close(p, q, eps: float = EPS_GEOM) -> bool:
    return abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps


def closest_point_on_segment(p, s) -> Tuple[Point, float]:
    """Closest point of segment ``s`` to ``p`` and the distance to it."""
    (ax, ay), (bx, by) = s
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return Point(ax, ay), dist(p, (ax, ay))
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    if t <= 0.0:
        c = Point(ax, ay)
    elif t >= 1.0:
        c = Point(bx, by)
    else:
        c = Point(ax + t * dx, ay + t * dy)
    return c, dist(p, c)


def point_segment_distance(p, a, b) -> float:
    """Same as ``closest_point_on_segment(p, (a, b))[1]`` without allocations."""
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    px, py = p[0] - ax, p[1] - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return math.hypot(px, py)
    t = (px * dx + py * dy) / ll
    if t <= 0.0:
        return math.hypot(px, py)
    if t >= 1.0:
        return math.hypot(px - dx, py - dy)
    return math.hypot(px - t * dx, py - t * dy)


def mirror_across_line(p, s) -> Point:
    """Reflect ``p`` across the infinite line through ``s``."""
    (ax, ay), (bx, by) = s
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        raise DegenerateSegmentError("cannot mirror across a degenerate segment")
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    fx, fy = ax + t * dx, ay + t * dy
    return Point(2.0 * fx - p[0], 2.0 * fy - p[1])


def on_segment(p, a, b, eps: float = EPS_GEOM) -> bool:
    """True if ``p`` lies on the closed segment ab within ``eps``."""
    return point_segment_distance(p, a, b) <= eps


def segment_intersection(s1, s2) -> Optional[Union[Point, Overlap]]:
    """Intersection of two closed segments.

    Returns ``None`` when they are disjoint, a :class:`Point` for a single
    crossing or touching point, and an :class:`Overlap` when the segments are
    collinear and share more than one point.
    """
    p, p2 = s1
    q, q2 = s2
    rx, ry = p2[0] - p[0], p2[1] - p[1]
    sx, sy = q2[0] - q[0], q2[1] - q[1]
    denom = rx * sy - ry * sx
    qpx, qpy = q[0] - p[0], q[1] - p[1]
    # segments shorter than the tolerance behave as points
    if math.hypot(rx, ry) <= EPS_GEOM:
        return Point(*p) if on_segment(p, q, q2) else None
    if math.hypot(sx, sy) <= EPS_GEOM:
        return Point(*q) if on_segment(q, p, p2) else None
    scale = max(math.hypot(rx, ry) * math.hypot(sx, sy), 1.0)
    if abs(denom) <= EPS_ORIENT * scale:
        # parallel: collinear only if q is within tolerance of the line through p
        if abs(qpx * ry - qpy * rx) > EPS_GEOM * math.hypot(rx, ry):
            return None
        rr = rx * rx + ry * ry
        t0 = (qpx * rx + qpy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        tol = EPS_GEOM / math.sqrt(rr)
        if lo > hi + tol:
            return None
        a = Point(p[0] + lo * rx, p[1] + lo * ry)
        b = Point(p[0] + hi * rx, p[1] + hi * ry)
        if hi - lo <= tol:
            return a
        return Overlap(a, b)
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    tol_t = EPS_GEOM / max(math.hypot(rx, ry), EPS_GEOM)
    tol_u = EPS_GEOM / max(math.hypot(sx, sy), EPS_GEOM)
    if -tol_t <= t <= 1.0 + tol_t and -tol_u <= u <= 1.0 + tol_u:
        t = min(max(t, 0.0), 1.0)
        return Point(p[0] + t * rx, p[1] + t * ry)
    return None


def segments_cross_properly(a, b, c, d) -> bool:
    """True if open segments ab and cd cross at a single interior point."""
    d1 = cross(a, b, c)
    d2 = cross(a, b, d)
    d3 = cross(c, d, a)
    d4 = cross(c, d, b)
    return ((d1 > EPS_ORIENT and d2 < -EPS_ORIENT) or (d1 < -EPS_ORIENT and d2 > EPS_ORIENT)) and (
        (d3 > EPS_ORIENT and d4 < -EPS_ORIENT) or (d3 < -EPS_ORIENT and d4 > EPS_ORIENT)
    )


def signed_area(ring) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    s = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def point_in_polygon(p, ring) -> bool:
    """Even-odd test; boundary points give an arbitrary answer."""
    x, y = p
    inside = False
    n = len(ring)
    j = n - 1
    for i in range(n):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xc:
                inside = not inside
        j = i
    return inside


def point_strictly_in_polygon(p, ring, eps: float = EPS_GEOM) -> bool:
    """Inside and farther than ``eps`` from every edge."""
    n = len(ring)
    for i in range(n):
        if point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= eps:
            return False
    return point_in_polygon(p, ring)


def is_simple_polygon(ring) -> bool:
    """No repeated vertices and no two non-adjacent edges touching."""
    n = len(ring)
    if n < 3 or abs(signed_area(ring)) <= EPS_GEOM:
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if points_close(ring[i], ring[j]):
                return False
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            c, d = ring[j], ring[(j + 1) % n]
            if segment_intersection((a, b), (c, d)) is not None:
                return False
    return True
