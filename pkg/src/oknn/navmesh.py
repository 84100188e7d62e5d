"""Navigation meshes: convex polygons covering the traversable part of a scene."""

from __future__ import annotations

import hashlib
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay

from .geometry import (
    EPS_GEOM,
    EPS_ORIENT,
    Point,
    cross,
    is_simple_polygon,
    on_segment,
    point_segment_distance,
    point_strictly_in_polygon,
    segments_cross_properly,
    signed_area,
)

NO_NEIGHBOUR = -1
GRID_CELLS = 64


class MeshFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SceneFormatError(MeshFormatError):
    pass


class TriangulationError(ValueError):
    def __init__(self, message: str, pair=None):
        self.pair = pair
        super().__init__(message)


class NotTraversableError(ValueError):
    pass


@dataclass(frozen=True)
class Polygon:
    vertex_ids: Tuple[int, ...]
    neighbor_ids: Tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    endpoints: Tuple[int, int]
    incident: Tuple[int, ...]


class Violation(NamedTuple):
    entity: str
    rule: str
    message: str


@dataclass
class Scene:
    """Rectangular map with polygonal obstacles and target points.

    Obstacle rings are normalised to clockwise order on construction.
    """

    boundary: Tuple[float, float, float, float]
    obstacles: List[Tuple[Point, ...]] = field(default_factory=list)
    targets: List[Point] = field(default_factory=list)

    def __post_init__(self):
        self.boundary = tuple(float(v) for v in self.boundary)
        rings = []
        for ring in self.obstacles:
            ring = tuple(Point(float(x), float(y)) for x, y in ring)
            if signed_area(ring) > 0:
                ring = ring[::-1]
            rings.append(ring)
        self.obstacles = rings
        self.targets = [Point(float(x), float(y)) for x, y in self.targets]

    @property
    def vertex_count(self) -> int:
        return 4 + sum(len(r) for r in self.obstacles)

    def boundary_ring(self) -> Tuple[Point, ...]:
        x0, y0, x1, y1 = self.boundary
        return (Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1))

    def is_traversable(self, p) -> bool:
        x0, y0, x1, y1 = self.boundary
        if not (x0 - EPS_GEOM <= p[0] <= x1 + EPS_GEOM and y0 - EPS_GEOM <= p[1] <= y1 + EPS_GEOM):
            return False
        return not any(point_strictly_in_polygon(p, ring) for ring in self.obstacles)


class Mesh:
    """Convex-polygon decomposition with vertex, edge and polygon adjacency.

    ``polygons[i].neighbor_ids[j]`` is the polygon across the edge from
    ``vertex_ids[j]`` to ``vertex_ids[j + 1]``, or ``-1`` for obstacle and
    boundary edges.
    """

    def __init__(self, vertices: Sequence, polygons: Sequence[Polygon]):
        self.vertices: List[Point] = [Point(float(x), float(y)) for x, y in vertices]
        self.polygons: List[Polygon] = list(polygons)
        self._build_indices()
        self._grid = None

    def _build_indices(self):
        nv = len(self.vertices)
        self.vertex_to_polygons: List[List[int]] = [[] for _ in range(nv)]
        self.edges: List[Edge] = []
        self.edge_ids: Dict[Tuple[int, int], int] = {}
        incident: Dict[Tuple[int, int], List[int]] = {}
        order: List[Tuple[int, int]] = []
        # position of each vertex inside each polygon ring
        self.ring_position: List[Dict[int, int]] = []
        for pid, poly in enumerate(self.polygons):
            ring = poly.vertex_ids
            self.ring_position.append({v: i for i, v in enumerate(ring)})
            n = len(ring)
            for i, v in enumerate(ring):
                if 0 <= v < nv:
                    self.vertex_to_polygons[v].append(pid)
                key = _edge_key(v, ring[(i + 1) % n])
                if key not in incident:
                    incident[key] = []
                    order.append(key)
                incident[key].append(pid)
        for key in order:
            self.edge_ids[key] = len(self.edges)
            self.edges.append(Edge(key, tuple(incident[key])))
        self.is_corner = [False] * nv
        for poly in self.polygons:
            ring = poly.vertex_ids
            n = len(ring)
            for i, nb in enumerate(poly.neighbor_ids[:n]):
                if nb == NO_NEIGHBOUR:
                    for v in (ring[i], ring[(i + 1) % n]):
                        if 0 <= v < nv:
                            self.is_corner[v] = True

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_ids[_edge_key(u, v)]

    def polygon_points(self, pid: int) -> List[Point]:
        return [self.vertices[v] for v in self.polygons[pid].vertex_ids]

    def centroid(self, pid: int) -> Point:
        pts = self.polygon_points(pid)
        return Point(sum(p.x for p in pts) / len(pts), sum(p.y for p in pts) / len(pts))

    def bounds(self) -> Tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def polygon_contains(self, pid: int, p, eps: float = EPS_GEOM) -> bool:
        ring = self.polygons[pid].vertex_ids
        verts = self.vertices
        n = len(ring)
        px, py = p
        for i in range(n):
            ax, ay = verts[ring[i]]
            bx, by = verts[ring[(i + 1) % n]]
            c = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            if c < 0.0 and c < -eps * math.hypot(bx - ax, by - ay):
                return False
        return True

    def _grid_index(self):
        if self._grid is None:
            x0, y0, x1, y1 = self.bounds()
            w = max(x1 - x0, y1 - y0, EPS_GEOM)
            cell = w / GRID_CELLS
            buckets: Dict[Tuple[int, int], List[int]] = {}
            for pid in range(len(self.polygons)):
                pts = self.polygon_points(pid)
                i0 = int((min(p.x for p in pts) - x0 - EPS_GEOM) // cell)
                i1 = int((max(p.x for p in pts) - x0 + EPS_GEOM) // cell)
                j0 = int((min(p.y for p in pts) - y0 - EPS_GEOM) // cell)
                j1 = int((max(p.y for p in pts) - y0 + EPS_GEOM) // cell)
                for i in range(i0, i1 + 1):
                    for j in range(j0, j1 + 1):
                        buckets.setdefault((i, j), []).append(pid)
            self._grid = (x0, y0, cell, buckets)
        return self._grid

    def candidate_polygons(self, p) -> List[int]:
        x0, y0, cell, buckets = self._grid_index()
        return buckets.get((int((p[0] - x0) // cell), int((p[1] - y0) // cell)), [])

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return self.vertices == other.vertices and self.polygons == other.polygons

    def __repr__(self):
        return f"Mesh({len(self.vertices)} vertices, {len(self.polygons)} polygons)"


def _edge_key(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def locate_point(mesh: Mesh, p) -> Optional[int]:
    """Id of a polygon whose closed region contains ``p``; None if not traversable."""
    for pid in mesh.candidate_polygons(p):
        if mesh.polygon_contains(pid, p):
            return pid
    return None


def locate_all(mesh: Mesh, p) -> List[int]:
    """Every polygon whose closed region contains ``p`` (several on edges and vertices)."""
    return [pid for pid in mesh.candidate_polygons(p) if mesh.polygon_contains(pid, p)]


def mesh_hash(mesh: Mesh) -> bytes:
    return hashlib.blake2b(save_mesh(mesh).encode("ascii"), digest_size=16).digest()


# ---------------------------------------------------------------------------
# validation


def validate(mesh: Mesh) -> List[Violation]:
    """Check ring shape, winding, convexity and adjacency symmetry."""
    out: List[Violation] = []
    nv = len(mesh.vertices)
    npoly = len(mesh.polygons)
    for pid, poly in enumerate(mesh.polygons):
        name = f"polygon {pid}"
        ring, nbrs = poly.vertex_ids, poly.neighbor_ids
        if len(ring) < 3:
            out.append(Violation(name, "ring-length", f"ring has {len(ring)} vertices"))
            continue
        if len(nbrs) != len(ring):
            out.append(Violation(name, "neighbor-count", f"{len(nbrs)} neighbours for {len(ring)} edges"))
            continue
        if any(not 0 <= v < nv for v in ring):
            out.append(Violation(name, "vertex-range", "vertex id out of range"))
            continue
        if len(set(ring)) != len(ring):
            out.append(Violation(name, "repeated-vertex", "ring repeats a vertex"))
        pts = [mesh.vertices[v] for v in ring]
        if signed_area(pts) <= 0:
            out.append(Violation(name, "winding", "ring is not counter-clockwise"))
        else:
            n = len(pts)
            for i in range(n):
                c = cross(pts[i - 1], pts[i], pts[(i + 1) % n])
                if c < -EPS_ORIENT * max(1.0, _span(pts)):
                    out.append(Violation(name, "convexity", f"reflex turn at vertex {ring[i]}"))
                    break
        for i, q in enumerate(nbrs):
            if q == NO_NEIGHBOUR:
                continue
            if not 0 <= q < npoly:
                out.append(Violation(name, "neighbor-range", f"neighbour {q} out of range"))
                continue
            u, v = ring[i], ring[(i + 1) % len(ring)]
            other = mesh.polygons[q]
            pos = mesh.ring_position[q].get(v)
            ok = (
                pos is not None
                and other.vertex_ids[(pos + 1) % len(other.vertex_ids)] == u
                and pos < len(other.neighbor_ids)
                and other.neighbor_ids[pos] == pid
            )
            if not ok:
                out.append(
                    Violation(name, "adjacency", f"polygon {pid} lists {q} across edge ({u},{v}) but {q} does not list {pid}")
                )
    for eid, edge in enumerate(mesh.edges):
        u, v = edge.endpoints
        if u == v:
            out.append(Violation(f"edge {eid}", "degenerate-edge", "edge endpoints coincide"))
        if len(edge.incident) > 2:
            out.append(Violation(f"edge {eid}", "edge-incidence", f"edge ({u},{v}) has {len(edge.incident)} polygons"))
    return out


def _span(pts) -> float:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return (max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2


# ---------------------------------------------------------------------------
# text formats


def save_mesh(mesh: Mesh) -> str:
    lines = ["mesh 1", f"{len(mesh.vertices)} {len(mesh.polygons)}"]
    for v in mesh.vertices:
        lines.append(f"{v.x!r} {v.y!r}")
    for poly in mesh.polygons:
        items = [str(len(poly.vertex_ids))]
        items += [str(v) for v in poly.vertex_ids]
        items += [str(n) for n in poly.neighbor_ids]
        lines.append(" ".join(items))
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_mesh(text: str, check: bool = True) -> Mesh:
    """Parse the line-oriented mesh format.  Raises :class:`MeshFormatError`."""
    lines = list(_content_lines(text))
    last = lines[-1][0] if lines else 0
    it = iter(lines)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise MeshFormatError(f"unexpected end of file, expected {what}", last + 1) from None

    lineno, tok = take("header")
    if tok != ["mesh", "1"]:
        raise MeshFormatError(f"bad header {' '.join(tok)!r}, expected 'mesh 1'", lineno)
    lineno, tok = take("counts")
    try:
        nv, npoly = (int(t) for t in tok)
    except ValueError:
        raise MeshFormatError("expected '<num_vertices> <num_polygons>'", lineno) from None
    if nv < 0 or npoly < 0:
        raise MeshFormatError("negative count", lineno)
    vertices = []
    for i in range(nv):
        lineno, tok = take(f"vertex {i}")
        if len(tok) != 2:
            raise MeshFormatError(f"vertex {i}: expected 2 coordinates", lineno)
        try:
            x, y = float(tok[0]), float(tok[1])
        except ValueError:
            raise MeshFormatError(f"vertex {i}: bad coordinate", lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise MeshFormatError(f"vertex {i}: non-finite coordinate", lineno)
        vertices.append(Point(x, y))
    polygons = []
    poly_lines = []
    for i in range(npoly):
        lineno, tok = take(f"polygon {i}")
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise MeshFormatError(f"polygon {i}: non-integer field", lineno) from None
        n = vals[0] if vals else 0
        if n < 3 or len(vals) != 1 + 2 * n:
            raise MeshFormatError(f"polygon {i}: expected ring length >= 3 followed by {2 * max(n, 0)} ids", lineno)
        ring = tuple(vals[1 : 1 + n])
        nbrs = tuple(vals[1 + n :])
        for v in ring:
            if not 0 <= v < nv:
                raise MeshFormatError(f"polygon {i}: vertex index {v} out of range", lineno)
        for q in nbrs:
            if q != NO_NEIGHBOUR and not 0 <= q < npoly:
                raise MeshFormatError(f"polygon {i}: neighbour index {q} out of range", lineno)
        polygons.append(Polygon(ring, nbrs))
        poly_lines.append(lineno)
    extra = next(it, None)
    if extra is not None:
        raise MeshFormatError("trailing data after last polygon", extra[0])
    mesh = Mesh(vertices, polygons)
    if check:
        for v in validate(mesh):
            line = None
            if v.entity.startswith("polygon "):
                line = poly_lines[int(v.entity.split()[1])]
            raise MeshFormatError(f"{v.entity}: {v.rule}: {v.message}", line)
    return mesh


def save_scene(scene: Scene) -> str:
    lines = ["scene 1", " ".join(repr(v) for v in scene.boundary), str(len(scene.obstacles))]
    for ring in scene.obstacles:
        lines.append(" ".join([str(len(ring))] + [f"{p.x!r} {p.y!r}" for p in ring]))
    lines.append(str(len(scene.targets)))
    for t in scene.targets:
        lines.append(f"{t.x!r} {t.y!r}")
    return "\n".join(lines) + "\n"


def load_scene(text: str) -> Scene:
    lines = list(_content_lines(text))
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise SceneFormatError(f"unexpected end of file, expected {what}", (lines[-1][0] + 1) if lines else 1)
        pos += 1
        return lines[pos - 1]

    try:
        lineno, tok = take("header")
        if tok != ["scene", "1"]:
            raise SceneFormatError("bad header, expected 'scene 1'", lineno)
        lineno, tok = take("boundary")
        if len(tok) != 4:
            raise SceneFormatError("boundary needs 4 numbers", lineno)
        boundary = tuple(float(t) for t in tok)
        lineno, tok = take("obstacle count")
        obstacles = []
        for i in range(int(tok[0])):
            lineno, tok = take(f"obstacle {i}")
            n = int(tok[0])
            if n < 3 or len(tok) != 1 + 2 * n:
                raise SceneFormatError(f"obstacle {i}: bad ring", lineno)
            vals = [float(t) for t in tok[1:]]
            obstacles.append([Point(vals[2 * k], vals[2 * k + 1]) for k in range(n)])
        lineno, tok = take("target count")
        targets = []
        for i in range(int(tok[0])):
            lineno, tok = take(f"target {i}")
            if len(tok) != 2:
                raise SceneFormatError(f"target {i}: expected x y", lineno)
            targets.append(Point(float(tok[0]), float(tok[1])))
    except ValueError as exc:
        if isinstance(exc, SceneFormatError):
            raise
        raise SceneFormatError(f"bad number: {exc}", lineno) from None
    return Scene(boundary, obstacles, targets)


def save_targets(points) -> str:
    lines = ["targets 1", str(len(points))]
    lines += [f"{float(p[0])!r} {float(p[1])!r}" for p in points]
    return "\n".join(lines) + "\n"


def load_targets(text: str) -> List[Point]:
    """Read a target list; a scene file is accepted too (its targets are used)."""
    lines = list(_content_lines(text))
    if lines and lines[0][1] == ["scene", "1"]:
        return load_scene(text).targets
    if not lines or lines[0][1] != ["targets", "1"]:
        raise MeshFormatError("bad header, expected 'targets 1'", lines[0][0] if lines else 1)
    if len(lines) < 2:
        raise MeshFormatError("missing target count", lines[0][0] + 1)
    n = int(lines[1][1][0])
    if len(lines) != n + 2:
        raise MeshFormatError(f"expected {n} targets, found {len(lines) - 2}", lines[-1][0] + 1)
    pts = []
    for lineno, tok in lines[2:]:
        if len(tok) != 2:
            raise MeshFormatError("expected x y", lineno)
        pts.append(Point(float(tok[0]), float(tok[1])))
    return pts


# ---------------------------------------------------------------------------
# triangulation


def triangulate(scene: Scene) -> Mesh:
    """Constrained triangulation of the free space of ``scene``.

    Starts from an unconstrained Delaunay triangulation of all boundary and
    obstacle vertices, recovers missing obstacle edges by edge flips, then
    drops the triangles inside obstacles.  Targets are not mesh vertices.
    """
    x0, y0, x1, y1 = scene.boundary
    if not (x1 > x0 and y1 > y0):
        raise TriangulationError("empty boundary rectangle")
    pts: List[Point] = list(scene.boundary_ring())
    index: Dict[Tuple[float, float], int] = {tuple(p): i for i, p in enumerate(pts)}
    constraints: List[Tuple[int, int, int]] = []  # (u, v, obstacle index)
    for oi, ring in enumerate(scene.obstacles):
        if not is_simple_polygon(ring):
            raise TriangulationError(f"obstacle {oi} is not a simple polygon", (oi, oi))
        ids = []
        for p in ring:
            if not (x0 < p.x < x1 and y0 < p.y < y1):
                raise TriangulationError(f"obstacle {oi} vertex {tuple(p)} is not strictly inside the boundary")
            key = (p.x, p.y)
            if key not in index:
                index[key] = len(pts)
                pts.append(p)
            ids.append(index[key])
        for k in range(len(ids)):
            constraints.append((ids[k], ids[(k + 1) % len(ids)], oi))
    _check_constraint_crossings(pts, constraints)
    constraints = _split_touching_constraints(pts, constraints)

    arr = np.asarray(pts, dtype=float)
    dt = Delaunay(arr)
    opp: Dict[Tuple[int, int], int] = {}
    nbrs: List[set] = [set() for _ in pts]
    for a, b, c in dt.simplices.tolist():
        if cross(pts[a], pts[b], pts[c]) < 0:
            b, c = c, b
        _add_triangle(opp, nbrs, a, b, c)
    for u, v, _ in constraints:
        if v not in nbrs[u]:
            _recover_edge(pts, opp, nbrs, u, v)

    triangles = sorted({_canonical_triangle(a, b, opp[(a, b)]) for (a, b) in opp})
    keep = _free_triangles(pts, triangles, scene.obstacles)
    tri_of_edge: Dict[Tuple[int, int], int] = {}
    kept = [t for t, k in zip(triangles, keep) if k]
    for tid, (a, b, c) in enumerate(kept):
        tri_of_edge[(a, b)] = tid
        tri_of_edge[(b, c)] = tid
        tri_of_edge[(c, a)] = tid
    polygons = []
    for a, b, c in kept:
        nb = tuple(tri_of_edge.get((v, u), NO_NEIGHBOUR) for u, v in ((a, b), (b, c), (c, a)))
        polygons.append(Polygon((a, b, c), nb))
    return Mesh(pts, polygons)


def _canonical_triangle(a, b, c):
    m = min(a, b, c)
    if m == a:
        return (a, b, c)
    if m == b:
        return (b, c, a)
    return (c, a, b)


def _add_triangle(opp, nbrs, a, b, c):
    opp[(a, b)] = c
    opp[(b, c)] = a
    opp[(c, a)] = b
    for u, v in ((a, b), (b, c), (c, a)):
        nbrs[u].add(v)
        nbrs[v].add(u)


def _check_constraint_crossings(pts, constraints):
    if len(constraints) < 2:
        return
    a = np.asarray([pts[u] for u, _, _ in constraints])
    b = np.asarray([pts[v] for _, v, _ in constraints])
    d = b - a
    for i in range(len(constraints)):
        ai, bi = a[i], b[i]
        di = d[i]
        c1 = di[0] * (a[:, 1] - ai[1]) - di[1] * (a[:, 0] - ai[0])
        c2 = di[0] * (b[:, 1] - ai[1]) - di[1] * (b[:, 0] - ai[0])
        c3 = d[:, 0] * (ai[1] - a[:, 1]) - d[:, 1] * (ai[0] - a[:, 0])
        c4 = d[:, 0] * (bi[1] - a[:, 1]) - d[:, 1] * (bi[0] - a[:, 0])
        hit = (c1 * c2 < 0) & (c3 * c4 < 0)
        hit[: i + 1] = False
        if hit.any():
            j = int(np.flatnonzero(hit)[0])
            oi, oj = constraints[i][2], constraints[j][2]
            raise TriangulationError(
                f"edge of obstacle {oi} crosses edge of obstacle {oj}", (oi, oj)
            )


def _split_touching_constraints(pts, constraints):
    """Split constraint edges that pass through another vertex."""
    arr = np.asarray(pts)
    out = []
    for u, v, oi in constraints:
        a, b = arr[u], arr[v]
        d = b - a
        ll = float(d @ d)
        t = ((arr - a) @ d) / ll
        off = np.abs(d[0] * (arr[:, 1] - a[1]) - d[1] * (arr[:, 0] - a[0])) / math.sqrt(ll)
        mask = (off <= EPS_GEOM) & (t > 1e-12) & (t < 1 - 1e-12)
        mask[[u, v]] = False
        if not mask.any():
            out.append((u, v, oi))
            continue
        inner = sorted(np.flatnonzero(mask).tolist(), key=lambda k: t[k])
        chain = [u] + inner + [v]
        out.extend((chain[k], chain[k + 1], oi) for k in range(len(chain) - 1))
    return out


def _recover_edge(pts, opp, nbrs, i, j):
    """Insert edge (i, j) into the triangulation by flipping crossing edges."""
    pi, pj = pts[i], pts[j]
    crossing = deque()
    start = None
    for u in nbrs[i]:
        w = opp.get((i, u))
        if w is None:
            continue
        if cross(pi, pj, pts[u]) < 0 and cross(pi, pj, pts[w]) > 0 and segments_cross_properly(pi, pj, pts[u], pts[w]):
            start = (u, w)
            break
    if start is None:
        raise TriangulationError(f"cannot recover constraint edge ({i},{j})")
    right, left = start
    while True:
        crossing.append((right, left))
        x = opp.get((left, right))
        if x is None:
            raise TriangulationError(f"constraint edge ({i},{j}) leaves the triangulation")
        if x == j:
            break
        s = cross(pi, pj, pts[x])
        if s < 0:
            right = x
        elif s > 0:
            left = x
        else:
            raise TriangulationError(f"vertex {x} lies on constraint edge ({i},{j})")
    limit = 50 * (len(crossing) + 10) ** 2
    steps = 0
    while crossing:
        steps += 1
        if steps > limit:
            raise TriangulationError(f"edge recovery for ({i},{j}) did not converge")
        u, v = crossing.popleft()
        c = opp[(u, v)]
        d = opp[(v, u)]
        if not segments_cross_properly(pts[c], pts[d], pts[u], pts[v]):
            crossing.append((u, v))
            continue
        for key in ((u, v), (v, c), (c, u), (v, u), (u, d), (d, v)):
            del opp[key]
        nbrs[u].discard(v)
        nbrs[v].discard(u)
        _add_triangle(opp, nbrs, u, d, c)
        _add_triangle(opp, nbrs, d, v, c)
        if {c, d} != {i, j} and segments_cross_properly(pi, pj, pts[c], pts[d]):
            crossing.append((c, d))


def _free_triangles(pts, triangles, obstacles) -> List[bool]:
    if not triangles:
        return []
    arr = np.asarray(pts)
    tri = np.asarray(triangles)
    cen = arr[tri].mean(axis=1)
    inside = np.zeros(len(tri), dtype=bool)
    for ring in obstacles:
        r = np.asarray(ring)
        lo, hi = r.min(axis=0), r.max(axis=0)
        cand = np.flatnonzero((cen[:, 0] >= lo[0]) & (cen[:, 0] <= hi[0]) & (cen[:, 1] >= lo[1]) & (cen[:, 1] <= hi[1]))
        if cand.size == 0:
            continue
        inside[cand] |= _points_in_ring(cen[cand], r)
    return (~inside).tolist()


def _points_in_ring(p: np.ndarray, ring: np.ndarray) -> np.ndarray:
    x, y = p[:, 0:1], p[:, 1:2]
    xi, yi = ring[:, 0], ring[:, 1]
    xj, yj = np.roll(xi, 1), np.roll(yi, 1)
    straddle = (yi > y) != (yj > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = xi + (y - yi) * (xj - xi) / (yj - yi)
    hits = straddle & (x < xc)
    return (hits.sum(axis=1) % 2) == 1


def point_in_obstacle(scene: Scene, p) -> bool:
    return any(point_strictly_in_polygon(p, ring) for ring in scene.obstacles)


def near_edge(mesh: Mesh, p, eps: float = EPS_GEOM) -> bool:
    """True if ``p`` is within ``eps`` of an edge of one of its candidate polygons."""
    for pid in mesh.candidate_polygons(p):
        pts = mesh.polygon_points(pid)
        n = len(pts)
        if any(point_segment_distance(p, pts[i], pts[(i + 1) % n]) <= eps for i in range(n)):
            return True
    return False
