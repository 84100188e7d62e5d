import math

import numpy as np
import pytest

from oknn.geometry import Point, dist, orientation, segment_intersection
from oknn.navmesh import NotTraversableError, Scene, triangulate
from oknn.oracle import Oracle, is_visible, oracle_distance, visible_from
from oknn.scenarios import SPIRAL_QUERY, random_scene, sample_queries, spiral_scene
from oknn.search import (
    SearchNode,
    SearchTrace,
    point_to_point,
    root_pruning,
    run_best_first,
    start_nodes,
    successors,
)

from conftest import close


def test_point_to_point_open_square():
    m = triangulate(Scene((0, 0, 10, 10)))
    d, path = point_to_point(m, (1, 1), (7, 5))
    assert d == pytest.approx(math.sqrt(52), rel=1e-12)
    assert path == [(1, 1), (7, 5)]


def test_point_to_point_spiral_detour():
    scene = spiral_scene()
    m = triangulate(scene)
    D = scene.targets[0]
    d, path = point_to_point(m, SPIRAL_QUERY, D)
    assert d > dist(SPIRAL_QUERY, D) + 1.0
    assert close(d, oracle_distance(scene, SPIRAL_QUERY, D))
    assert sum(dist(a, b) for a, b in zip(path, path[1:])) == pytest.approx(d, rel=1e-12)
    for a, b in zip(path, path[1:]):
        assert is_visible(scene, a, b)


def test_point_to_point_target_in_obstacle():
    m = triangulate(spiral_scene())
    assert point_to_point(m, SPIRAL_QUERY, (66, 50)) is None


def test_point_to_point_query_in_obstacle():
    m = triangulate(spiral_scene())
    with pytest.raises(NotTraversableError):
        point_to_point(m, (66, 50), (10, 10))


def test_point_to_point_matches_oracle_on_random_scenes():
    for seed in range(100):
        scene = random_scene(seed)
        m = triangulate(scene)
        qs = sample_queries(m, 40, seed + 101)
        ts = qs[1::2]
        oracle = Oracle(scene, targets=ts)
        for i, (q, t) in enumerate(zip(qs[::2], ts)):
            want = float(oracle.distances_from(q)[i])
            got = point_to_point(m, q, t)
            assert got is not None and want is not None
            assert close(got[0], want), (seed, q, t)
            path = got[1]
            assert sum(dist(a, b) for a, b in zip(path, path[1:])) == pytest.approx(got[0], rel=1e-9)
            for a, b in zip(path, path[1:]):
                assert visible_from(scene, a, [b])[0]


def test_run_best_first_empty_start():
    m = triangulate(Scene((0, 0, 10, 10)))
    trace = run_best_first(m, [], lambda n, p: n.g)
    assert trace.expansions == 0 and trace.exhausted


def test_run_best_first_immediate_termination():
    m = triangulate(Scene((0, 0, 10, 10)))
    start = start_nodes(m, (2, 3))[:1]
    trace = run_best_first(m, start, lambda n, p: n.g, termination=lambda n: True)
    assert trace.expansions == 1
    assert not trace.exhausted


def test_popped_f_nondecreasing_on_spiral():
    scene = spiral_scene()
    m = triangulate(scene)
    trace = SearchTrace()
    for t in scene.targets:
        point_to_point(m, SPIRAL_QUERY, t, trace=trace, record_f=True)
        f = trace.popped_f
        assert all(b >= a - 1e-9 for a, b in zip(f, f[1:]))
        trace.popped_f = []


def _node(vertex, g):
    return SearchNode((0, 0), vertex, (0, 0), (1, 0), 0, 1, 0, g)


def test_root_pruning_examples():
    best = {}
    assert root_pruning(best, _node(7, 5.0))  # unseen root
    assert not root_pruning(best, _node(7, 6.0))  # seen with smaller g
    assert root_pruning(best, _node(7, 4.0))  # seen with larger g
    assert best[7] == 4.0
    assert root_pruning(best, _node(-1, 100.0))  # roots off the mesh vertices are never pruned


def _expanded_nodes(mesh, q, limit):
    seen = []

    def grab(node):
        seen.append(node)
        return len(seen) < limit

    run_best_first(mesh, start_nodes(mesh, q), lambda n, p: n.g, pruners=(grab,))
    return seen


def _far_edges(mesh, node):
    P = node.next_polygon
    ring = mesh.polygons[P].vertex_ids
    n = len(ring)
    key = node.edge_key()
    for k in range(n):
        u, v = ring[k], ring[(k + 1) % n]
        if tuple(sorted((u, v))) == key:
            continue
        yield u, v, mesh.polygons[P].neighbor_ids[k]


def test_successor_coverage_sampling():
    rng = np.random.default_rng(1)
    checked = 0
    for seed in range(6):
        scene = random_scene(seed)
        mesh = triangulate(scene)
        pending = {}
        for q in sample_queries(mesh, 2, seed):
            for node in _expanded_nodes(mesh, q, 25):
                a, b = Point(*node.right), Point(*node.left)
                if dist(a, b) < 1e-6 or node.next_polygon < 0:
                    continue
                kids = successors(mesh, node)
                r = node.root
                far = [e for e in _far_edges(mesh, node) if e[2] >= 0]
                for u, v, nb in far:
                    U, V = mesh.vertices[u], mesh.vertices[v]
                    # 1,000 samples per expanded node, split over its far edges
                    for s in rng.uniform(0.001, 0.999, 1000 // len(far)):
                        p = Point(U.x + s * (V.x - U.x), U.y + s * (V.y - U.y))
                        # skip points on the boundary rays of the view cone
                        if any(
                            abs((e[0] - r[0]) * (p.y - r[1]) - (e[1] - r[1]) * (p.x - r[0])) < 1e-6 * dist(r, e) * dist(r, p)
                            for e in (a, b)
                        ):
                            continue
                        holders = [
                            c
                            for c in kids
                            if c.target is None
                            and segment_intersection((c.left, c.right), (p, p)) is not None
                            and tuple(sorted((c.left_vertex, c.right_vertex))) == tuple(sorted((u, v)))
                        ]
                        seen_through = segment_intersection((r, p), (a, b)) is not None
                        if seen_through:
                            assert len(holders) == 1 and tuple(holders[0].root) == tuple(r)
                        else:
                            side = a if orientation(r, a, p) == orientation(r, a, b) * -1 else b
                            vid = node.right_vertex if side == a else node.left_vertex
                            if mesh.is_corner[vid] and points_equal(side, mesh.vertices[vid]):
                                assert len(holders) == 1
                                assert tuple(holders[0].root) == tuple(side)
                                assert holders[0].g == pytest.approx(node.g + dist(r, side))
                            else:
                                assert len(holders) <= 1
                        for c in holders:
                            pending.setdefault(tuple(c.root), []).append(p)
                        checked += 1
        for root, pts in pending.items():
            assert visible_from(scene, root, pts).all()
    assert checked > 10_000


def points_equal(p, q):
    return abs(p[0] - q[0]) <= 1e-9 and abs(p[1] - q[1]) <= 1e-9


def test_dead_end_has_no_successors():
    m = triangulate(Scene((0, 0, 10, 10)))
    node = SearchNode((5, 5), -1, (0, 0), (10, 0), 0, 1, -1, 0.0)
    assert successors(m, node) == []


def test_collinear_root_turns_at_nearer_endpoint():
    scene = random_scene(4)
    mesh = triangulate(scene)
    found = 0
    for pid, poly in enumerate(mesh.polygons):
        ring = poly.vertex_ids
        n = len(ring)
        for k in range(n):
            P = poly.neighbor_ids[k]
            if P < 0:
                continue
            u, v = ring[k], ring[(k + 1) % n]
            far = [e for e in _far_edges(mesh, SearchNode(None, -1, None, None, v, u, P, 0.0)) if e[2] >= 0]
            if not far:
                continue
            for near, other in ((u, v), (v, u)):
                if not mesh.is_corner[near]:
                    continue
                A, B = mesh.vertices[near], mesh.vertices[other]
                r = Point(A.x + 0.3 * (A.x - B.x), A.y + 0.3 * (A.y - B.y))
                node = SearchNode(r, -1, mesh.vertices[v], mesh.vertices[u], v, u, P, 1.0)
                kids = successors(mesh, node)
                assert kids, "expected successors through an interior far edge"
                for c in kids:
                    assert tuple(c.root) == tuple(A)
                    assert c.g == pytest.approx(1.0 + dist(r, A))
                covered = {tuple(sorted((c.left_vertex, c.right_vertex))) for c in kids}
                assert covered == {tuple(sorted(e[:2])) for e in far}
                found += 1
    assert found > 0
