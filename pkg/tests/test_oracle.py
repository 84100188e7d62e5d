import itertools
import math

import numpy as np
import pytest

from oknn.geometry import dist, segments_cross_properly
from oknn.navmesh import Scene
from oknn.oracle import Oracle, build_vg, is_visible, oracle_distance, oracle_knn
from oknn.scenarios import random_scene, sample_free_points, make_rng

from conftest import close


def test_k3_without_obstacles():
    pts = [(0, 0), (3, 0), (0, 4)]
    vg = build_vg(Scene((-1, -1, 10, 10)), pts)
    assert sorted(vg.edges()) == [(0, 1), (0, 2), (1, 2)]
    assert vg.weights[1, 2] == 5.0


def test_wall_blocks_edge():
    wall = [(4, -5), (6, -5), (6, 5), (4, 5)]
    scene = Scene((-10, -10, 20, 20), [wall])
    vg = build_vg(scene, [(0, 0), (10, 0)])
    n = len(vg.nodes)
    assert not vg.has_edge(n - 2, n - 1)
    assert not is_visible(scene, (0, 0), (10, 0))
    # grazing a corner is allowed
    assert is_visible(scene, (0, 5), (10, 5))


def test_oracle_distance_examples():
    scene = Scene((0, 0, 10, 10))
    assert oracle_distance(scene, (1, 1), (4, 5)) == 5.0
    assert oracle_distance(scene, (3, 3), (3, 3)) == 0.0


def test_square_detour_takes_nearer_corners():
    box = [(4, 2), (6, 2), (6, 8), (4, 8)]
    scene = Scene((0, 0, 10, 10), [box])
    q, t = (2, 4), (8, 4)
    below = dist(q, (4, 2)) + 2 + dist((6, 2), t)
    above = dist(q, (4, 8)) + 2 + dist((6, 8), t)
    assert oracle_distance(scene, q, t) == pytest.approx(min(below, above), rel=1e-12)


def test_vg_edges_symmetric_and_independently_clear():
    scene = random_scene(4)
    vg = build_vg(scene, scene.targets[:10])
    assert np.array_equal(vg.weights, vg.weights.T)
    edges = [(p, q) for ring in scene.obstacles for p, q in zip(ring, ring[1:] + ring[:1])]
    for u, v in vg.edges():
        a, b = vg.nodes[u], vg.nodes[v]
        assert not any(segments_cross_properly(a, b, c, d) for c, d in edges)


def test_knn_examples():
    scene = Scene((0, 0, 10, 10), [], [(1, 1), (5, 5), (9, 9)])
    assert oracle_knn(scene, (0, 0), 10) == [(0, math.sqrt(2)), (1, math.sqrt(50)), (2, math.sqrt(162))]
    assert oracle_knn(scene, (6, 6), 1) == [(1, math.sqrt(2))]
    with pytest.raises(ValueError):
        oracle_knn(scene, (0, 0), 0)


def test_knn_equals_sorted_pairwise_distances():
    for seed in range(5):
        scene = random_scene(seed, min_targets=5, max_targets=8)
        q = sample_free_points(scene, 1, make_rng(seed + 50))[0]
        want = sorted((oracle_distance(scene, q, t), i) for i, t in enumerate(scene.targets))
        got = oracle_knn(scene, q, len(scene.targets))
        assert [i for _, i in want] == [i for i, _ in got]
        for (d1, _), (_, d2) in zip(want, got):
            assert close(d1, d2)


def test_metric_sanity():
    for seed in range(5):
        scene = random_scene(seed)
        pts = sample_free_points(scene, 6, make_rng(seed + 99))
        oracle = Oracle(scene, targets=pts)
        D = np.array([oracle.distances_from(p) for p in pts])
        assert np.allclose(D, D.T, rtol=0, atol=1e-12 * max(1.0, D.max()))
        for i, j, k in itertools.permutations(range(6), 3):
            assert D[i, k] <= D[i, j] + D[j, k] + 1e-9
        for i, j in itertools.combinations(range(6), 2):
            assert D[i, j] >= dist(pts[i], pts[j]) - 1e-12


def test_batched_distances_match_single_source():
    scene = random_scene(6)
    rng = make_rng(17)
    pts = sample_free_points(scene, 12, rng)
    oracle = Oracle(scene)
    batched = oracle.distances_to_targets(np.array(pts), range(len(scene.targets)))
    for row, p in zip(batched, pts):
        single = oracle.distances_from(p)
        assert np.allclose(row, single, rtol=1e-12, atol=1e-12)
