import math

import pytest

from oknn.fence import (
    StaleStoreError,
    StoreFormatError,
    dominates,
    fence_check_nn,
    knn_with_hf,
    label_dominates,
    load_store,
    mindist_minmaxdist,
    preprocess,
    save_store,
)
from oknn.geometry import Point, dist
from oknn.navmesh import NotTraversableError, Scene, triangulate
from oknn.oracle import Oracle
from oknn.spatial import TargetSet

from conftest import close, instance, knn_mismatch


def test_mindist_minmaxdist_examples():
    md, mm = mindist_minmaxdist((2, 0), (1, 2), (3, 2), (0, 2), (4, 2))
    assert md == 2.0
    assert mm == pytest.approx(math.sqrt(5) + 1, rel=1e-15)
    r = (7, -3)
    md, mm = mindist_minmaxdist(r, (0, 2), (4, 2), (0, 2), (4, 2))
    assert mm == max(dist(r, (0, 2)), dist(r, (4, 2)))
    md, mm = mindist_minmaxdist((0, 2), (0, 2), (0, 2), (0, 2), (4, 2))
    assert (md, mm) == (0.0, 4.0)


def test_dominates_examples():
    assert dominates(1, 3, 2, 2.5)
    assert dominates(1, 3, 2, 2)  # 4 <= 4
    assert not dominates(2, 3, 1, 2)


def test_single_target_two_triangles():
    scene = Scene((0, 0, 10, 10), [], [(7, 2)])
    mesh = triangulate(scene)
    store = preprocess(mesh, TargetSet(scene.targets))
    assert len(mesh.edges) == 5
    for eid, edge in enumerate(mesh.edges):
        labels = store.labels(eid)
        if len(edge.incident) == 1:
            # the flood never crosses the map boundary
            assert labels == []
        else:
            assert len(labels) == 1 and labels[0].source_target == 0


def test_wall_separates_targets():
    """Each edge's labels include a witness for the obstacle-nearest target:
    min over labels of g_p + d_o(m, root) is the distance from the edge
    midpoint m to its nearest target."""
    wall = [(48, 20), (52, 20), (52, 99), (48, 99)]
    scene = Scene((0, 0, 100, 100), [wall], [(20, 50), (80, 50)])
    mesh = triangulate(scene)
    store = preprocess(mesh, TargetSet(scene.targets))
    mids = []
    for eid, edge in enumerate(mesh.edges):
        if len(edge.incident) == 2:
            A, B = (mesh.vertices[v] for v in edge.endpoints)
            mids.append((eid, Point((A.x + B.x) / 2, (A.y + B.y) / 2)))
    roots = sorted({lab.root for f in store.fences.values() for lab in f.labels})
    to_roots = Oracle(scene, targets=roots)
    to_targets = Oracle(scene)
    single = 0
    for eid, m in mids:
        labels = store.labels(eid)
        d_roots = to_roots.distances_from(m)
        best = min(lab.g_p + d_roots[roots.index(lab.root)] for lab in labels)
        d = to_targets.distances_from(m)
        assert close(best, float(d.min())), (eid, m)
        if len({lab.source_target for lab in labels}) == 1:
            assert {lab.source_target for lab in labels} == {int(d.argmin())}
            single += 1
    assert single > 0


def test_fence_invariants_on_random_scenes():
    for seed in range(30):
        inst = instance(seed)
        store = inst.store
        for eid, fence in store.fences.items():
            labels = fence.labels
            assert fence.upper_bound == min(l.g_p + l.minmax for l in labels)
            for lab in labels:
                assert lab.g_p >= 0 and lab.mindist <= lab.minmax + 1e-12
            for i, n1 in enumerate(labels):
                for j, n2 in enumerate(labels):
                    if i != j:
                        assert not label_dominates(n1, n2)


def test_store_roundtrip_and_staleness():
    inst = instance(2)
    data = save_store(inst.store, inst.mesh)
    assert data[:4] == b"FNCE"
    back = load_store(data, inst.mesh, inst.targets)
    assert back.total_labels() == inst.store.total_labels()
    for eid, fence in inst.store.fences.items():
        assert back.fences[eid].labels == fence.labels
        assert back.fences[eid].upper_bound == fence.upper_bound
    assert save_store(back, inst.mesh) == data
    other = TargetSet(inst.scene.targets[1:])
    with pytest.raises(StaleStoreError):
        load_store(data, inst.mesh, other)
    with pytest.raises(StaleStoreError):
        load_store(data, instance(3).mesh)
    with pytest.raises(StoreFormatError):
        load_store(b"XXXX" + data[4:], inst.mesh)
    with pytest.raises(StoreFormatError):
        load_store(data[:-3], inst.mesh)


def test_fence_check_walled_off():
    # q is shut in a room made of four touching walls
    walls = [
        [(30, 30), (70, 30), (70, 32), (30, 32)],
        [(68, 32), (70, 32), (70, 68), (68, 68)],
        [(30, 68), (70, 68), (70, 70), (30, 70)],
        [(30, 32), (32, 32), (32, 68), (30, 68)],
    ]
    scene = Scene((0, 0, 100, 100), walls, [(10, 10)])
    mesh = triangulate(scene)
    ts = TargetSet(scene.targets)
    store = preprocess(mesh, ts)
    assert fence_check_nn(mesh, store, (50, 50), ts) is None
    res = knn_with_hf(mesh, store, ts, (50, 50), 1)
    assert res.neighbours == [] and not res.complete


def test_fence_check_visible_target():
    scene = Scene((0, 0, 10, 10), [], [(7, 3)])
    mesh = triangulate(scene)
    ts = TargetSet(scene.targets)
    store = preprocess(mesh, ts)
    tid, d = fence_check_nn(mesh, store, (2, 8), ts)
    assert tid == 0 and d == pytest.approx(dist((2, 8), (7, 3)), rel=1e-12)


def test_fence_check_not_traversable():
    inst = instance(1)
    with pytest.raises(NotTraversableError):
        fence_check_nn(inst.mesh, inst.store, Point(-5.0, -5.0))


def test_fence_check_agrees_with_hf_k1():
    for seed in range(20):
        inst = instance(seed)
        for q in inst.queries(5, salt=3):
            a = fence_check_nn(inst.mesh, inst.store, q, inst.targets)
            b = knn_with_hf(inst.mesh, inst.store, inst.targets, q, 1)
            assert a is not None and b.neighbours
            assert close(a[1], b.distances[0])


def test_knn_with_hf_all_targets():
    for seed in range(5):
        inst = instance(seed)
        k = len(inst.targets)
        for q in inst.queries(2, salt=4):
            res = knn_with_hf(inst.mesh, inst.store, inst.targets, q, k)
            d = inst.oracle.distances_from(q)
            assert knn_mismatch([(n.target, n.distance) for n in res.neighbours], d, k) is None


def test_knn_with_hf_rejects_k0():
    inst = instance(0)
    with pytest.raises(ValueError):
        knn_with_hf(inst.mesh, inst.store, inst.targets, inst.queries(1)[0], 0)


def test_corridor_labels_accumulate():
    from oknn.scenarios import corridor_scene

    scene = corridor_scene(32)
    mesh = triangulate(scene)
    store = preprocess(mesh, TargetSet(scene.targets))
    assert max(len(f.labels) for f in store.fences.values()) > 3
