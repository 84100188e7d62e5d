"""What fence preprocessing stores.

Two targets on either side of a long wall.  The flood from both targets is
blocked wherever one source already certifies a shorter path, so each mesh
edge keeps only the labels that can still matter.  The script prints the
labels on a few edges, then shows the blocking and eviction counts and how
much smaller the store is than with blocking switched off.

    python3 demos/fence_labels.py
"""

from oknn.fence import fence_check_nn, load_store, preprocess, save_store
from oknn.navmesh import Scene, triangulate
from oknn.spatial import TargetSet

wall = [(48, 20), (52, 20), (52, 99), (48, 99)]
scene = Scene((0, 0, 100, 100), [wall], [(20, 50), (80, 50)])
mesh = triangulate(scene)
ts = TargetSet(scene.targets)

store = preprocess(mesh, ts)
loose = preprocess(mesh, ts, blocking=False)
print(f"{len(mesh.edges)} edges; {store.total_labels()} labels with blocking, {loose.total_labels()} without")
print("labels per edge:", dict(sorted(store.histogram().items())))

print("\nfirst few fenced edges:")
for eid in sorted(store.fences)[:4]:
    fence = store.fences[eid]
    A, B = (mesh.vertices[v] for v in mesh.edges[eid].endpoints)
    print(f"edge {eid} ({A.x:g},{A.y:g})-({B.x:g},{B.y:g}), upper bound {fence.upper_bound:.2f}")
    for lab in fence.labels:
        print(
            f"   from target {lab.source_target}: root ({lab.root.x:g},{lab.root.y:g}) "
            f"g={lab.g_p:.2f} mindist={lab.mindist:.2f} minmaxdist={lab.minmax:.2f}"
        )

for q in [(10, 90), (90, 90), (50, 10)]:
    tid, d = fence_check_nn(mesh, store, q, ts)
    print(f"\nnearest target to {q}: {tid} at {d:.2f}")

data = save_store(store, mesh)
back = load_store(data, mesh, ts)
print(f"\nstore file: {len(data)} bytes, reloads with {back.total_labels()} labels")
