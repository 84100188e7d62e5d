"""Why Euclidean order misleads: the spiral scene.

The query sits inside a C-shaped wall.  The target straight-line nearest to
it lies just behind the wall's back, so any walk has to leave through the
opening on the far side.  This script answers the same 1-NN query four ways
and prints the shortest path found for the winner.

    python3 demos/spiral_walkthrough.py
"""

from oknn.fence import fence_check_nn, knn_with_hf, preprocess
from oknn.geometry import dist
from oknn.ier import ier_knn
from oknn.navmesh import triangulate
from oknn.oracle import oracle_knn
from oknn.scenarios import SPIRAL_QUERY, spiral_scene
from oknn.search import knn_hv, point_to_point
from oknn.spatial import TargetSet

scene = spiral_scene()
mesh = triangulate(scene)
ts = TargetSet(scene.targets)
q = SPIRAL_QUERY

print(f"mesh: {len(mesh.vertices)} vertices, {len(mesh.polygons)} polygons")
print(f"query {tuple(q)}")
print("\nstraight-line distances:")
for tid, p in enumerate(ts.points):
    print(f"  target {tid} at {tuple(p)}: {dist(q, p):6.2f}")

print("\nobstacle distances:")
for tid, d in oracle_knn(scene, q, len(ts)):
    print(f"  target {tid}: {d:6.2f}")

hv = knn_hv(mesh, ts, q, 1)
print(f"\nh_v search:  target {hv.targets[0]} at {hv.distances[0]:.2f}, {hv.generated} nodes generated")

ier = ier_knn(mesh, ts, q, 1)
print(
    f"IER:         target {ier.targets[0]} at {ier.distances[0]:.2f}, "
    f"{ier.searches} point-to-point searches, {ier.false_hits} false hit(s)"
)

store = preprocess(mesh, ts)
tid, d = fence_check_nn(mesh, store, q, ts)
hf = knn_with_hf(mesh, store, ts, q, 1)
print(f"fence check: target {tid} at {d:.2f}")
print(f"h_f search:  target {hf.targets[0]} at {hf.distances[0]:.2f}, {hf.generated} nodes generated")

length, path = point_to_point(mesh, q, ts.points[hv.targets[0]])
print("\npath to the nearest target:")
for p in path:
    print(f"  ({p[0]:.1f}, {p[1]:.1f})")
print(f"length {length:.2f}")
