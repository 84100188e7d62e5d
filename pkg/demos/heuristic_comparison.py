"""Nodes generated by each heuristic on one random scene.

h_v ignores targets and floods outward; h_t aims at the unretrieved
targets; h_f reads the fence labels left by preprocessing.  All of them
return the same answers, which the visibility-graph oracle confirms.

    python3 demos/heuristic_comparison.py [seed]
"""

import sys

from oknn.fence import knn_with_hf, preprocess
from oknn.ier import ier_knn
from oknn.navmesh import triangulate
from oknn.oracle import Oracle
from oknn.scenarios import random_scene, sample_queries
from oknn.search import knn_ht, knn_hv
from oknn.spatial import TargetSet

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 3
scene = random_scene(seed)
mesh = triangulate(scene)
ts = TargetSet(scene.targets)
store = preprocess(mesh, ts)
oracle = Oracle(scene)
print(f"scene {seed}: {len(scene.obstacles)} obstacles, {len(ts)} targets, {store.total_labels()} fence labels\n")

print(f"{'k':>2} {'h_v':>6} {'h_t':>6} {'h_f':>6} {'IER searches':>13}  answers agree")
for k in (1, 3, 5):
    totals = [0, 0, 0, 0]
    agree = True
    for q in sample_queries(mesh, 20, seed):
        runs = [knn_hv(mesh, ts, q, k), knn_ht(mesh, ts, q, k), knn_with_hf(mesh, store, ts, q, k)]
        ier = ier_knn(mesh, ts, q, k)
        for i, r in enumerate(runs):
            totals[i] += r.generated
        totals[3] += ier.searches
        want = sorted(oracle.distances_from(q))[:k]
        for r in runs + [ier]:
            agree &= all(abs(a - b) <= 1e-9 * max(1.0, b) for a, b in zip(r.distances, want))
    print(f"{k:>2} {totals[0]:>6} {totals[1]:>6} {totals[2]:>6} {totals[3]:>13}  {agree}")
print("\n(node counts summed over 20 queries)")
