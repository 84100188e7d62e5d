"""Incremental Euclidean restriction over point-to-point searches.

Targets are streamed in increasing straight-line distance from the query.
Each one is searched for its obstacle distance, and the stream stops once
the next straight-line distance exceeds the current k-th best obstacle
distance: no later target can beat it.
"""

from __future__ import annotations

import heapq
import math
import time
from typing import Iterator, Tuple

from .navmesh import Mesh, NotTraversableError, locate_all
from .search import Neighbour, QueryResult, SearchTrace, point_to_point
from .spatial import RTree, TargetSet

__all__ = ["TargetSet", "RTree", "incremental_euclidean_nn", "ier_knn"]


def incremental_euclidean_nn(target_set: TargetSet, q) -> Iterator[Tuple[int, float]]:
    """Resumable stream of ``(target id, d_e)`` in nondecreasing distance, ties by id."""
    return target_set.incremental(q)


class CandidateHeap:
    """The k smallest (distance, target) pairs seen so far."""

    def __init__(self, k: int):
        self.k = k
        self._heap = []  # (-distance, -target)

    def __len__(self):
        return len(self._heap)

    @property
    def full(self) -> bool:
        return len(self._heap) >= self.k

    def top(self) -> float:
        return -self._heap[0][0] if self._heap else math.inf

    def offer(self, d: float, tid: int) -> bool:
        item = (-d, -tid)
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, item)
            return True
        if item > self._heap[0]:
            heapq.heapreplace(self._heap, item)
            return True
        return False

    def sorted(self):
        return sorted((-d, -t) for d, t in self._heap)


def ier_knn(mesh: Mesh, target_set: TargetSet, q, k: int, terminate: bool = True) -> QueryResult:
    """k nearest targets by obstacle distance.

    Every streamed target is searched, including the one whose straight-line
    distance ends the stream; that last probe is not a false hit, so with
    distinct distances ``searches == k + false_hits + 1``.  Unreachable
    targets count as false hits.  ``terminate=False`` searches every target.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not locate_all(mesh, q):
        raise NotTraversableError(f"point {tuple(q)} is not in traversable space")
    t0 = time.perf_counter()
    result = QueryResult(k)
    heap = CandidateHeap(k)
    paths = {}
    searched = set()
    trace = SearchTrace()
    for tid, de in incremental_euclidean_nn(target_set, q):
        # d_e > current k-th obstacle distance: this target and all later ones lose
        stop = terminate and heap.full and de > heap.top()
        result.searches += 1
        res = point_to_point(mesh, q, target_set.points[tid], trace=trace)
        if stop:
            break
        searched.add(tid)
        if res is None:
            continue
        d, path = res
        if heap.offer(d, tid):
            paths[tid] = path
    answer = heap.sorted()
    result.neighbours = [Neighbour(t, d, paths[t]) for d, t in answer]
    result.false_hits = len(searched) - len(answer)
    result.complete = len(answer) >= k
    result.take_trace(trace)
    result.total_time = time.perf_counter() - t0
    return result
