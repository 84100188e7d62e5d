import math
from functools import lru_cache

import pytest

from oknn.navmesh import triangulate
from oknn.oracle import Oracle
from oknn.scenarios import random_scene, sample_queries
from oknn.spatial import TargetSet

REL_TOL = 1e-9

_CRITERIA = {}


def close(a, b, rel=REL_TOL):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1.0)


class Instance:
    """A random scene with its mesh, target index and oracle, built lazily."""

    def __init__(self, seed, **kw):
        self.seed = seed
        self.scene = random_scene(seed, **kw)
        self.mesh = triangulate(self.scene)
        self.targets = TargetSet(self.scene.targets)
        self._oracle = None
        self._store = None

    @property
    def oracle(self):
        if self._oracle is None:
            self._oracle = Oracle(self.scene)
        return self._oracle

    @property
    def store(self):
        if self._store is None:
            from oknn.fence import preprocess

            self._store = preprocess(self.mesh, self.targets)
        return self._store

    def queries(self, n, salt=0):
        return sample_queries(self.mesh, n, self.seed * 7919 + salt)


@lru_cache(maxsize=None)
def instance(seed):
    return Instance(seed)


def knn_mismatch(pairs, oracle_dists, k):
    """None if ``pairs`` [(target, d)] is a valid k-NN answer for the oracle
    distance vector; otherwise a short description.  Targets may differ from
    the oracle's only where distances tie."""
    reach = sorted(d for d in oracle_dists if math.isfinite(d))
    want = reach[:k]
    if len(pairs) != len(want):
        return f"got {len(pairs)} neighbours, oracle has {len(want)}"
    if len({t for t, _ in pairs}) != len(pairs):
        return "duplicate target in answer"
    for i, ((t, d), w) in enumerate(zip(pairs, want)):
        if not close(d, w):
            return f"rank {i + 1}: distance {d!r} vs oracle {w!r}"
        if not close(float(oracle_dists[t]), d):
            return f"rank {i + 1}: target {t} is at {oracle_dists[t]!r}, reported {d!r}"
    return None


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(_CRITERIA, key=str):
        terminalreporter.write_line(_CRITERIA[key])
