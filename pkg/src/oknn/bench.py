"""Batch query runs across algorithms, cross-checking and CSV output."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .fence import fence_check_query, knn_with_hf, preprocess
from .ier import ier_knn
from .navmesh import Mesh, Scene, load_mesh, load_scene, save_scene, triangulate
from .oracle import Oracle
from .scenarios import (
    TargetConfig,
    generate_targets,
    generate_tiled_map,
    make_rng,
    random_star_polygon,
    sample_queries,
)
from .search import QueryResult, knn_hv, knn_ht
from .spatial import TargetSet

ALGORITHMS = ("hv", "ht", "hf", "fc", "ier", "oracle")
CSV_COLUMNS = [
    "algo",
    "query_id",
    "k",
    "rank",
    "target_id",
    "distance",
    "expansions",
    "generated",
    "heuristic_us",
    "total_us",
    "false_hits",
]
TIMING_COLUMNS = ("heuristic_us", "total_us")
CROSS_CHECK_RTOL = 1e-6
QUERY_SEED_SALT = 0x5EED


class ConfigError(ValueError):
    pass


class DisagreementError(RuntimeError):
    """Two algorithms returned different distances for the same query."""

    def __init__(self, message: str, bundle: dict):
        super().__init__(message)
        self.bundle = bundle


@dataclass
class ScenarioConfig:
    map: str = "synthetic"
    obstacles: int = 50
    k: int = 5
    density: float = 0.01
    distribution: str = "random"
    cluster_size: int = 50
    query_count: int = 20
    seed: int = 0
    algorithms: Optional[List[str]] = None

    def validate(self):
        if not 0.0 < self.density <= 1.0:
            raise ConfigError(f"density must be in (0, 1], got {self.density}")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.query_count < 1:
            raise ConfigError("query_count must be at least 1")
        if self.distribution not in ("random", "clustered"):
            raise ConfigError(f"unknown distribution {self.distribution!r}")
        if self.algorithms is not None:
            if not self.algorithms:
                raise ConfigError("empty algorithm list")
            for a in self.algorithms:
                if a not in ALGORITHMS:
                    raise ConfigError(f"unknown algorithm {a!r}")
            if "fc" in self.algorithms and self.k != 1:
                raise ConfigError("fence checking (fc) answers k=1 only")

    def resolved_algorithms(self) -> List[str]:
        if self.algorithms is not None:
            return list(self.algorithms)
        algos = ["hv", "hf", "ier"]
        if self.k == 1:
            algos.append("fc")
        return algos


_INT_KEYS = {"obstacles", "k", "cluster_size", "query_count", "seed"}
_FLOAT_KEYS = {"density"}


def parse_config(text: str) -> ScenarioConfig:
    """Read ``key = value`` lines (``#`` comments, optional quotes)."""
    cfg = ScenarioConfig()
    known = set(ScenarioConfig.__dataclass_fields__)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        value = value.strip("\"'")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                setattr(cfg, key, int(value, 0))
            elif key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key == "algorithms":
                items = [a.strip().strip("\"'") for a in value.strip("[]").split(",")]
                cfg.algorithms = [a for a in items if a]
            else:
                setattr(cfg, key, value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    cfg.validate()
    return cfg


@dataclass
class RunRecord:
    algo: str
    query_id: int
    k: int
    targets: List[int]
    distances: List[float]
    expansions: int = 0
    generated: int = 0
    heuristic_evals: int = 0
    heuristic_us: float = 0.0
    total_us: float = 0.0
    false_hits: int = 0
    labels_touched: int = 0


@dataclass
class SuiteResult:
    records: List[RunRecord]
    scene: Scene
    mesh: Mesh
    targets: List
    queries: List
    build_seconds: float = 0.0
    store_stats: dict = field(default_factory=dict)


def synthetic_scene(obstacles: int, seed: int) -> Scene:
    rng = make_rng(seed)
    polys = [random_star_polygon(rng, int(rng.integers(3, 12))) for _ in range(obstacles)]
    return generate_tiled_map(polys, seed)


def _load_map(cfg: ScenarioConfig):
    if cfg.map == "synthetic":
        scene = synthetic_scene(cfg.obstacles, cfg.seed)
        return scene, triangulate(scene)
    with open(cfg.map) as fh:
        text = fh.read()
    if text.lstrip().startswith("scene"):
        scene = load_scene(text)
        return scene, triangulate(scene)
    return None, load_mesh(text)


def _run_one(algo, mesh, ts, store, q, k, oracle) -> QueryResult:
    if algo == "hv":
        return knn_hv(mesh, ts, q, k)
    if algo == "ht":
        return knn_ht(mesh, ts, q, k)
    if algo == "hf":
        return knn_with_hf(mesh, store, ts, q, k)
    if algo == "fc":
        return fence_check_query(mesh, store, ts, q)
    if algo == "ier":
        return ier_knn(mesh, ts, q, k)
    if algo == "oracle":
        from .search import Neighbour

        t0 = time.perf_counter()
        res = QueryResult(k)
        res.neighbours = [Neighbour(t, d) for t, d in oracle.knn(q, k)]
        res.complete = len(res.neighbours) >= k
        res.total_time = time.perf_counter() - t0
        return res
    raise ConfigError(f"unknown algorithm {algo!r}")


def run_suite(cfg: ScenarioConfig, algorithms: Optional[Sequence[str]] = None) -> SuiteResult:
    """Run every algorithm on every query, then cross-check distances.

    Raises :class:`DisagreementError` (with a repro bundle) when two
    algorithms disagree beyond a relative 1e-6.
    """
    if algorithms is not None:
        cfg.algorithms = list(algorithms)
    cfg.validate()
    algos = cfg.resolved_algorithms()
    scene, mesh = _load_map(cfg)
    targets = generate_targets(
        mesh, TargetConfig(cfg.density, cfg.distribution, cfg.cluster_size, cfg.seed)
    )
    ts = TargetSet(targets)
    queries = sample_queries(mesh, cfg.query_count, cfg.seed ^ QUERY_SEED_SALT)
    store = None
    build = 0.0
    if "hf" in algos or "fc" in algos:
        t0 = time.perf_counter()
        store = preprocess(mesh, ts)
        build = time.perf_counter() - t0
    oracle = None
    if "oracle" in algos:
        if scene is None:
            raise ConfigError("the oracle needs a scene map, not a bare mesh")
        scene = Scene(scene.boundary, scene.obstacles, targets)
        oracle = Oracle(scene)
    records = []
    for algo in algos:
        k = 1 if algo == "fc" else cfg.k
        for qid, q in enumerate(queries):
            res = _run_one(algo, mesh, ts, store, q, k, oracle)
            records.append(
                RunRecord(
                    algo,
                    qid,
                    k,
                    res.targets,
                    res.distances,
                    res.expansions,
                    res.generated,
                    res.heuristic_evals,
                    res.heuristic_time * 1e6,
                    res.total_time * 1e6,
                    res.false_hits,
                    res.labels_touched,
                )
            )
    result = SuiteResult(records, scene, mesh, targets, queries, build, store.stats if store else {})
    cross_check(result, cfg)
    return result


def cross_check(result: SuiteResult, cfg: ScenarioConfig, rtol: float = CROSS_CHECK_RTOL):
    by_query: Dict[int, List[RunRecord]] = {}
    for rec in result.records:
        by_query.setdefault(rec.query_id, []).append(rec)
    for qid, recs in sorted(by_query.items()):
        ref = recs[0]
        for other in recs[1:]:
            n = min(ref.k, other.k)
            a, b = ref.distances[:n], other.distances[:n]
            same = len(a) == len(b) and all(abs(x - y) <= rtol * max(abs(x), abs(y), 1.0) for x, y in zip(a, b))
            if not same:
                bundle = {
                    "seed": cfg.seed,
                    "query_id": qid,
                    "query": tuple(result.queries[qid]),
                    "distances": {r.algo: r.distances for r in recs},
                    "scene": save_scene(Scene(result.scene.boundary, result.scene.obstacles, result.targets))
                    if result.scene is not None
                    else None,
                    "config": cfg,
                }
                raise DisagreementError(
                    f"query {qid}: {ref.algo} gives {a} but {other.algo} gives {b}", bundle
                )


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(records: Sequence[RunRecord], mask_timing: bool = False) -> str:
    """One row per (record, rank); a query with no answer gets a single row with rank 0."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        h_us = "" if mask_timing else f"{rec.heuristic_us:.3f}"
        t_us = "" if mask_timing else f"{rec.total_us:.3f}"
        rows = list(zip(rec.targets, rec.distances)) or [("", "")]
        for rank, (tid, d) in enumerate(rows, start=1 if rec.targets else 0):
            w.writerow(
                [rec.algo, rec.query_id, rec.k, rank, tid, _fmt(d), rec.expansions, rec.generated, h_us, t_us, rec.false_hits]
            )
    return out.getvalue()


def mask_timing_columns(csv_text: str) -> str:
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return csv_text
    idx = [rows[0].index(c) for c in TIMING_COLUMNS]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(rows[0])
    for row in rows[1:]:
        for i in idx:
            row[i] = ""
        w.writerow(row)
    return out.getvalue()


# ---------------------------------------------------------------------------
# trend report: nodes generated by h_v and h_f at very low density


def trend_report(vertices: int = 2000, density: float = 0.0001, k: int = 1, queries: int = 50, seed: int = 0) -> dict:
    """Mean nodes generated per query for h_v and h_f on one synthetic map.

    round(density * |V|) may be 0 at desk scale; at least one target is used.
    """
    obstacles = max(1, round((vertices - 4) / 7))
    scene = synthetic_scene(obstacles, seed)
    mesh = triangulate(scene)
    count = max(1, round(density * len(mesh.vertices)))
    rng = make_rng(seed + 1)
    pts = sample_queries(mesh, count, int(rng.integers(0, 2**31)))
    ts = TargetSet(pts)
    store = preprocess(mesh, ts)
    qs = sample_queries(mesh, queries, seed ^ QUERY_SEED_SALT)
    gen = {"hv": [], "hf": []}
    for q in qs:
        a = knn_hv(mesh, ts, q, k)
        b = knn_with_hf(mesh, store, ts, q, k)
        if a.distances and b.distances and not math.isclose(a.distances[0], b.distances[0], rel_tol=CROSS_CHECK_RTOL):
            raise DisagreementError(f"h_v and h_f disagree at {tuple(q)}", {"seed": seed, "query": tuple(q)})
        gen["hv"].append(a.generated)
        gen["hf"].append(b.generated)
    mean_hv = sum(gen["hv"]) / len(qs)
    mean_hf = sum(gen["hf"]) / len(qs)
    return {
        "vertices": len(mesh.vertices),
        "targets": count,
        "requested_targets": density * len(mesh.vertices),
        "k": k,
        "queries": len(qs),
        "generated_hv": mean_hv,
        "generated_hf": mean_hf,
        "trend_holds": mean_hf < mean_hv,
    }


def format_trend(report: dict) -> str:
    lines = [
        f"map: {report['vertices']} vertices, {report['targets']} target(s) "
        f"(density gives {report['requested_targets']:.3g}), k={report['k']}, {report['queries']} queries",
        f"{'algorithm':<10}{'mean nodes generated':>22}",
        f"{'h_v':<10}{report['generated_hv']:>22.1f}",
        f"{'h_f':<10}{report['generated_hf']:>22.1f}",
    ]
    if not report["trend_holds"]:
        lines.append("NOTE: h_f generated at least as many nodes as h_v on this map (trend reversed)")
    return "\n".join(lines)
