"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 cross-check
disagreement.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional

from .bench import ConfigError, DisagreementError, parse_config, run_suite, write_csv
from .fence import StaleStoreError, StoreFormatError, fence_check_nn, knn_with_hf, load_store, preprocess, save_store
from .geometry import signed_area
from .ier import ier_knn
from .navmesh import (
    NO_NEIGHBOUR,
    MeshFormatError,
    NotTraversableError,
    Scene,
    TriangulationError,
    load_mesh,
    load_scene,
    load_targets,
    locate_point,
    save_mesh,
    save_scene,
    save_targets,
    triangulate,
    validate,
)
from .oracle import Oracle
from .scenarios import ScenarioError, TargetConfig, generate_targets, generate_tiled_map
from .search import knn_hv, knn_ht
from .spatial import TargetSet

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_DISAGREE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _point(text: str):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected X,Y but got {text!r}") from None
    return (x, y)


def scene_from_mesh(mesh, targets=()) -> Scene:
    """Obstacles recovered as the clockwise boundary loops (holes) of the mesh."""
    nxt = {}
    for poly in mesh.polygons:
        ring = poly.vertex_ids
        n = len(ring)
        for i, nb in enumerate(poly.neighbor_ids):
            if nb == NO_NEIGHBOUR:
                nxt.setdefault(ring[i], []).append(ring[(i + 1) % n])
    loops = []
    while nxt:
        start = next(iter(nxt))
        loop = [start]
        cur = start
        while True:
            outs = nxt.get(cur)
            if not outs:
                break
            v = outs.pop()
            if not outs:
                del nxt[cur]
            if v == start:
                break
            loop.append(v)
            cur = v
        loops.append([mesh.vertices[v] for v in loop])
    holes = [loop for loop in loops if len(loop) >= 3 and signed_area(loop) < 0]
    x0, y0, x1, y1 = mesh.bounds()
    return Scene((x0, y0, x1, y1), holes, list(targets))


def cmd_mesh_build(args):
    scene = load_scene(_read(args.scene))
    mesh = triangulate(scene)
    _write(args.output, save_mesh(mesh))
    print(f"{len(mesh.vertices)} vertices, {len(mesh.polygons)} polygons", file=sys.stderr)
    return EXIT_OK


def cmd_mesh_check(args):
    mesh = load_mesh(_read(args.mesh), check=False)
    problems = validate(mesh)
    for v in problems:
        print(f"{v.entity}: {v.rule}: {v.message}")
    if problems:
        return EXIT_INVALID
    print(f"ok: {len(mesh.vertices)} vertices, {len(mesh.polygons)} polygons, {len(mesh.edges)} edges")
    return EXIT_OK


def cmd_fence_build(args):
    mesh = load_mesh(_read(args.mesh))
    ts = TargetSet(load_targets(_read(args.targets)))
    t0 = time.perf_counter()
    store = preprocess(mesh, ts)
    elapsed = time.perf_counter() - t0
    with open(args.output, "wb") as fh:
        fh.write(save_store(store, mesh))
    print(f"build time: {elapsed:.3f} s")
    print(f"labels: {store.stats['labels']} on {store.stats['fenced_edges']} fenced edges")
    print("labels per edge histogram:")
    for count, edges in store.histogram().items():
        print(f"  {count:>4} label(s): {edges} edge(s)")
    return EXIT_OK


def cmd_query(args):
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    mesh = load_mesh(_read(args.mesh))
    points = load_targets(_read(args.targets))
    ts = TargetSet(points)
    q = _point(args.q)
    store = None
    if args.algo in ("hf", "fc"):
        if args.store:
            with open(args.store, "rb") as fh:
                store = load_store(fh.read(), mesh, ts)
        else:
            store = preprocess(mesh, ts)
    if args.algo == "fc" and args.k != 1:
        raise UsageError("fence checking (fc) answers k=1 only")
    t0 = time.perf_counter()
    if args.algo == "hv":
        res = knn_hv(mesh, ts, q, args.k)
        rows = [(n.target, n.distance) for n in res.neighbours]
    elif args.algo == "ht":
        res = knn_ht(mesh, ts, q, args.k)
        rows = [(n.target, n.distance) for n in res.neighbours]
    elif args.algo == "hf":
        res = knn_with_hf(mesh, store, ts, q, args.k)
        rows = [(n.target, n.distance) for n in res.neighbours]
    elif args.algo == "ier":
        res = ier_knn(mesh, ts, q, args.k)
        rows = [(n.target, n.distance) for n in res.neighbours]
    elif args.algo == "fc":
        hit = fence_check_nn(mesh, store, q, ts)
        rows = [] if hit is None else [hit]
    else:
        if locate_point(mesh, q) is None:
            raise NotTraversableError(f"point {tuple(q)} is not in traversable space")
        scene = Scene(*_oracle_scene(args, mesh, points))
        rows = Oracle(scene).knn(q, args.k)
    elapsed = time.perf_counter() - t0
    print("rank target x y distance")
    for rank, (tid, d) in enumerate(rows, start=1):
        p = points[tid]
        print(f"{rank} {tid} {p[0]!r} {p[1]!r} {d!r}")
    if len(rows) < args.k:
        print(f"# only {len(rows)} reachable target(s)")
    print(f"# {args.algo} took {elapsed * 1e3:.3f} ms", file=sys.stderr)
    return EXIT_OK


def _oracle_scene(args, mesh, points):
    if args.scene:
        s = load_scene(_read(args.scene))
        return s.boundary, s.obstacles, points
    s = scene_from_mesh(mesh, points)
    return s.boundary, s.obstacles, points


def cmd_bench(args):
    cfg = parse_config(_read(args.config))
    try:
        result = run_suite(cfg)
    except DisagreementError as exc:
        print(f"cross-check failed: {exc}", file=sys.stderr)
        b = exc.bundle
        print(f"repro: seed={b['seed']} query_id={b['query_id']} query={b['query']}", file=sys.stderr)
        if args.output and b.get("scene"):
            with open(args.output + ".repro.scene", "w") as fh:
                fh.write(b["scene"])
            print(f"repro scene written to {args.output}.repro.scene", file=sys.stderr)
        return EXIT_DISAGREE
    _write(args.output, write_csv(result.records))
    if result.store_stats:
        print(f"fence build: {result.build_seconds:.3f} s, {result.store_stats['labels']} labels", file=sys.stderr)
    print(f"{len(result.records)} records", file=sys.stderr)
    return EXIT_OK


def _read_obstacles(text: str):
    if text.lstrip().startswith("scene"):
        return load_scene(text).obstacles
    polys = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        vals = [float(v) for v in line.replace(",", " ").split()]
        if len(vals) < 6 or len(vals) % 2:
            raise MeshFormatError("obstacle needs at least 3 x y pairs", lineno)
        polys.append([(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)])
    return polys


def cmd_gen_tiled(args):
    polys = _read_obstacles(_read(args.obstacles))
    scene = generate_tiled_map(polys, args.seed)
    _write(args.output, save_scene(scene))
    return EXIT_OK


def cmd_gen_targets(args):
    mesh = load_mesh(_read(args.mesh))
    cfg = TargetConfig(args.density, args.dist, args.cluster_size, args.seed)
    pts = generate_targets(mesh, cfg)
    _write(args.output, save_targets(pts))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oknn", description="Obstacle-aware k-nearest-neighbour queries on navigation meshes.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    mesh = sub.add_parser("mesh", help="build or check navigation meshes")
    msub = mesh.add_subparsers(dest="action", parser_class=_Parser)
    msub.required = True
    b = msub.add_parser("build", help="triangulate a scene file")
    b.add_argument("scene")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_mesh_build)
    c = msub.add_parser("check", help="validate a mesh file")
    c.add_argument("mesh")
    c.set_defaults(func=cmd_mesh_check)

    fence = sub.add_parser("fence", help="fence label preprocessing")
    fsub = fence.add_subparsers(dest="action", parser_class=_Parser)
    fsub.required = True
    fb = fsub.add_parser("build", help="build a fence store")
    fb.add_argument("mesh")
    fb.add_argument("targets")
    fb.add_argument("-o", "--output", required=True)
    fb.set_defaults(func=cmd_fence_build)

    q = sub.add_parser("query", help="answer one kNN query")
    q.add_argument("--algo", required=True, choices=["hv", "ht", "hf", "fc", "ier", "oracle"])
    q.add_argument("--mesh", required=True)
    q.add_argument("--store")
    q.add_argument("--scene", help="scene file for the oracle (default: obstacles recovered from the mesh)")
    q.add_argument("--targets", required=True)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--q", required=True, help="query point as X,Y")
    q.set_defaults(func=cmd_query)

    be = sub.add_parser("bench", help="run a benchmark suite with cross-checking")
    be.add_argument("--config", required=True)
    be.add_argument("-o", "--output")
    be.set_defaults(func=cmd_bench)

    gen = sub.add_parser("gen", help="generate maps and targets")
    gsub = gen.add_subparsers(dest="action", parser_class=_Parser)
    gsub.required = True
    gt = gsub.add_parser("tiled", help="tile obstacle polygons into a square map")
    gt.add_argument("--obstacles", required=True)
    gt.add_argument("--seed", type=int, default=0)
    gt.add_argument("-o", "--output")
    gt.set_defaults(func=cmd_gen_tiled)
    gg = gsub.add_parser("targets", help="sample targets on a mesh")
    gg.add_argument("--mesh", required=True)
    gg.add_argument("--density", type=float, required=True)
    gg.add_argument("--dist", choices=["random", "clustered"], default="random")
    gg.add_argument("--cluster-size", type=int, default=50)
    gg.add_argument("--seed", type=int, default=0)
    gg.add_argument("-o", "--output")
    gg.set_defaults(func=cmd_gen_targets)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"oknn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"oknn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        MeshFormatError,
        TriangulationError,
        NotTraversableError,
        StaleStoreError,
        StoreFormatError,
        ScenarioError,
        ValueError,
    ) as exc:
        print(f"oknn: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
