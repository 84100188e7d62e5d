"""Synthetic maps and target sets.

Maps follow the tiling scheme used in the benchmarks: the square is divided
into a ceil(sqrt(|O|)) x ceil(sqrt(|O|)) grid and each obstacle is scaled into
its own cell with a margin, so obstacles never touch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .geometry import Point, is_simple_polygon, point_in_polygon, signed_area
from .navmesh import Mesh, Scene, locate_point

CELL_SIZE = 100.0
CELL_MARGIN = 0.1


class ScenarioError(ValueError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def random_star_polygon(rng: np.random.Generator, n: int, irregularity: float = 0.6) -> List[Point]:
    """Simple star-shaped polygon with ``n`` vertices around the origin, radius <= 1."""
    while True:
        angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * math.pi]]))
        if gaps.max() >= math.pi or gaps.min() < 0.05:
            continue
        radii = rng.uniform(1.0 - irregularity, 1.0, n)
        ring = [Point(float(r * math.cos(a)), float(r * math.sin(a))) for r, a in zip(radii, angles)]
        if is_simple_polygon(ring):
            return ring


def generate_tiled_map(
    obstacle_polygons: Sequence[Sequence],
    seed: int,
    cell_size: float = CELL_SIZE,
    margin: float = CELL_MARGIN,
    targets: Sequence = (),
) -> Scene:
    """Place each polygon in its own cell of a ceil(sqrt(n))-square grid.

    Raises :class:`ScenarioError` naming the first non-simple polygon.
    """
    polys = [[(float(x), float(y)) for x, y in p] for p in obstacle_polygons]
    for i, p in enumerate(polys):
        if not is_simple_polygon(p):
            raise ScenarioError(f"obstacle polygon {i} is not simple")
    n = len(polys)
    side = math.ceil(math.sqrt(n)) if n else 1
    rng = make_rng(seed)
    cells = rng.permutation(side * side)[:n].tolist()
    obstacles = []
    inner = cell_size * (1.0 - 2.0 * margin)
    for p, cell in zip(polys, cells):
        cx, cy = cell % side, cell // side
        xs = [v[0] for v in p]
        ys = [v[1] for v in p]
        w = max(max(xs) - min(xs), max(ys) - min(ys))
        scale = inner / w
        ox = cx * cell_size + margin * cell_size + (inner - scale * (max(xs) - min(xs))) / 2
        oy = cy * cell_size + margin * cell_size + (inner - scale * (max(ys) - min(ys))) / 2
        obstacles.append([Point(ox + scale * (x - min(xs)), oy + scale * (y - min(ys))) for x, y in p])
    size = side * cell_size
    return Scene((0.0, 0.0, size, size), obstacles, list(targets))


def random_scene(
    seed: int,
    max_obstacle_vertices: int = 30,
    min_targets: int = 10,
    max_targets: int = 50,
    vertex_range=(3, 8),
) -> Scene:
    """Small tiled scene with star-shaped obstacles and uniform targets."""
    rng = make_rng(seed)
    polys = []
    budget = max_obstacle_vertices
    while budget >= vertex_range[0]:
        n = int(rng.integers(vertex_range[0], min(vertex_range[1], budget) + 1))
        polys.append(random_star_polygon(rng, n))
        budget -= n
        if rng.random() < 0.15:
            break
    scene = generate_tiled_map(polys, int(rng.integers(0, 2**31)))
    count = int(rng.integers(min_targets, max_targets + 1))
    scene.targets = sample_free_points(scene, count, rng)
    return scene


def sample_free_points(scene: Scene, count: int, rng: np.random.Generator) -> List[Point]:
    """Uniform points outside every obstacle (rejection sampling)."""
    x0, y0, x1, y1 = scene.boundary
    out = []
    while len(out) < count:
        p = Point(float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if not any(point_in_polygon(p, ring) for ring in scene.obstacles):
            out.append(p)
    return out


@dataclass
class TargetConfig:
    density: float = 0.01
    distribution: str = "random"
    cluster_size: int = 50
    seed: int = 0


def generate_targets(mesh: Mesh, config: TargetConfig) -> List[Point]:
    """Targets on the traversable part of ``mesh``.

    ``random``: round(density * |V|) uniform points.  ``clustered``:
    ``cluster_size`` points scattered around one random traversable centre
    with a Gaussian of sigma = 2% of the map extent, resampled until
    traversable.
    """
    if not 0.0 < config.density <= 1.0:
        raise ScenarioError(f"density must be in (0, 1], got {config.density}")
    rng = make_rng(config.seed)
    x0, y0, x1, y1 = mesh.bounds()

    def uniform():
        while True:
            p = Point(float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
            if locate_point(mesh, p) is not None:
                return p

    if config.distribution == "random":
        count = round(config.density * len(mesh.vertices))
        if count < 1:
            raise ScenarioError(
                f"density {config.density} gives {config.density * len(mesh.vertices):.3g} targets on "
                f"{len(mesh.vertices)} vertices; need at least 1"
            )
        return [uniform() for _ in range(count)]
    if config.distribution == "clustered":
        if config.cluster_size < 1:
            raise ScenarioError("cluster_size must be at least 1")
        centre = uniform()
        sigma = 0.02 * max(x1 - x0, y1 - y0)
        out = []
        while len(out) < config.cluster_size:
            p = Point(float(rng.normal(centre.x, sigma)), float(rng.normal(centre.y, sigma)))
            if x0 <= p.x <= x1 and y0 <= p.y <= y1 and locate_point(mesh, p) is not None:
                out.append(p)
        return out
    raise ScenarioError(f"unknown distribution {config.distribution!r}")


def sample_queries(mesh: Mesh, count: int, seed: int) -> List[Point]:
    rng = make_rng(seed)
    x0, y0, x1, y1 = mesh.bounds()
    out = []
    while len(out) < count:
        p = Point(float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if locate_point(mesh, p) is not None:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# hand-built scenes


def spiral_scene() -> Scene:
    """Query inside a C-shaped wall; the Euclidean-nearest target sits just
    outside its back while three others line up beyond the opening."""
    wall = [(35, 30), (70, 30), (70, 70), (35, 70), (35, 62), (62, 62), (62, 38), (35, 38)]
    targets = [(73, 50), (25, 50), (15, 50), (5, 50)]
    return Scene((0, 0, 100, 100), [wall], targets)


SPIRAL_QUERY = Point(55.0, 50.0)


def corridor_scene(n: int = 32, length: float = 200.0, gap: float = 10.0) -> Scene:
    """Worst case for fence labels: two rows of thin walls form a corridor and
    ``n`` targets on a circle around one end are all equally far from the
    edges in the middle of the corridor."""
    walls = []
    seg = length / 8
    for i in range(8):
        xa = 20 + i * seg + 1.0
        xb = 20 + (i + 1) * seg - 1.0
        walls.append([(xa, 100 + gap / 2), (xb, 100 + gap / 2), (xb, 100 + gap / 2 + 4), (xa, 100 + gap / 2 + 4)])
        walls.append([(xa, 100 - gap / 2 - 4), (xb, 100 - gap / 2 - 4), (xb, 100 - gap / 2), (xa, 100 - gap / 2)])
    # targets on an arc centred on the corridor mouth, all at the same distance from it
    cx, cy = 20 + length + 1.0, 100.0
    targets = []
    for k in range(n):
        a = -0.45 * math.pi + 0.9 * math.pi * k / max(n - 1, 1)
        targets.append((cx + 15.0 * math.cos(a), cy + 15.0 * math.sin(a)))
    return Scene((0, 0, 20 + length + 40.0, 200), walls, targets)
