"""Obstacle-aware k-nearest-neighbour queries over navigation meshes."""

__version__ = "0.1.0"
