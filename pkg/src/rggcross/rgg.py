"""Random geometric graph on a point cloud."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .geometry import BallWindow
from .pointprocess import PointCloud


@dataclass(frozen=True, eq=False)
class GeometricGraph:
    """Vertices of ``cloud`` joined whenever their distance is at most ``radius``.

    ``edges`` is an (m, 2) int64 array of pairs ``i < j`` in lexicographic order.
    """

    cloud: PointCloud
    radius: float
    edges: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points

    @property
    def n_vertices(self) -> int:
        return len(self.cloud.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def without_edges(self, drop) -> "GeometricGraph":
        """Copy with the edges at indices ``drop`` removed (the radius is kept)."""
        keep = np.ones(len(self.edges), dtype=bool)
        keep[np.asarray(drop, dtype=np.int64)] = False
        return GeometricGraph(self.cloud, self.radius, self.edges[keep])


def _canonical(pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return np.ascontiguousarray(pairs[order])


def _check_radius(r: float):
    if not r > 0:
        raise ValueError(f"connection radius must be > 0, got {r}")


def build_edges_grid(cloud: PointCloud, r: float) -> GeometricGraph:
    """Exact edge set through a uniform cell grid of side ``r``.

    Each point scans its own and the 26 adjacent cells. Cells are coarsened
    when side ``r`` would need far more cells than points.
    """
    _check_radius(r)
    pts = np.ascontiguousarray(cloud.points, dtype=float)
    if len(pts) < 2:
        return GeometricGraph(cloud, r, np.empty((0, 2), dtype=np.int64))
    pairs = _kernels.grid_pairs_within(pts, float(r))
    return GeometricGraph(cloud, r, _canonical(pairs))


def build_edges_bruteforce(cloud: PointCloud, r: float) -> GeometricGraph:
    """All-pairs reference construction."""
    _check_radius(r)
    pts = np.asarray(cloud.points, dtype=float)
    n = len(pts)
    chunks = []
    for start in range(0, n, 512):
        block = pts[start : start + 512]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        i, j = np.nonzero(d2 <= r * r)
        i = i + start
        keep = i < j
        chunks.append(np.stack([i[keep], j[keep]], axis=1))
    pairs = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return GeometricGraph(cloud, r, _canonical(pairs))


build_edges = build_edges_grid


def expected_edge_count(t: float, r: float, window: BallWindow | None = None) -> float:
    """``t^2 * (4/3 pi r^3) / 2``, ignoring boundary losses (an overestimate)."""
    window = window or BallWindow.unit_volume()
    if r > window.radius:
        raise ValueError("approximation only meaningful for r <= ball radius")
    return t * t * (4.0 / 3.0 * math.pi * r**3) / 2.0


def write_graph_csv(graph: GeometricGraph, vertices_path, edges_path) -> None:
    with open(Path(vertices_path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vx", "vy", "vz"])
        w.writerows([repr(float(c)) for c in p] for p in graph.points)
    with open(Path(edges_path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j"])
        w.writerows((int(i), int(j)) for i, j in graph.edges)
