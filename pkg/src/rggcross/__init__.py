"""Crossings of 3-D random geometric graphs projected onto planes."""

from .crossings import (
    CrossingSet,
    count_crossings,
    count_crossings_bruteforce,
    count_crossings_grid,
    crossing_counts_on_planes,
    segment_intersection_2d,
)
from .geometry import (
    BallWindow,
    Disk,
    ProjectionPlane,
    Rect,
    chord_length,
    plane_from_sphere_point,
    project,
    sample_sphere_pp,
    spherical_distance,
)
from .pointprocess import PointCloud, poisson_count, sample_poisson_ball
from .rgg import GeometricGraph, build_edges_bruteforce, build_edges_grid, expected_edge_count
from .theory import ModelConstants, RegimeSpec, expected_crossings, radius_for_regime

__version__ = "0.1.0"

__all__ = [
    "BallWindow",
    "CrossingSet",
    "Disk",
    "GeometricGraph",
    "ModelConstants",
    "PointCloud",
    "ProjectionPlane",
    "Rect",
    "RegimeSpec",
    "build_edges_bruteforce",
    "build_edges_grid",
    "chord_length",
    "count_crossings",
    "count_crossings_bruteforce",
    "count_crossings_grid",
    "crossing_counts_on_planes",
    "expected_crossings",
    "expected_edge_count",
    "plane_from_sphere_point",
    "poisson_count",
    "project",
    "radius_for_regime",
    "sample_poisson_ball",
    "sample_sphere_pp",
    "segment_intersection_2d",
    "spherical_distance",
]
