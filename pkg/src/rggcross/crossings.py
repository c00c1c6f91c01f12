"""Crossings of projected graph edges on a plane.

Two edges cross on a plane when their projected closed segments meet and the
edges share no vertex. Each unordered edge pair is counted once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .geometry import ProjectionPlane, Region2, plane_from_sphere_point
from .rgg import GeometricGraph


class Crossing(NamedTuple):
    edge_a: int
    edge_b: int
    location: tuple[float, float]


@dataclass(frozen=True, eq=False)
class CrossingSet:
    """Crossings of one graph on one plane, sorted by ``(edge_a, edge_b)``."""

    plane: ProjectionPlane
    edge_a: np.ndarray
    edge_b: np.ndarray
    locations: np.ndarray  # (k, 2) witness points in plane coordinates
    degenerate_hits: int = 0

    @property
    def count(self) -> int:
        return len(self.edge_a)

    def __len__(self):
        return self.count

    @property
    def crossings(self) -> list[Crossing]:
        return [
            Crossing(int(a), int(b), (float(u), float(v)))
            for a, b, (u, v) in zip(self.edge_a, self.edge_b, self.locations)
        ]

    def pairs(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in zip(self.edge_a, self.edge_b)}


# ---------------------------------------------------------------------------
# scalar predicate


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _within_box(a, b, c) -> bool:
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(
        a[1], b[1]
    )


def _classify(p1, p2, q1, q2) -> tuple[int, tuple[float, float] | None]:
    o1 = _orient(p1, p2, q1)
    o2 = _orient(p1, p2, q2)
    o3 = _orient(q1, q2, p1)
    o4 = _orient(q1, q2, p2)
    if o1 != 0.0 and o2 != 0.0 and o3 != 0.0 and o4 != 0.0:
        if (o1 > 0) != (o2 > 0) and (o3 > 0) != (o4 > 0):
            dx, dy = p2[0] - p1[0], p2[1] - p1[1]
            ex, ey = q2[0] - q1[0], q2[1] - q1[1]
            s = ((q1[0] - p1[0]) * ey - (q1[1] - p1[1]) * ex) / (dx * ey - dy * ex)
            return _kernels.PROPER, (p1[0] + s * dx, p1[1] + s * dy)
        return _kernels.NO_HIT, None
    if (o1 > 0 and o2 > 0) or (o1 < 0 and o2 < 0):
        return _kernels.NO_HIT, None
    if (o3 > 0 and o4 > 0) or (o3 < 0 and o4 < 0):
        return _kernels.NO_HIT, None
    if o1 == o2 == o3 == o4 == 0.0:
        # collinear (or point-like) segments: witness is the overlap midpoint
        pts = [p1, p2, q1, q2]
        d = (p2[0] - p1[0], p2[1] - p1[1])
        e = (q2[0] - q1[0], q2[1] - q1[1])
        if abs(e[0]) + abs(e[1]) > abs(d[0]) + abs(d[1]):
            d = e
        key = [pt[0] * d[0] + pt[1] * d[1] for pt in pts]
        p_lo, p_hi = sorted(key[:2])
        q_lo, q_hi = sorted(key[2:])
        if max(p_lo, q_lo) > min(p_hi, q_hi) or not (
            _within_box(p1, p2, q1)
            or _within_box(p1, p2, q2)
            or _within_box(q1, q2, p1)
            or _within_box(q1, q2, p2)
        ):
            return _kernels.NO_HIT, None
        mid = sorted(range(4), key=lambda k: key[k])[1:3]
        a, b = pts[mid[0]], pts[mid[1]]
        return _kernels.DEGENERATE, ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    for o, seg_a, seg_b, pt in (
        (o1, p1, p2, q1),
        (o2, p1, p2, q2),
        (o3, q1, q2, p1),
        (o4, q1, q2, p2),
    ):
        if o == 0.0 and _within_box(seg_a, seg_b, pt):
            return _kernels.DEGENERATE, (float(pt[0]), float(pt[1]))
    return _kernels.NO_HIT, None


def segment_intersection_2d(p1, p2, q1, q2) -> np.ndarray | None:
    """A point common to the closed segments ``[p1, p2]`` and ``[q1, q2]``.

    Transversal crossings return their unique intersection point; touching
    endpoints return the touching point and collinear overlaps the midpoint
    of the overlap. Returns ``None`` when the segments are disjoint.
    """
    args = [tuple(float(c) for c in p) for p in (p1, p2, q1, q2)]
    _, witness = _classify(*args)
    return None if witness is None else np.array(witness)


# ---------------------------------------------------------------------------
# counting


def _proper_witness(uv, edges, a, b) -> np.ndarray:
    p1 = uv[edges[a, 0]]
    p2 = uv[edges[a, 1]]
    q1 = uv[edges[b, 0]]
    q2 = uv[edges[b, 1]]
    d = p2 - p1
    e = q2 - q1
    w = q1 - p1
    s = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / (d[:, 0] * e[:, 1] - d[:, 1] * e[:, 0])
    return p1 + s[:, None] * d


def _assemble(plane, uv, edges, a, b, status, region) -> CrossingSet:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    status = np.asarray(status)
    loc = np.empty((len(a), 2))
    proper = status == _kernels.PROPER
    loc[proper] = _proper_witness(uv, edges, a[proper], b[proper])
    degenerate = np.nonzero(~proper)[0]
    for k in degenerate:
        ea, eb = edges[a[k]], edges[b[k]]
        st, w = _classify(*(tuple(uv[v]) for v in (ea[0], ea[1], eb[0], eb[1])))
        if st == _kernels.NO_HIT:  # pragma: no cover - predicates agree by construction
            raise AssertionError("kernel and scalar predicate disagree")
        loc[k] = w
    if region is not None:
        keep = region.contains(loc)
        a, b, loc, proper = a[keep], b[keep], loc[keep], proper[keep]
    order = np.lexsort((b, a))
    return CrossingSet(
        plane, a[order], b[order], loc[order], degenerate_hits=int(np.sum(~proper))
    )


def count_crossings_bruteforce(
    graph: GeometricGraph, plane: ProjectionPlane, region: Region2 | None = None
) -> CrossingSet:
    """Check every unordered pair of vertex-disjoint edges."""
    uv = plane.project(graph.points) if graph.n_vertices else np.empty((0, 2))
    edges = graph.edges
    m = len(edges)
    found_a, found_b, found_s = [], [], []
    for start in range(0, max(m - 1, 0), 256):
        ia, ib = np.nonzero(
            np.arange(start, min(start + 256, m))[:, None] < np.arange(m)[None, :]
        )
        ia = ia + start
        ea, eb = edges[ia], edges[ib]
        disjoint = (
            (ea[:, 0] != eb[:, 0])
            & (ea[:, 0] != eb[:, 1])
            & (ea[:, 1] != eb[:, 0])
            & (ea[:, 1] != eb[:, 1])
        )
        ia, ib, ea, eb = ia[disjoint], ib[disjoint], ea[disjoint], eb[disjoint]
        p1, p2, q1, q2 = uv[ea[:, 0]], uv[ea[:, 1]], uv[eb[:, 0]], uv[eb[:, 1]]

        def orient(a, b, c):
            return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
                c[:, 0] - a[:, 0]
            )

        o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
        o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
        proper = (o1 * o2 < 0) & (o3 * o4 < 0)
        maybe = ~proper & (o1 * o2 <= 0) & (o3 * o4 <= 0)
        found_a.append(ia[proper])
        found_b.append(ib[proper])
        found_s.append(np.full(int(proper.sum()), _kernels.PROPER, dtype=np.int8))
        for k in np.nonzero(maybe)[0]:
            st, _ = _classify(tuple(p1[k]), tuple(p2[k]), tuple(q1[k]), tuple(q2[k]))
            if st != _kernels.NO_HIT:
                found_a.append(ia[k : k + 1])
                found_b.append(ib[k : k + 1])
                found_s.append(np.array([st], dtype=np.int8))
    if found_a:
        a, b, s = np.concatenate(found_a), np.concatenate(found_b), np.concatenate(found_s)
    else:
        a = b = np.empty(0, dtype=np.int64)
        s = np.empty(0, dtype=np.int8)
    return _assemble(plane, uv, edges, a, b, s, region)


def _bucket_side(graph: GeometricGraph, pts: np.ndarray) -> float:
    # twice the longest segment; projection never lengthens a segment
    e = graph.edges
    seg = pts[e[:, 0]] - pts[e[:, 1]]
    longest = float(np.sqrt(np.max(np.sum(seg * seg, axis=1))))
    return max(2.0 * max(graph.radius, longest), np.finfo(float).tiny)


def count_crossings_grid(
    graph: GeometricGraph, plane: ProjectionPlane, region: Region2 | None = None
) -> CrossingSet:
    """Same result as :func:`count_crossings_bruteforce`, via 2-D bucketing.

    Crossing segments of projected length at most ``r`` have first endpoints
    within ``2r`` of each other, so only the 3x3 cell neighbourhood of side
    ``2r`` is scanned.
    """
    if graph.n_edges < 2:
        return CrossingSet(plane, np.empty(0, np.int64), np.empty(0, np.int64), np.empty((0, 2)))
    uv = np.ascontiguousarray(plane.project(graph.points))
    a, b, s = _kernels.grid_crossings(uv, graph.edges, _bucket_side(graph, uv))
    return _assemble(plane, uv, graph.edges, a, b, s, region)


count_crossings = count_crossings_grid


def plane_frames(normals) -> np.ndarray:
    """(G, 2, 3) in-plane bases for an array of unit normals."""
    return np.stack([plane_from_sphere_point(n).basis for n in np.atleast_2d(normals)])


def crossing_counts_on_planes(
    graph: GeometricGraph, planes: Sequence[ProjectionPlane] | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Crossing counts of one graph on many planes (no region filter).

    ``planes`` is a sequence of :class:`ProjectionPlane` or an (G, 2, 3)
    array of in-plane bases. Returns ``(counts, degenerate_hits)``.
    """
    if isinstance(planes, np.ndarray):
        frames = np.ascontiguousarray(planes, dtype=float)
    else:
        frames = np.stack([p.basis for p in planes]) if len(planes) else np.empty((0, 2, 3))
    if graph.n_edges < 2:
        zeros = np.zeros(len(frames), dtype=np.int64)
        return zeros, zeros.copy()
    # only vertices that carry an edge matter
    used, local = np.unique(graph.edges, return_inverse=True)
    pts = np.ascontiguousarray(graph.points[used], dtype=float)
    edges = np.ascontiguousarray(local.reshape(-1, 2), dtype=np.int64)
    side = _bucket_side(graph, graph.points)
    return _kernels.count_crossings_many_planes(pts, edges, frames, side)


def write_crossings_csv(crossings: CrossingSet, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["edge_a", "edge_b", "u", "v"])
        for a, b, (u, v) in zip(crossings.edge_a, crossings.edge_b, crossings.locations):
            w.writerow([int(a), int(b), repr(float(u)), repr(float(v))])
