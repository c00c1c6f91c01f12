"""Compiled inner loops for the cell-grid searches.

Everything here works on plain arrays; the public wrappers live in
``rgg`` and ``crossings``. Points are binned by a counting sort into a dense
table of cells. Cells are never smaller than requested, which is all the
neighbourhood scans need for exactness; they are coarsened when the
requested size would allocate more than ``CELLS_PER_POINT`` cells per point.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CELLS_PER_POINT = 8
MIN_CELLS = 64

NO_HIT = 0
PROPER = 1
DEGENERATE = 2


@njit(cache=True)
def _bin(points, side):
    """Counting-sort ``points`` (n, dim) into cells of edge >= ``side``.

    Returns ``coords`` (n, dim) integer cell coordinates, ``dims`` (dim,),
    ``start`` (ncells + 1,) and ``order`` (n,) with the points of cell ``c``
    at ``order[start[c]:start[c + 1]]``.
    """
    n, dim = points.shape
    lo = np.empty(dim)
    ext = np.empty(dim)
    vol = 1.0
    for k in range(dim):
        lo[k] = points[:, k].min()
        ext[k] = points[:, k].max() - lo[k]
        vol *= max(ext[k], side)
    budget = max(CELLS_PER_POINT * n, MIN_CELLS)
    side = max(side, (vol / budget) ** (1.0 / dim))
    dims = np.empty(dim, dtype=np.int64)
    for k in range(dim):
        dims[k] = np.int64(ext[k] / side) + 1
    coords = np.empty((n, dim), dtype=np.int64)
    cell = np.empty(n, dtype=np.int64)
    for i in range(n):
        c = 0
        for k in range(dim):
            ck = min(np.int64((points[i, k] - lo[k]) / side), dims[k] - 1)
            coords[i, k] = ck
            c = c * dims[k] + ck
        cell[i] = c
    ncells = 1
    for k in range(dim):
        ncells *= dims[k]
    start = np.zeros(ncells + 1, dtype=np.int64)
    for i in range(n):
        start[cell[i] + 1] += 1
    for c in range(ncells):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    order = np.empty(n, dtype=np.int64)
    for i in range(n):
        order[fill[cell[i]]] = i
        fill[cell[i]] += 1
    return coords, dims, start, order


@njit(cache=True)
def grid_pairs_within(points, r):
    """All index pairs ``i < j`` with ``|p_i - p_j| <= r`` (3-D, 27-cell scan)."""
    n = points.shape[0]
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    coords, dims, start, order = _bin(points, r)
    nx, ny, nz = dims[0], dims[1], dims[2]
    r2 = r * r
    cap = 2 * n + 16
    out = np.empty((cap, 2), dtype=np.int64)
    m = 0
    for i in range(n):
        cx, cy, cz = coords[i, 0], coords[i, 1], coords[i, 2]
        z0, z1 = max(cz - 1, 0), min(cz + 1, nz - 1)
        for x in range(max(cx - 1, 0), min(cx + 2, nx)):
            for y in range(max(cy - 1, 0), min(cy + 2, ny)):
                # the three z-neighbours are adjacent in the cell table
                col = (x * ny + y) * nz
                for k in range(start[col + z0], start[col + z1 + 1]):
                    j = order[k]
                    if j <= i:
                        continue
                    d0 = points[i, 0] - points[j, 0]
                    d1 = points[i, 1] - points[j, 1]
                    d2 = points[i, 2] - points[j, 2]
                    if d0 * d0 + d1 * d1 + d2 * d2 <= r2:
                        if m == cap:
                            grown = np.empty((2 * cap, 2), dtype=np.int64)
                            grown[:m] = out[:m]
                            out = grown
                            cap *= 2
                        out[m, 0] = i
                        out[m, 1] = j
                        m += 1
    return out[:m]


@njit(cache=True, inline="always")
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True, inline="always")
def _on_segment(ax, ay, bx, by, cx, cy):
    # c collinear with [a, b]: inside the bounding box
    return min(ax, bx) <= cx <= max(ax, bx) and min(ay, by) <= cy <= max(ay, by)


@njit(cache=True)
def classify_pair(p1x, p1y, p2x, p2y, q1x, q1y, q2x, q2y):
    """NO_HIT, PROPER (transversal interior crossing) or DEGENERATE (closed
    segments meet but some orientation is exactly zero)."""
    o1 = _orient(p1x, p1y, p2x, p2y, q1x, q1y)
    o2 = _orient(p1x, p1y, p2x, p2y, q2x, q2y)
    o3 = _orient(q1x, q1y, q2x, q2y, p1x, p1y)
    o4 = _orient(q1x, q1y, q2x, q2y, p2x, p2y)
    if o1 != 0.0 and o2 != 0.0 and o3 != 0.0 and o4 != 0.0:
        if (o1 > 0.0) != (o2 > 0.0) and (o3 > 0.0) != (o4 > 0.0):
            return PROPER
        return NO_HIT
    if (o1 > 0.0 and o2 > 0.0) or (o1 < 0.0 and o2 < 0.0):
        return NO_HIT
    if (o3 > 0.0 and o4 > 0.0) or (o3 < 0.0 and o4 < 0.0):
        return NO_HIT
    if o1 == 0.0 and _on_segment(p1x, p1y, p2x, p2y, q1x, q1y):
        return DEGENERATE
    if o2 == 0.0 and _on_segment(p1x, p1y, p2x, p2y, q2x, q2y):
        return DEGENERATE
    if o3 == 0.0 and _on_segment(q1x, q1y, q2x, q2y, p1x, p1y):
        return DEGENERATE
    if o4 == 0.0 and _on_segment(q1x, q1y, q2x, q2y, p2x, p2y):
        return DEGENERATE
    # a meeting point that is no segment's endpoint would be a transversal
    # crossing, which forces all four orientations nonzero
    return NO_HIT


@njit(cache=True)
def grid_crossings(uv, edges, side):
    """Crossing edge pairs of projected segments.

    ``uv`` are projected vertex coordinates, ``edges`` an (m, 2) vertex index
    array. Segments are bucketed by their first endpoint in square cells of
    edge ``side``, which must be at least twice the longest projected
    segment. Returns ``(a, b, status)`` arrays with ``a < b`` edge indices.
    """
    m = edges.shape[0]
    if m < 2:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0, dtype=np.int8)
    first = np.empty((m, 2))
    for a in range(m):
        first[a, 0] = uv[edges[a, 0], 0]
        first[a, 1] = uv[edges[a, 0], 1]
    coords, dims, start, order = _bin(first, side)
    nx, ny = dims[0], dims[1]

    cap = 64
    out_a = np.empty(cap, dtype=np.int64)
    out_b = np.empty(cap, dtype=np.int64)
    out_s = np.empty(cap, dtype=np.int8)
    k_out = 0
    for a in range(m):
        va, wa = edges[a, 0], edges[a, 1]
        p1x, p1y = uv[va, 0], uv[va, 1]
        p2x, p2y = uv[wa, 0], uv[wa, 1]
        cx, cy = coords[a, 0], coords[a, 1]
        y0, y1 = max(cy - 1, 0), min(cy + 1, ny - 1)
        for x in range(max(cx - 1, 0), min(cx + 2, nx)):
            for k in range(start[x * ny + y0], start[x * ny + y1 + 1]):
                b = order[k]
                if b <= a:
                    continue
                vb, wb = edges[b, 0], edges[b, 1]
                if vb == va or vb == wa or wb == va or wb == wa:
                    continue
                st = classify_pair(
                    p1x, p1y, p2x, p2y, uv[vb, 0], uv[vb, 1], uv[wb, 0], uv[wb, 1]
                )
                if st != NO_HIT:
                    if k_out == cap:
                        cap *= 2
                        na = np.empty(cap, dtype=np.int64)
                        nb = np.empty(cap, dtype=np.int64)
                        ns = np.empty(cap, dtype=np.int8)
                        na[:k_out] = out_a[:k_out]
                        nb[:k_out] = out_b[:k_out]
                        ns[:k_out] = out_s[:k_out]
                        out_a, out_b, out_s = na, nb, ns
                    out_a[k_out] = a
                    out_b[k_out] = b
                    out_s[k_out] = st
                    k_out += 1
    return out_a[:k_out], out_b[:k_out], out_s[:k_out]


@njit(cache=True)
def count_crossings_many_planes(points, edges, frames, side):
    """Crossing counts of one graph on many planes.

    ``frames`` is (G, 2, 3): the in-plane basis of each plane. Returns
    ``(counts, degenerate)`` int64 arrays of length G.
    """
    g = frames.shape[0]
    counts = np.zeros(g, dtype=np.int64)
    degenerate = np.zeros(g, dtype=np.int64)
    n = points.shape[0]
    if edges.shape[0] < 2:
        return counts, degenerate
    uv = np.empty((n, 2))
    for p in range(g):
        for i in range(n):
            for c in range(2):
                uv[i, c] = (
                    points[i, 0] * frames[p, c, 0]
                    + points[i, 1] * frames[p, c, 1]
                    + points[i, 2] * frames[p, c, 2]
                )
        _, _, st = grid_crossings(uv, edges, side)
        counts[p] = st.shape[0]
        for s in st:
            if s == DEGENERATE:
                degenerate[p] += 1
    return counts, degenerate
