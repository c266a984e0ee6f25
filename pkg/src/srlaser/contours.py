"""Iso-line extraction from 2D scan grids by marching squares.

Cells are classified by which corners sit above the level; crossing points
are placed by linear interpolation along the cell edges, and the resulting
segments are chained into polylines.  Saddle cells (both diagonals above)
are disambiguated with the cell-center average.
"""

from __future__ import annotations

import numpy as np

# edge ids: 0 bottom (j,i)-(j,i+1), 1 right, 2 top, 3 left, in index space
_EDGE_CORNERS = {0: ((0, 0), (0, 1)), 1: ((0, 1), (1, 1)),
                 2: ((1, 1), (1, 0)), 3: ((1, 0), (0, 0))}
# case -> list of (edge_in, edge_out) segments, corners numbered
# 1=bottom-left, 2=bottom-right, 4=top-right, 8=top-left
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 2: [(0, 1)], 4: [(1, 2)], 8: [(2, 3)],
    3: [(3, 1)], 6: [(0, 2)], 12: [(1, 3)], 9: [(2, 0)],
    7: [(3, 2)], 14: [(0, 3)], 13: [(1, 0)], 11: [(2, 1)],
    5: None, 10: None,          # saddles, resolved per cell
}


def _interp(p1, p2, v1, v2, level):
    # canonical order so the shared edge of two cells yields the identical point
    if p2 < p1:
        p1, p2, v1, v2 = p2, p1, v2, v1
    t = 0.5 if v2 == v1 else (level - v1) / (v2 - v1)
    return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))


def _cell_segments(x, y, z, j, i, level):
    corners = {
        1: ((x[i], y[j]), z[j, i]),
        2: ((x[i + 1], y[j]), z[j, i + 1]),
        4: ((x[i + 1], y[j + 1]), z[j + 1, i + 1]),
        8: ((x[i], y[j + 1]), z[j + 1, i]),
    }
    if any(np.isnan(v) for _, v in corners.values()):
        return []
    case = sum(bit for bit, (_, v) in corners.items() if v >= level)
    segs = _CASES[case]
    if segs is None:
        center_above = np.mean([v for _, v in corners.values()]) >= level
        if case == 5:
            segs = [(3, 2), (1, 0)] if center_above else [(3, 0), (1, 2)]
        else:
            segs = [(0, 3), (2, 1)] if center_above else [(0, 1), (2, 3)]
    edge_bits = {0: (1, 2), 1: (2, 4), 2: (4, 8), 3: (8, 1)}
    out = []
    for e_in, e_out in segs:
        pts = []
        for e in (e_in, e_out):
            b1, b2 = edge_bits[e]
            (p1, v1), (p2, v2) = corners[b1], corners[b2]
            pts.append(_interp(p1, p2, v1, v2, level))
        out.append(tuple(pts))
    return out


def _chain(segments, tol):
    """Join segments sharing endpoints into polylines."""
    def key(p):
        return (round(p[0] / tol), round(p[1] / tol))

    remaining = list(segments)
    by_end = {}
    for k, (a, b) in enumerate(remaining):
        by_end.setdefault(key(a), []).append(k)
        by_end.setdefault(key(b), []).append(k)
    used = [False] * len(remaining)
    lines = []
    for start in range(len(remaining)):
        if used[start]:
            continue
        used[start] = True
        a, b = remaining[start]
        line = [a, b]
        for grow_tail in (True, False):
            while True:
                end = line[-1] if grow_tail else line[0]
                candidates = [k for k in by_end.get(key(end), []) if not used[k]]
                if not candidates:
                    break
                k = candidates[0]
                used[k] = True
                p, q = remaining[k]
                nxt = q if key(p) == key(end) else p
                if grow_tail:
                    line.append(nxt)
                else:
                    line.insert(0, nxt)
        lines.append(np.array(line))
    return lines


def contour_level(result, fieldname: str, level: float) -> list:
    """Iso-lines of a scanned field at ``level``, as a list of (n, 2) arrays.

    Polyline coordinates are (axis0 value, axis1 value) in the scan's units.
    Requires a 2D scan; an unknown field raises KeyError.  Grid cells touching
    failed points are skipped.
    """
    if len(result.shape) != 2:
        raise ValueError("contours need a 2D scan result")
    if fieldname not in result.values:
        raise KeyError(f"field {fieldname!r} not in scan output")
    z = np.asarray(result.values[fieldname], dtype=float)
    x0, x1 = result.coordinates
    # marching squares operates on (row=y, col=x); rows scan axis 0
    segments = []
    for j in range(len(x0) - 1):
        for i in range(len(x1) - 1):
            segments.extend(_cell_segments(x1, x0, z, j, i, level))
    if not segments:
        return []
    tol = 1e-9 * max(
        abs(x0[-1] - x0[0]) or 1.0,
        abs(x1[-1] - x1[0]) or 1.0,
    )
    # drop degenerate segments from corners sitting exactly on the level
    segments = [(a, b) for a, b in segments
                if abs(a[0] - b[0]) > tol or abs(a[1] - b[1]) > tol]
    if not segments:
        return []
    lines = _chain(segments, tol)
    # report as (axis0, axis1) pairs
    return [np.column_stack([ln[:, 1], ln[:, 0]]) for ln in lines]
