"""Numba-jitted implementations of the hot inner loops.

Mirrors ``_numpy.py`` exactly: same scan orders, tie breaking, and tolerances,
so both backends return identical discrete results.
"""

import math

import numpy as np
from numba import njit

from ._numpy import BOUNDARY_EPS, GAUSS_CHUNK, TWO_OPT_EPS


@njit(cache=True)
def _pip_single(poly, px, py):
    inside = False
    k = poly.shape[0]
    for i in range(k):
        x1 = poly[i, 0]
        y1 = poly[i, 1]
        x2 = poly[(i + 1) % k, 0]
        y2 = poly[(i + 1) % k, 1]
        dx = x2 - x1
        dy = y2 - y1
        seg_len = math.hypot(dx, dy)
        if seg_len < 1.0:
            seg_len = 1.0
        cross = (px - x1) * dy - (py - y1) * dx
        if abs(cross) <= BOUNDARY_EPS * seg_len:
            if (
                px >= min(x1, x2) - BOUNDARY_EPS
                and px <= max(x1, x2) + BOUNDARY_EPS
                and py >= min(y1, y2) - BOUNDARY_EPS
                and py <= max(y1, y2) + BOUNDARY_EPS
            ):
                return True
        if (y1 > py) != (y2 > py):
            denom = dy if dy != 0.0 else 1.0
            xint = x1 + (py - y1) * dx / denom
            if px < xint:
                inside = not inside
    return inside


@njit(cache=True)
def _point_in_polygon(poly, pts):
    out = np.empty(pts.shape[0], dtype=np.bool_)
    for i in range(pts.shape[0]):
        out[i] = _pip_single(poly, pts[i, 0], pts[i, 1])
    return out


def point_in_polygon(poly, pts):
    return _point_in_polygon(
        np.ascontiguousarray(poly, dtype=np.float64),
        np.ascontiguousarray(pts, dtype=np.float64),
    )


@njit(cache=True)
def _polygon_mask(poly, ox, oy, step, nx, ny):
    mask = np.empty((ny, nx), dtype=np.bool_)
    for j in range(ny):
        cy = oy + (j + 0.5) * step
        for i in range(nx):
            cx = ox + (i + 0.5) * step
            mask[j, i] = _pip_single(poly, cx, cy)
    return mask


def polygon_mask(poly, origin, step, nx, ny):
    return _polygon_mask(
        np.ascontiguousarray(poly, dtype=np.float64),
        origin[0], origin[1], step, nx, ny,
    )


@njit(cache=True)
def _disks_mask(centers, radius, ox, oy, step, nx, ny):
    mask = np.zeros((ny, nx), dtype=np.bool_)
    r2 = radius * radius
    for c in range(centers.shape[0]):
        cx = centers[c, 0]
        cy = centers[c, 1]
        i0 = max(int(math.floor((cx - radius - ox) / step - 0.5)), 0)
        i1 = min(int(math.ceil((cx + radius - ox) / step - 0.5)) + 1, nx)
        j0 = max(int(math.floor((cy - radius - oy) / step - 0.5)), 0)
        j1 = min(int(math.ceil((cy + radius - oy) / step - 0.5)) + 1, ny)
        for j in range(j0, j1):
            dy = oy + (j + 0.5) * step - cy
            for i in range(i0, i1):
                dx = ox + (i + 0.5) * step - cx
                if dy * dy + dx * dx <= r2:
                    mask[j, i] = True
    return mask


def disks_mask(centers, radius, origin, step, nx, ny):
    return _disks_mask(
        np.ascontiguousarray(centers, dtype=np.float64),
        radius, origin[0], origin[1], step, nx, ny,
    )


@njit(cache=True)
def _disk_counts(points, radius, ox, oy, step, nx, ny):
    counts = np.zeros((ny, nx), dtype=np.int32)
    r2 = radius * radius
    for c in range(points.shape[0]):
        cx = points[c, 0]
        cy = points[c, 1]
        i0 = max(int(math.floor((cx - radius - ox) / step - 0.5)), 0)
        i1 = min(int(math.ceil((cx + radius - ox) / step - 0.5)) + 1, nx)
        j0 = max(int(math.floor((cy - radius - oy) / step - 0.5)), 0)
        j1 = min(int(math.ceil((cy + radius - oy) / step - 0.5)) + 1, ny)
        for j in range(j0, j1):
            dy = oy + (j + 0.5) * step - cy
            for i in range(i0, i1):
                dx = ox + (i + 0.5) * step - cx
                if dy * dy + dx * dx <= r2:
                    counts[j, i] += 1
    return counts


def disk_counts(points, radius, origin, step, nx, ny):
    return _disk_counts(
        np.ascontiguousarray(points, dtype=np.float64),
        radius, origin[0], origin[1], step, nx, ny,
    )


@njit(cache=True)
def _rects_mask(rects, ox, oy, step, nx, ny):
    mask = np.zeros((ny, nx), dtype=np.bool_)
    for r in range(rects.shape[0]):
        cx = rects[r, 0]
        cy = rects[r, 1]
        ux = rects[r, 2]
        uy = rects[r, 3]
        hu = rects[r, 4]
        hv = rects[r, 5]
        bw = abs(ux) * hu + abs(uy) * hv
        bh = abs(uy) * hu + abs(ux) * hv
        reach = math.hypot(bw, bh)
        i0 = max(int(math.floor((cx - reach - ox) / step - 0.5)), 0)
        i1 = min(int(math.ceil((cx + reach - ox) / step - 0.5)) + 1, nx)
        j0 = max(int(math.floor((cy - reach - oy) / step - 0.5)), 0)
        j1 = min(int(math.ceil((cy + reach - oy) / step - 0.5)) + 1, ny)
        for j in range(j0, j1):
            dy = oy + (j + 0.5) * step - cy
            for i in range(i0, i1):
                dx = ox + (i + 0.5) * step - cx
                du = dx * ux + dy * uy
                dv = -dx * uy + dy * ux
                if abs(du) <= hu and abs(dv) <= hv:
                    mask[j, i] = True
    return mask


def rects_mask(rects, origin, step, nx, ny):
    return _rects_mask(
        np.ascontiguousarray(rects, dtype=np.float64),
        origin[0], origin[1], step, nx, ny,
    )


@njit(cache=True)
def _gauss_pairs_full(pts, anchors, inv):
    m = pts.shape[0]
    n = anchors.shape[0]
    counts = np.full(m, n, dtype=np.int64)
    args = np.empty(m * n)
    idx = 0
    for p in range(m):
        px = pts[p, 0]
        py = pts[p, 1]
        for a in range(n):
            dx = px - anchors[a, 0]
            dy = py - anchors[a, 1]
            d2 = dx * dx + dy * dy
            args[idx] = -d2 * inv
            idx += 1
    return counts, args


@njit(cache=True)
def _gauss_pairs_binned(pts, anchors, inv, cutoff):
    n = anchors.shape[0]
    ax0 = anchors[:, 0].min()
    ay0 = anchors[:, 1].min()
    nbx = int(math.floor((anchors[:, 0].max() - ax0) / cutoff)) + 1
    nby = int(math.floor((anchors[:, 1].max() - ay0) / cutoff)) + 1
    bin_of = np.empty(n, dtype=np.int64)
    bcounts = np.zeros(nbx * nby + 1, dtype=np.int64)
    for a in range(n):
        bi = int(math.floor((anchors[a, 0] - ax0) / cutoff))
        bj = int(math.floor((anchors[a, 1] - ay0) / cutoff))
        b = bj * nbx + bi
        bin_of[a] = b
        bcounts[b + 1] += 1
    starts = np.cumsum(bcounts)
    fill = starts[:-1].copy()
    order = np.empty(n, dtype=np.int64)
    for a in range(n):
        b = bin_of[a]
        order[fill[b]] = a
        fill[b] += 1
    c2 = cutoff * cutoff
    m = pts.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    for p in range(m):
        px = pts[p, 0]
        py = pts[p, 1]
        bi = int(math.floor((px - ax0) / cutoff))
        bj = int(math.floor((py - ay0) / cutoff))
        c = 0
        for dj in range(-1, 2):
            j = bj + dj
            if j < 0 or j >= nby:
                continue
            for di in range(-1, 2):
                i = bi + di
                if i < 0 or i >= nbx:
                    continue
                b = j * nbx + i
                for k in range(starts[b], starts[b + 1]):
                    a = order[k]
                    dx = px - anchors[a, 0]
                    dy = py - anchors[a, 1]
                    if dx * dx + dy * dy <= c2:
                        c += 1
        counts[p] = c
    args = np.empty(counts.sum())
    idx = 0
    for p in range(m):
        px = pts[p, 0]
        py = pts[p, 1]
        bi = int(math.floor((px - ax0) / cutoff))
        bj = int(math.floor((py - ay0) / cutoff))
        for dj in range(-1, 2):
            j = bj + dj
            if j < 0 or j >= nby:
                continue
            for di in range(-1, 2):
                i = bi + di
                if i < 0 or i >= nbx:
                    continue
                b = j * nbx + i
                for k in range(starts[b], starts[b + 1]):
                    a = order[k]
                    dx = px - anchors[a, 0]
                    dy = py - anchors[a, 1]
                    d2 = dx * dx + dy * dy
                    if d2 <= c2:
                        args[idx] = -d2 * inv
                        idx += 1
    return counts, args


@njit(cache=True)
def _gauss_accumulate(counts, vals):
    out = np.empty(counts.shape[0])
    idx = 0
    for p in range(counts.shape[0]):
        s = 0.0
        for _ in range(counts[p]):
            s += vals[idx]
            idx += 1
        out[p] = s
    return out


def gaussian_kernel_sum(pts, anchors, h, cutoff):
    # the exponentials go through one shared np.exp call on the same argument
    # sequence in both backends; np.exp and math.exp differ in the last ulp,
    # so jitting the exp itself would break bit-identity with the fallback
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    anchors = np.ascontiguousarray(anchors, dtype=np.float64)
    out = np.zeros(pts.shape[0])
    if anchors.shape[0] == 0:
        return out
    inv = 1.0 / (2.0 * h * h)
    for lo in range(0, pts.shape[0], GAUSS_CHUNK):
        chunk = pts[lo : lo + GAUSS_CHUNK]
        if np.isfinite(cutoff):
            counts, args = _gauss_pairs_binned(chunk, anchors, inv, float(cutoff))
        else:
            counts, args = _gauss_pairs_full(chunk, anchors, inv)
        out[lo : lo + GAUSS_CHUNK] = _gauss_accumulate(
            counts, np.exp(args)
        )
    return out


@njit(cache=True)
def _nn_tour(xy):
    n = xy.shape[0]
    tour = np.zeros(n, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)
    visited[0] = True
    cur = 0
    for k in range(1, n):
        best = -1
        best_d2 = np.inf
        for c in range(n):
            if visited[c]:
                continue
            dx = xy[c, 0] - xy[cur, 0]
            dy = xy[c, 1] - xy[cur, 1]
            d2 = dx * dx + dy * dy
            if d2 < best_d2:
                best_d2 = d2
                best = c
        tour[k] = best
        visited[best] = True
        cur = best
    return tour


def nn_tour(xy):
    return _nn_tour(np.ascontiguousarray(xy, dtype=np.float64))


@njit(cache=True)
def _dist(xy, a, b):
    dx = xy[b, 0] - xy[a, 0]
    dy = xy[b, 1] - xy[a, 1]
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def _two_opt(xy, tour):
    n = tour.shape[0]
    if n < 4:
        return tour
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            a = tour[i - 1]
            b = tour[i]
            d_ab = _dist(xy, a, b)
            for j in range(i + 1, n):
                c = tour[j]
                d = tour[(j + 1) % n]
                delta = (
                    _dist(xy, a, c) + _dist(xy, b, d) - d_ab - _dist(xy, c, d)
                )
                if delta < -TWO_OPT_EPS:
                    lo = i
                    hi = j
                    while lo < hi:
                        tour[lo], tour[hi] = tour[hi], tour[lo]
                        lo += 1
                        hi -= 1
                    improved = True
                    break
    return tour


def two_opt(xy, tour):
    return _two_opt(
        np.ascontiguousarray(xy, dtype=np.float64),
        tour.astype(np.int64).copy(),
    )


@njit(cache=True)
def _or_opt(xy, tour):
    n = tour.shape[0]
    if n < 4:
        return tour
    for seg_len in (1, 2, 3):
        if seg_len >= n - 1:
            break
        i = 1
        while i + seg_len - 1 <= n - 1:
            a = tour[i - 1]
            s0 = tour[i]
            s1 = tour[i + seg_len - 1]
            nxt = tour[(i + seg_len) % n]
            base = _dist(xy, a, s0) + _dist(xy, s1, nxt) - _dist(xy, a, nxt)
            applied = False
            for j in range(n):
                if i - 1 <= j <= i + seg_len - 1:
                    continue
                c = tour[j]
                e = tour[(j + 1) % n]
                delta = _dist(xy, c, s0) + _dist(xy, s1, e) - _dist(xy, c, e) - base
                if delta < -TWO_OPT_EPS:
                    kc = j if j < i else j - seg_len
                    new_tour = np.empty(n, dtype=np.int64)
                    pos = 0
                    for k in range(n):
                        if i <= k < i + seg_len:
                            continue
                        new_tour[pos] = tour[k]
                        pos += 1
                        if pos == kc + 1:
                            for m in range(seg_len):
                                new_tour[pos] = tour[i + m]
                                pos += 1
                    tour = new_tour
                    applied = True
                    break
            if not applied:
                i += 1
    return tour


def or_opt(xy, tour):
    return _or_opt(
        np.ascontiguousarray(xy, dtype=np.float64),
        tour.astype(np.int64).copy(),
    )
