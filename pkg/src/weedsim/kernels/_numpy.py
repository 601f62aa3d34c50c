"""Pure-numpy implementations of the hot inner loops.

This is the fallback backend; the numba backend in ``_numba.py`` mirrors the
exact same semantics (scan orders, tie breaking, tolerances) so that both
produce identical discrete results.
"""

import numpy as np

# perpendicular distance below which a point counts as lying on a polygon edge
BOUNDARY_EPS = 1e-9

# a 2-opt move must shorten the tour by more than this to be applied
TWO_OPT_EPS = 1e-9


def point_in_polygon(poly, pts):
    """Even-odd containment test; points on the boundary count as inside.

    poly: (k, 2) polygon vertices, pts: (m, 2). Returns bool (m,).
    """
    px = np.ascontiguousarray(pts[:, 0], dtype=np.float64)
    py = np.ascontiguousarray(pts[:, 1], dtype=np.float64)
    inside = np.zeros(px.shape[0], dtype=bool)
    on_edge = np.zeros(px.shape[0], dtype=bool)
    k = poly.shape[0]
    for i in range(k):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % k]
        dx = x2 - x1
        dy = y2 - y1
        seg_len = np.hypot(dx, dy)
        cross = (px - x1) * dy - (py - y1) * dx
        in_box = (
            (px >= min(x1, x2) - BOUNDARY_EPS)
            & (px <= max(x1, x2) + BOUNDARY_EPS)
            & (py >= min(y1, y2) - BOUNDARY_EPS)
            & (py <= max(y1, y2) + BOUNDARY_EPS)
        )
        on_edge |= (np.abs(cross) <= BOUNDARY_EPS * max(seg_len, 1.0)) & in_box
        crosses = (y1 > py) != (y2 > py)
        denom = dy if dy != 0.0 else 1.0
        xint = x1 + (py - y1) * dx / denom
        inside ^= crosses & (px < xint)
    return inside | on_edge


def polygon_mask(poly, origin, step, nx, ny):
    """Boolean (ny, nx) mask of grid cells whose center lies in the polygon."""
    xs = origin[0] + (np.arange(nx) + 0.5) * step
    ys = origin[1] + (np.arange(ny) + 0.5) * step
    mask = np.empty((ny, nx), dtype=bool)
    pts = np.empty((nx, 2))
    pts[:, 0] = xs
    for j in range(ny):
        pts[:, 1] = ys[j]
        mask[j] = point_in_polygon(poly, pts)
    return mask


def _window(c, r, o, step, n):
    lo = int(np.floor((c - r - o) / step - 0.5))
    hi = int(np.ceil((c + r - o) / step - 0.5))
    return max(lo, 0), min(hi + 1, n)


def disks_mask(centers, radius, origin, step, nx, ny):
    """Cells whose center lies within ``radius`` of any of ``centers``."""
    mask = np.zeros((ny, nx), dtype=bool)
    r2 = radius * radius
    for cx, cy in centers:
        i0, i1 = _window(cx, radius, origin[0], step, nx)
        j0, j1 = _window(cy, radius, origin[1], step, ny)
        if i0 >= i1 or j0 >= j1:
            continue
        dx = origin[0] + (np.arange(i0, i1) + 0.5) * step - cx
        dy = origin[1] + (np.arange(j0, j1) + 0.5) * step - cy
        mask[j0:j1, i0:i1] |= dy[:, None] ** 2 + dx[None, :] ** 2 <= r2
    return mask


def disk_counts(points, radius, origin, step, nx, ny):
    """Per grid cell, count of ``points`` within ``radius`` of the cell center."""
    counts = np.zeros((ny, nx), dtype=np.int32)
    r2 = radius * radius
    for cx, cy in points:
        i0, i1 = _window(cx, radius, origin[0], step, nx)
        j0, j1 = _window(cy, radius, origin[1], step, ny)
        if i0 >= i1 or j0 >= j1:
            continue
        dx = origin[0] + (np.arange(i0, i1) + 0.5) * step - cx
        dy = origin[1] + (np.arange(j0, j1) + 0.5) * step - cy
        counts[j0:j1, i0:i1] += (dy[:, None] ** 2 + dx[None, :] ** 2 <= r2).astype(
            np.int32
        )
    return counts


def rects_mask(rects, origin, step, nx, ny):
    """Union mask of oriented rectangles.

    rects: (k, 6) rows (cx, cy, ux, uy, half_u, half_v) with (ux, uy) a unit
    vector; half_u is the half side along it, half_v across.
    """
    mask = np.zeros((ny, nx), dtype=bool)
    for cx, cy, ux, uy, hu, hv in rects:
        reach = np.hypot(abs(ux) * hu + abs(uy) * hv, abs(uy) * hu + abs(ux) * hv)
        i0, i1 = _window(cx, reach, origin[0], step, nx)
        j0, j1 = _window(cy, reach, origin[1], step, ny)
        if i0 >= i1 or j0 >= j1:
            continue
        dx = origin[0] + (np.arange(i0, i1) + 0.5) * step - cx
        dy = origin[1] + (np.arange(j0, j1) + 0.5) * step - cy
        du = dx[None, :] * ux + dy[:, None] * uy
        dv = -dx[None, :] * uy + dy[:, None] * ux
        mask[j0:j1, i0:i1] |= (np.abs(du) <= hu) & (np.abs(dv) <= hv)
    return mask


# chunk size for gaussian_kernel_sum; both backends chunk the query points
# identically so np.exp always sees the exact same argument arrays
GAUSS_CHUNK = 65536


def _gauss_pairs_full(pts, anchors, inv):
    """Exponent arguments for every (point, anchor) pair, point-major."""
    dx = pts[:, 0][:, None] - anchors[:, 0][None, :]
    dy = pts[:, 1][:, None] - anchors[:, 1][None, :]
    d2 = dx * dx + dy * dy
    counts = np.full(pts.shape[0], anchors.shape[0], dtype=np.int64)
    return counts, (-d2 * inv).ravel()


def _gauss_pairs_binned(pts, anchors, inv, cutoff):
    """Exponent arguments for pairs within ``cutoff``, in canonical order.

    Anchors are bucketed on a grid of pitch ``cutoff`` and stably sorted by
    bucket id. The canonical pair order is: points by index, and for each
    point its in-range anchors by sorted bucket position. The numba backend
    emits the identical sequence.
    """
    n = anchors.shape[0]
    ax0 = anchors[:, 0].min()
    ay0 = anchors[:, 1].min()
    nbx = int(np.floor((anchors[:, 0].max() - ax0) / cutoff)) + 1
    nby = int(np.floor((anchors[:, 1].max() - ay0) / cutoff)) + 1
    abin = (
        np.floor((anchors[:, 1] - ay0) / cutoff).astype(np.int64) * nbx
        + np.floor((anchors[:, 0] - ax0) / cutoff).astype(np.int64)
    )
    order = np.argsort(abin, kind="stable")
    sax = anchors[order, 0]
    say = anchors[order, 1]
    starts = np.searchsorted(abin[order], np.arange(nbx * nby + 1))
    c2 = cutoff * cutoff
    m = pts.shape[0]
    pbi = np.floor((pts[:, 0] - ax0) / cutoff).astype(np.int64)
    pbj = np.floor((pts[:, 1] - ay0) / cutoff).astype(np.int64)
    pkey = (pbj << np.int64(32)) + pbi
    porder = np.argsort(pkey, kind="stable")
    skey = pkey[porder]
    counts = np.zeros(m, dtype=np.int64)
    ids = []
    args = []
    pos = 0
    # points sharing a bucket see the same 3x3 ring of anchor buckets, whose
    # sorted positions form up to three contiguous, ascending runs
    while pos < m:
        end = pos + int(np.searchsorted(skey[pos:], skey[pos], side="right"))
        gpts = porder[pos:end]
        pos = end
        gi = int(pbi[gpts[0]])
        gj = int(pbj[gpts[0]])
        ilo = max(gi - 1, 0)
        ihi = min(gi + 1, nbx - 1)
        if ilo > ihi:
            continue
        runs = [
            np.arange(starts[j * nbx + ilo], starts[j * nbx + ihi + 1])
            for j in (gj - 1, gj, gj + 1)
            if 0 <= j < nby
        ]
        if not runs:
            continue
        ring = np.concatenate(runs)
        if ring.size == 0:
            continue
        dx = pts[gpts, 0][:, None] - sax[ring][None, :]
        dy = pts[gpts, 1][:, None] - say[ring][None, :]
        d2 = dx * dx + dy * dy
        within = d2 <= c2
        counts[gpts] = within.sum(axis=1)
        ids.append(np.repeat(gpts, counts[gpts]))
        args.append((-d2 * inv)[within])
    if not ids:
        return counts, np.empty(0)
    flat_ids = np.concatenate(ids)
    flat_args = np.concatenate(args)
    return counts, flat_args[np.argsort(flat_ids, kind="stable")]


def gaussian_kernel_sum(pts, anchors, h, cutoff):
    """sum_i exp(-|p - a_i|^2 / (2 h^2)) per point, truncated at ``cutoff``."""
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
        vals = np.exp(args)
        seg = np.zeros(chunk.shape[0])
        # np.add.at applies additions in operand order, so each point sums its
        # contributions left to right exactly like the numba accumulator
        np.add.at(seg, np.repeat(np.arange(chunk.shape[0]), counts), vals)
        out[lo : lo + GAUSS_CHUNK] = seg
    return out


def nn_tour(xy):
    """Nearest-neighbor tour over ``xy`` starting at index 0; ties by lower index."""
    n = xy.shape[0]
    tour = np.zeros(n, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    cur = 0
    for k in range(1, n):
        d2 = ((xy - xy[cur]) ** 2).sum(axis=1)
        d2[visited] = np.inf
        cur = int(np.argmin(d2))
        tour[k] = cur
        visited[cur] = True
    return tour


def two_opt(xy, tour):
    """First-improvement 2-opt on the closed tour; repeats until locally optimal.

    Scan order: for each position i (ascending), the first reversal (i, j) with
    j > i that shortens the tour by more than TWO_OPT_EPS is applied, then the
    scan moves on to position i + 1. Passes repeat until one full pass makes no
    improvement. Both backends implement this order exactly.
    """
    tour = tour.copy()
    n = tour.shape[0]
    if n < 4:
        return tour
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            a = xy[tour[i - 1]]
            b = xy[tour[i]]
            js = np.arange(i + 1, n)
            c = xy[tour[js]]
            d = xy[tour[(js + 1) % n]]
            # np.sqrt of the two-term squared sum matches the numba backend
            # bit for bit (np.hypot would not)
            d_ac = np.sqrt((c[:, 0] - a[0]) ** 2 + (c[:, 1] - a[1]) ** 2)
            d_bd = np.sqrt((d[:, 0] - b[0]) ** 2 + (d[:, 1] - b[1]) ** 2)
            d_ab = np.sqrt((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2)
            d_cd = np.sqrt((d[:, 0] - c[:, 0]) ** 2 + (d[:, 1] - c[:, 1]) ** 2)
            delta = d_ac + d_bd - d_ab - d_cd
            hit = np.nonzero(delta < -TWO_OPT_EPS)[0]
            if hit.size:
                j = int(js[hit[0]])
                tour[i : j + 1] = tour[i : j + 1][::-1]
                improved = True
    return tour


def or_opt(xy, tour):
    """First-improvement segment relocation (Or-opt) over the closed tour.

    Segments of length 1, 2, and 3 starting at position i >= 1 are tried in
    ascending order; the first reinsertion point that shortens the tour by
    more than TWO_OPT_EPS is applied and position i is re-examined. One call
    makes a single full sweep; callers alternate with two_opt to a fixpoint.
    """
    tour = tour.copy()
    n = tour.shape[0]
    if n < 4:
        return tour
    for seg_len in (1, 2, 3):
        if seg_len >= n - 1:
            break
        i = 1
        while i + seg_len - 1 <= n - 1:
            a = xy[tour[i - 1]]
            s0 = xy[tour[i]]
            s1 = xy[tour[i + seg_len - 1]]
            nxt = xy[tour[(i + seg_len) % n]]
            d_as0 = np.sqrt((s0[0] - a[0]) ** 2 + (s0[1] - a[1]) ** 2)
            d_s1n = np.sqrt((nxt[0] - s1[0]) ** 2 + (nxt[1] - s1[1]) ** 2)
            d_an = np.sqrt((nxt[0] - a[0]) ** 2 + (nxt[1] - a[1]) ** 2)
            base = d_as0 + d_s1n - d_an
            js = np.arange(n)
            c = xy[tour[js]]
            e = xy[tour[(js + 1) % n]]
            d_cs0 = np.sqrt((s0[0] - c[:, 0]) ** 2 + (s0[1] - c[:, 1]) ** 2)
            d_s1e = np.sqrt((e[:, 0] - s1[0]) ** 2 + (e[:, 1] - s1[1]) ** 2)
            d_ce = np.sqrt((e[:, 0] - c[:, 0]) ** 2 + (e[:, 1] - c[:, 1]) ** 2)
            delta = d_cs0 + d_s1e - d_ce - base
            ok = (js < i - 1) | (js > i + seg_len - 1)
            hit = np.nonzero(ok & (delta < -TWO_OPT_EPS))[0]
            if hit.size:
                j = int(hit[0])
                kc = j if j < i else j - seg_len
                seg = tour[i : i + seg_len].copy()
                rest = np.concatenate([tour[:i], tour[i + seg_len :]])
                tour = np.concatenate([rest[: kc + 1], seg, rest[kc + 1 :]])
            else:
                i += 1
    return tour
