"""Planar geometry primitives: field polygon, hulls, oriented boxes, rasters.

All areas are computed on a fixed raster whose cells belong to a region iff
their center does. The raster covers the axis-aligned bounding box of the
field polygon at the field's grid step (0.05 m by default).
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kernels
from .errors import DegenerateGeometry, EmptyPattern, GridMismatch

GEOM_EPS = 1e-9


def shoelace_area(vertices):
    """Signed polygon area; positive for counterclockwise orientation."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_intersect(p1, p2, p3, p4):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if v > GEOM_EPS:
            return 1
        if v < -GEOM_EPS:
            return -1
        return 0

    o1 = orient(p1, p2, p3)
    o2 = orient(p1, p2, p4)
    o3 = orient(p3, p4, p1)
    o4 = orient(p3, p4, p2)
    return o1 != o2 and o3 != o4


class Field:
    """Bounded polygonal sampling window with its evaluation grid.

    The boundary must be a simple counterclockwise polygon with at least
    three vertices; grid_step must be positive.
    """

    def __init__(self, boundary, grid_step=0.05):
        boundary = np.asarray(boundary, dtype=np.float64)
        if boundary.ndim != 2 or boundary.shape[1] != 2 or boundary.shape[0] < 3:
            raise ValueError("field boundary needs at least 3 (x, y) vertices")
        if grid_step <= 0:
            raise ValueError("grid_step must be positive")
        area = shoelace_area(boundary)
        if area <= 0:
            raise ValueError("field boundary must be counterclockwise with area > 0")
        k = boundary.shape[0]
        for i in range(k):
            for j in range(i + 1, k):
                if j == i + 1 or (i == 0 and j == k - 1):
                    continue
                if _segments_intersect(
                    boundary[i], boundary[(i + 1) % k], boundary[j], boundary[(j + 1) % k]
                ):
                    raise ValueError("field boundary must be a simple polygon")
        self.boundary = boundary
        self.grid_step = float(grid_step)
        self.area = area
        xmin, ymin = boundary.min(axis=0)
        xmax, ymax = boundary.max(axis=0)
        self.origin = np.array([xmin, ymin])
        self.nx = max(1, int(math.ceil((xmax - xmin) / grid_step - 1e-9)))
        self.ny = max(1, int(math.ceil((ymax - ymin) / grid_step - 1e-9)))
        self._inside_mask = None

    @property
    def inside_mask(self):
        """Boolean (ny, nx) mask of grid cells whose center lies in the field."""
        if self._inside_mask is None:
            self._inside_mask = kernels.polygon_mask(
                self.boundary, self.origin, self.grid_step, self.nx, self.ny
            )
        return self._inside_mask

    def cell_centers_inside(self):
        """(m, 2) coordinates of the centers of all cells inside the field."""
        jj, ii = np.nonzero(self.inside_mask)
        pts = np.empty((len(ii), 2))
        pts[:, 0] = self.origin[0] + (ii + 0.5) * self.grid_step
        pts[:, 1] = self.origin[1] + (jj + 0.5) * self.grid_step
        return pts

    def cell_index(self, points):
        """(j, i) raster indices of the cells containing ``points``, clipped."""
        points = np.atleast_2d(points)
        i = np.clip(
            ((points[:, 0] - self.origin[0]) / self.grid_step).astype(np.int64),
            0,
            self.nx - 1,
        )
        j = np.clip(
            ((points[:, 1] - self.origin[1]) / self.grid_step).astype(np.int64),
            0,
            self.ny - 1,
        )
        return j, i

    def start_point(self):
        """The boundary vertex that is lowest on the left: lexicographic min."""
        order = np.lexsort((self.boundary[:, 1], self.boundary[:, 0]))
        return self.boundary[order[0]].copy()

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.grid_step == other.grid_step
            and self.boundary.shape == other.boundary.shape
            and bool(np.all(self.boundary == other.boundary))
        )


@dataclass
class RasterRegion:
    """Rasterized subset of the field's bounding box."""

    origin: np.ndarray
    step: float
    mask: np.ndarray

    @property
    def area(self):
        return float(np.count_nonzero(self.mask)) * self.step * self.step

    @classmethod
    def empty(cls, field):
        return cls(
            origin=field.origin.copy(),
            step=field.grid_step,
            mask=np.zeros((field.ny, field.nx), dtype=bool),
        )


def region_union(a, b):
    """Cell-wise union of two raster regions on the same grid."""
    if (
        a.step != b.step
        or a.mask.shape != b.mask.shape
        or not np.allclose(a.origin, b.origin, atol=1e-12)
    ):
        raise GridMismatch("regions are on different grids")
    return RasterRegion(origin=a.origin.copy(), step=a.step, mask=a.mask | b.mask)


@dataclass
class Hull:
    """Convex hull polygon; degenerate for fewer than 3 extreme points."""

    vertices: np.ndarray  # counterclockwise
    degenerate: bool = False


@dataclass
class OrientedBox:
    """Rectangle with arbitrary orientation.

    ``axis`` is a unit vector; ``half_lengths`` = (along axis, across axis).
    For boxes produced by min_bounding_box the along-axis side is the long one.
    """

    center: np.ndarray
    axis: np.ndarray
    half_lengths: tuple

    def corners(self):
        u = self.axis
        v = np.array([-u[1], u[0]])
        hu, hv = self.half_lengths
        c = self.center
        return np.array(
            [c + hu * u + hv * v, c - hu * u + hv * v, c - hu * u - hv * v, c + hu * u - hv * v]
        )

    @property
    def area(self):
        return 4.0 * self.half_lengths[0] * self.half_lengths[1]


def convex_hull(points):
    """Monotone-chain convex hull; counterclockwise vertex order.

    One or two (distinct) input points yield a degenerate point/segment hull.
    """
    if hasattr(points, "locations"):
        points = points.locations
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise EmptyPattern("convex hull of an empty pattern")
    pts = np.unique(pts, axis=0)  # sorts lexicographically
    if pts.shape[0] == 1:
        return Hull(vertices=pts.copy(), degenerate=True)
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:
        return Hull(vertices=hull, degenerate=True)
    return Hull(vertices=hull, degenerate=False)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def min_bounding_box(points):
    """Minimum-area oriented rectangle over the points (rotating calipers).

    The box axis points along the longest side, normalized to an angle in
    [0, pi) against +x; ties on area pick the smaller angle.
    """
    if hasattr(points, "locations"):
        points = points.locations
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise EmptyPattern("bounding box of an empty pattern")
    distinct = np.unique(pts, axis=0)
    if distinct.shape[0] < 2:
        raise DegenerateGeometry("bounding box needs at least 2 distinct points")
    hull = convex_hull(distinct)
    hv = hull.vertices
    edges = np.roll(hv, -1, axis=0) - hv
    best = None
    for e in edges:
        norm = math.hypot(e[0], e[1])
        if norm < GEOM_EPS:
            continue
        u = e / norm
        v = np.array([-u[1], u[0]])
        su = hv @ u
        sv = hv @ v
        du = su.max() - su.min()
        dv = sv.max() - sv.min()
        area = du * dv
        if du >= dv:
            axis, long_e, short_e = u, du, dv
        else:
            axis, long_e, short_e = v, du, dv
            long_e, short_e = dv, du
        if axis[1] < 0 or (axis[1] == 0 and axis[0] < 0):
            axis = -axis
        angle = math.atan2(axis[1], axis[0]) % math.pi
        center = (
            (su.max() + su.min()) / 2.0 * u + (sv.max() + sv.min()) / 2.0 * v
        )
        cand = (area, angle, center, axis, (long_e / 2.0, short_e / 2.0))
        if best is None:
            best = cand
        elif cand[0] < best[0] * (1.0 - 1e-12):
            best = cand
        elif cand[0] <= best[0] * (1.0 + 1e-12) and cand[1] < best[1]:
            best = cand
    if best is None or best[4][1] <= GEOM_EPS:
        raise DegenerateGeometry("points are collinear")
    _, _, center, axis, halves = best
    return OrientedBox(center=center, axis=axis, half_lengths=halves)


def contains(field, p):
    """True iff p lies inside or on the boundary of the field (even-odd rule)."""
    p = np.asarray(p, dtype=np.float64).reshape(1, 2)
    return bool(kernels.point_in_polygon(field.boundary, p)[0])


def rasterize_disks(field, centers, radius):
    """Raster union of closed disks around the centers, clipped to the field."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if hasattr(centers, "locations"):
        centers = centers.locations
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if centers.shape[0] == 0:
        return RasterRegion.empty(field)
    mask = kernels.disks_mask(
        centers, radius, field.origin, field.grid_step, field.nx, field.ny
    )
    mask &= field.inside_mask
    return RasterRegion(origin=field.origin.copy(), step=field.grid_step, mask=mask)


def rasterize_rects(field, rects):
    """Raster union of oriented rectangles, clipped to the field.

    Overlapping rectangles merge by construction of the union mask.
    """
    rows = []
    for r in rects:
        hu, hv = r.half_lengths
        if hu <= 0 or hv <= 0:
            raise ValueError("rectangle half-lengths must be positive")
        rows.append([r.center[0], r.center[1], r.axis[0], r.axis[1], hu, hv])
    if not rows:
        return RasterRegion.empty(field)
    mask = kernels.rects_mask(
        np.asarray(rows, dtype=np.float64),
        field.origin,
        field.grid_step,
        field.nx,
        field.ny,
    )
    mask &= field.inside_mask
    return RasterRegion(origin=field.origin.copy(), step=field.grid_step, mask=mask)
