"""Target selection and the two virtual treatment tools.

The robot drives point to point along a heuristic TSP tour and treats a disk
around every target. The tractor meanders over the infested area in parallel
swaths and treats per-section rectangles. Both start and end at a fixed point
x0 and are deterministic functions of their inputs.
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .errors import DegenerateGeometry, InvalidStart
from .geometry import (
    OrientedBox,
    RasterRegion,
    contains,
    convex_hull,
    min_bounding_box,
    rasterize_disks,
    rasterize_rects,
)
from .pointproc import PointPattern


@dataclass
class RobotConfig:
    treatment_radius: float  # m

    def __post_init__(self):
        if self.treatment_radius <= 0:
            raise ValueError("treatment radius must be positive")


@dataclass
class TractorConfig:
    meander_width: float = 2.5  # m, equals the attachment width
    sections: int = 10
    treatment_length: Optional[float] = None  # default w_m / n_s

    def __post_init__(self):
        if self.meander_width <= 0:
            raise ValueError("meander width must be positive")
        if self.sections < 1:
            raise ValueError("section count must be at least 1")
        if self.treatment_length is None:
            self.treatment_length = self.meander_width / self.sections
        elif self.treatment_length <= 0:
            raise ValueError("treatment length must be positive")


@dataclass
class TreatmentPlan:
    route: np.ndarray  # polyline, first == last == x0 (single point if empty)
    driving_distance: float
    treated_region: RasterRegion
    targeted: PointPattern
    # tractor diagnostics (None for the robot)
    swaths: Optional[list] = None  # world-coordinate segments, traversal order
    swath_of_target: Optional[np.ndarray] = None
    rectangles: Optional[list] = None  # OrientedBox per engagement interval
    rect_sources: Optional[list] = None  # target indices behind each rectangle


def polyline_length(route):
    if route.shape[0] < 2:
        return 0.0
    return float(np.sqrt(((route[1:] - route[:-1]) ** 2).sum(axis=1)).sum())


def action_threshold(observed, threshold):
    """Keep observed points whose nearest-neighbor distance is <= threshold.

    An infinite threshold targets every observed location. Order preserved.
    """
    if observed.role != "observed":
        raise ValueError("action threshold applies to observed patterns")
    pts = observed.locations
    if math.isinf(threshold) or len(observed) == 0:
        return PointPattern(locations=pts.copy(), role="targeted")
    if len(observed) == 1:
        return PointPattern(locations=np.empty((0, 2)), role="targeted")
    tree = cKDTree(pts)
    dist, _ = tree.query(pts, k=2)
    keep = dist[:, 1] <= threshold
    return PointPattern(locations=pts[keep].copy(), role="targeted")


def _force_target_cells(region, field, targets):
    # the treated set must contain every targeted weed; rasterization can
    # miss a target whose cell center falls just outside the treated shape
    if targets.shape[0]:
        j, i = field.cell_index(targets)
        region.mask[j, i] = True
    return region


def _empty_plan(field, x0, targeted):
    return TreatmentPlan(
        route=np.asarray([x0], dtype=np.float64),
        driving_distance=0.0,
        treated_region=RasterRegion.empty(field),
        targeted=targeted,
    )


def robot_route(targets, x0):
    """Closed tour x0 -> targets -> x0.

    Nearest-neighbor construction, then alternating 2-opt and Or-opt
    first-improvement sweeps until neither finds a shortening move.
    """
    xy = np.vstack([np.asarray(x0, dtype=np.float64).reshape(1, 2), targets])
    tour = kernels.nn_tour(xy)
    while True:
        improved = kernels.or_opt(xy, kernels.two_opt(xy, tour))
        if np.array_equal(improved, tour):
            break
        tour = improved
    route = np.vstack([xy[tour], xy[tour[0]]])
    return route


def plan_robot(targeted, cfg, field, x0):
    """Robot plan: TSP tour plus one treated disk per target.

    The route does not depend on the treatment radius.
    """
    if targeted.role != "targeted":
        raise ValueError("plan_robot expects a targeted pattern")
    if not contains(field, x0):
        raise InvalidStart("start point lies outside the field")
    if len(targeted) == 0:
        return _empty_plan(field, x0, targeted)
    route = robot_route(targeted.locations, x0)
    region = rasterize_disks(field, targeted, cfg.treatment_radius)
    _force_target_cells(region, field, targeted.locations)
    return TreatmentPlan(
        route=route,
        driving_distance=polyline_length(route),
        treated_region=region,
        targeted=targeted,
    )


@dataclass
class TractorLayout:
    """Swath geometry shared by all section counts."""

    u: np.ndarray  # driving direction (unit)
    v: np.ndarray  # cross direction (unit, perpendicular)
    line_ts: np.ndarray  # cross coordinate per swath line, traversal order
    intervals: np.ndarray  # (m, 2) along-coordinate extents per swath
    swath_of_target: np.ndarray
    route: np.ndarray
    driving_distance: float


def _hull_slice(hull_s, hull_t, tq):
    """Along-coordinate interval of a convex polygon at cross coordinate tq."""
    lo, hi = np.inf, -np.inf
    k = len(hull_s)
    for i in range(k):
        s1, t1 = hull_s[i], hull_t[i]
        s2, t2 = hull_s[(i + 1) % k], hull_t[(i + 1) % k]
        if abs(t1 - tq) <= 1e-12:
            lo, hi = min(lo, s1), max(hi, s1)
        if (t1 < tq) != (t2 < tq) and t1 != t2:
            s = s1 + (tq - t1) * (s2 - s1) / (t2 - t1)
            lo, hi = min(lo, s), max(hi, s)
    if lo > hi:  # numeric corner case: fall back to the full extent
        lo, hi = float(np.min(hull_s)), float(np.max(hull_s))
    return lo, hi


def _slab_extent(hull_s, hull_t, t_lo, t_hi):
    """Along-coordinate range of the part of a convex polygon with cross
    coordinate in [t_lo, t_hi].

    Using the slab rather than the center slice keeps every hull point of the
    slab within reach of the swath even when the hull widens off-center.
    """
    lo1, hi1 = _hull_slice(hull_s, hull_t, t_lo)
    lo2, hi2 = _hull_slice(hull_s, hull_t, t_hi)
    lo, hi = min(lo1, lo2), max(hi1, hi2)
    inside = (hull_t >= t_lo - 1e-12) & (hull_t <= t_hi + 1e-12)
    if inside.any():
        lo = min(lo, float(hull_s[inside].min()))
        hi = max(hi, float(hull_s[inside].max()))
    return lo, hi


def tractor_layout(targeted, field, x0, meander_width):
    """Compute swath lines, their extents, the route, and target assignment.

    The swath farthest from x0 runs half a meander width inside the extreme
    target on that side; further lines are laid toward x0 at meander-width
    spacing until the opposite extreme is within half a width of a line. The
    traversal starts on the swath nearest x0; of the two along-swath starting
    directions the one giving the shorter closed route wins (ties: +u first).
    """
    pts = targeted.locations
    x0 = np.asarray(x0, dtype=np.float64)
    w = meander_width
    distinct = np.unique(pts, axis=0)
    degenerate = False
    if distinct.shape[0] < 2:
        degenerate = True
    else:
        try:
            box = min_bounding_box(distinct)
            u = box.axis
        except DegenerateGeometry:
            degenerate = True
    if degenerate:
        if distinct.shape[0] >= 2:
            # collinear targets: drive along their common line
            far = distinct[np.argmax(((distinct - distinct[0]) ** 2).sum(axis=1))]
            u = far - distinct[0]
            u = u / np.linalg.norm(u)
        else:
            # a single target: drive along the long side of the field box
            width = field.boundary[:, 0].max() - field.boundary[:, 0].min()
            height = field.boundary[:, 1].max() - field.boundary[:, 1].min()
            u = np.array([1.0, 0.0]) if width >= height else np.array([0.0, 1.0])
    v = np.array([-u[1], u[0]])
    s = pts @ u
    t = pts @ v
    t0 = float(x0 @ v)
    t_min, t_max = float(t.min()), float(t.max())
    span = t_max - t_min
    if degenerate:
        # single swath straight through the (collinear or lone) targets
        line_ts = np.array([t_min])
        intervals = np.array([[s.min() - w / 2.0, s.max() + w / 2.0]])
        assign = np.zeros(len(pts), dtype=np.int64)
    else:
        if abs(t_max - t0) >= abs(t_min - t0):
            far, sign = t_max, 1.0
        else:
            far, sign = t_min, -1.0
        m = max(1, int(math.ceil(span / w - 1e-9)))
        # generated far side first; traversal order is nearest x0 first
        lines = far - sign * (w / 2.0) - sign * w * np.arange(m)
        line_ts = lines[::-1].copy()
        assign = np.argmin(np.abs(t[:, None] - line_ts[None, :]), axis=1)
        hull = convex_hull(distinct)
        hull_s = hull.vertices @ u
        hull_t = hull.vertices @ v
        intervals = np.empty((m, 2))
        for i, lt in enumerate(line_ts):
            t_lo = min(max(lt - w / 2.0, t_min), t_max)
            t_hi = min(max(lt + w / 2.0, t_min), t_max)
            lo, hi = _slab_extent(hull_s, hull_t, t_lo, t_hi)
            intervals[i] = (lo - w / 2.0, hi + w / 2.0)
    best = None
    for first_dir in (1.0, -1.0):
        waypoints = [x0]
        d = first_dir
        for i in range(len(line_ts)):
            lo, hi = intervals[i]
            entry, exit_ = (lo, hi) if d > 0 else (hi, lo)
            waypoints.append(entry * u + line_ts[i] * v)
            waypoints.append(exit_ * u + line_ts[i] * v)
            d = -d
        waypoints.append(x0)
        route = np.asarray(waypoints)
        length = polyline_length(route)
        if best is None or length < best[0] - 1e-12:
            best = (length, route)
    length, route = best
    return TractorLayout(
        u=u,
        v=v,
        line_ts=line_ts,
        intervals=intervals,
        swath_of_target=assign,
        route=route,
        driving_distance=length,
    )


def tractor_rectangles(layout, targeted, meander_width, sections, treatment_length):
    """One per-section engagement rectangle per target.

    Each swath's cross width is split into ``sections`` equal strips; a target
    on a strip boundary goes to the lower-index strip. Every rectangle has
    side lengths exactly treatment_length x strip width; overlapping
    rectangles of nearby targets simply union during rasterization.
    """
    pts = targeted.locations
    w = meander_width
    strip_w = w / sections
    l_d = treatment_length
    s = pts @ layout.u
    t = pts @ layout.v
    rects = []
    sources = []
    for idx in range(len(pts)):
        line = int(layout.swath_of_target[idx])
        t_rel = t[idx] - (layout.line_ts[line] - w / 2.0)
        strip = min(sections - 1, max(0, int(math.ceil(t_rel / strip_w)) - 1))
        t_center = layout.line_ts[line] - w / 2.0 + (strip + 0.5) * strip_w
        center = s[idx] * layout.u + t_center * layout.v
        rects.append(
            OrientedBox(
                center=center,
                axis=layout.u.copy(),
                half_lengths=(l_d / 2.0, strip_w / 2.0),
            )
        )
        sources.append([idx])
    return rects, sources


def plan_tractor(targeted, cfg, field, x0):
    """Tractor plan: meandering route over the hull plus section rectangles.

    The route depends only on the targets and the meander width, never on the
    section count.
    """
    if targeted.role != "targeted":
        raise ValueError("plan_tractor expects a targeted pattern")
    if not contains(field, x0):
        raise InvalidStart("start point lies outside the field")
    if len(targeted) == 0:
        return _empty_plan(field, x0, targeted)
    layout = tractor_layout(targeted, field, x0, cfg.meander_width)
    rects, sources = tractor_rectangles(
        layout, targeted, cfg.meander_width, cfg.sections, cfg.treatment_length
    )
    region = rasterize_rects(field, rects)
    _force_target_cells(region, field, targeted.locations)
    swaths = [
        (
            layout.intervals[i, 0] * layout.u + layout.line_ts[i] * layout.v,
            layout.intervals[i, 1] * layout.u + layout.line_ts[i] * layout.v,
        )
        for i in range(len(layout.line_ts))
    ]
    return TreatmentPlan(
        route=layout.route,
        driving_distance=layout.driving_distance,
        treated_region=region,
        targeted=targeted,
        swaths=swaths,
        swath_of_target=layout.swath_of_target,
        rectangles=rects,
        rect_sources=sources,
    )
