"""The five performance measures for one (ground truth, plan) pair.

A ground-truth weed counts as treated iff the raster cell containing it is
part of the treated region; this keeps the treated count consistent with the
treated-area computation. Measures that would divide by zero are flagged as
None rather than silently coerced.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .pointproc import PointPattern

DENSITY_DISK_RADIUS = 2.0  # m


@dataclass
class MetricsRecord:
    driving_distance: float  # d_d, m
    remaining_fraction: Optional[float]  # f_r, undefined when n_ground == 0
    max_remaining_density: Optional[float]  # rho_2, 1/m^2
    treated_area_fraction: float  # A_t
    area_per_treated_weed: Optional[float]  # A_eff, undefined when n_treated == 0
    n_ground: int
    n_observed: int
    n_targeted: int
    n_treated: int


def treated_weeds(ground_truth, plan):
    """Ground-truth locations whose raster cell belongs to the treated region."""
    pts = ground_truth.locations
    region = plan.treated_region
    if pts.shape[0] == 0 or not region.mask.any():
        return PointPattern(locations=np.empty((0, 2)), role="treated")
    ny, nx = region.mask.shape
    i = ((pts[:, 0] - region.origin[0]) / region.step).astype(np.int64)
    j = ((pts[:, 1] - region.origin[1]) / region.step).astype(np.int64)
    ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
    hit = np.zeros(pts.shape[0], dtype=bool)
    hit[ok] = region.mask[j[ok], i[ok]]
    return PointPattern(locations=pts[hit].copy(), role="treated")


def max_remaining_density(untreated, field, radius=DENSITY_DISK_RADIUS):
    """Worst-case density of untreated weeds in a disk scanned over the grid."""
    if untreated.shape[0] == 0:
        return 0.0
    counts = kernels.disk_counts(
        untreated, radius, field.origin, field.grid_step, field.nx, field.ny
    )
    peak = int(counts[field.inside_mask].max()) if field.inside_mask.any() else 0
    return peak / (radius * radius * math.pi)


def compute_metrics(ground_truth, plan, field, n_observed=None):
    """All five measures; the density scan runs over cells inside the field."""
    treated = treated_weeds(ground_truth, plan)
    n_g = len(ground_truth)
    n_tr = len(treated)
    n_t = len(plan.targeted)
    area = plan.treated_region.area
    if n_g > 0:
        remaining = _untreated(ground_truth, plan)
        f_r = (n_g - n_tr) / n_g
        rho2 = max_remaining_density(remaining, field)
    else:
        f_r = None
        rho2 = None
    return MetricsRecord(
        driving_distance=plan.driving_distance,
        remaining_fraction=f_r,
        max_remaining_density=rho2,
        treated_area_fraction=area / field.area,
        area_per_treated_weed=area / n_tr if n_tr > 0 else None,
        n_ground=n_g,
        n_observed=n_observed if n_observed is not None else n_g,
        n_targeted=n_t,
        n_treated=n_tr,
    )


def _untreated(ground_truth, plan):
    pts = ground_truth.locations
    region = plan.treated_region
    if not region.mask.any():
        return pts.copy()
    ny, nx = region.mask.shape
    i = ((pts[:, 0] - region.origin[0]) / region.step).astype(np.int64)
    j = ((pts[:, 1] - region.origin[1]) / region.step).astype(np.int64)
    ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
    hit = np.zeros(pts.shape[0], dtype=bool)
    hit[ok] = region.mask[j[ok], i[ok]]
    return pts[~hit].copy()
