"""Intensity models and inhomogeneous Poisson sampling on a field.

Four intensity shapes are supported: a kernel estimate calibrated to anchor
locations (cal), a constant (hom), a bivariate normal bump at the field
centroid (cen), and sinusoidal waves (sin). Each model is normalized so that
the intensity integrates to intensity_factor * reference_count over the field.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .errors import (
    BandwidthSelectionFailed,
    LambdaMaxViolation,
    NotNormalized,
    ZeroIntensity,
)

ROLES = ("ground_truth", "observed", "targeted", "treated")

# relative factor applied to the grid maximum of the intensity to guard
# against between-grid-cell maxima during rejection sampling
LAMBDA_MAX_SAFETY = 1.001

# the calibrated kernel sum is truncated at this many bandwidths; the
# neglected tail is ~exp(-18), far below the 0.5% normalization tolerance
CAL_CUTOFF_BANDWIDTHS = 6.0


@dataclass
class PointPattern:
    """Ordered set of planar locations with a pipeline role."""

    locations: np.ndarray  # (n, 2), meters
    role: str

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=np.float64).reshape(-1, 2)
        if self.role not in ROLES:
            raise ValueError(f"unknown pattern role {self.role!r}")

    def __len__(self):
        return self.locations.shape[0]

    def with_role(self, role):
        return PointPattern(locations=self.locations.copy(), role=role)


@dataclass
class IntensityModel:
    """One of the four intensity shapes plus its normalization state.

    ``alpha`` is None until :func:`normalize` has been called; sampling and
    evaluation refuse to run before that. ``grid_max_base`` caches the maximum
    of the base intensity over the field grid for rejection sampling.
    """

    kind: str  # cal | hom | cen | sin
    intensity_factor: float
    reference_count: int
    params: dict
    alpha: Optional[float] = None
    grid_max_base: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("cal", "hom", "cen", "sin"):
            raise ValueError(f"unknown intensity kind {self.kind!r}")
        if self.intensity_factor <= 0:
            raise ValueError("intensity_factor must be positive")
        if self.kind == "cal":
            if self.params["bandwidth"] <= 0:
                raise ValueError("cal bandwidth must be positive")
        elif self.kind == "cen":
            sigma = np.asarray(self.params["sigma"], dtype=np.float64)
            if not np.allclose(sigma, sigma.T) or np.any(np.linalg.eigvalsh(sigma) <= 0):
                raise ValueError("cen dispersion matrix must be symmetric positive definite")
        elif self.kind == "sin":
            u = np.asarray(self.params["wave_normal"], dtype=np.float64)
            if abs(np.linalg.norm(u) - 1.0) > 1e-9:
                raise ValueError("sin wave normal must be a unit vector")
            if self.params["wavelength"] <= 0:
                raise ValueError("sin wavelength must be positive")


def make_model(kind, field, intensity_factor=1.0, reference_count=2313, **params):
    """Build a model of the given kind with field-derived defaults.

    cal needs ``anchors`` (and ``bandwidth``); cen defaults its mean to the
    field centroid; sin defaults its wave normal to the long-side direction of
    the field's bounding box.
    """
    from . import defaults

    params = dict(params)
    if kind == "cen":
        params.setdefault("mean", field.boundary.mean(axis=0))
        params.setdefault("sigma", defaults.CEN_SIGMA)
    if kind == "sin":
        params.setdefault("wavelength", defaults.SIN_WAVELENGTH)
        width = field.boundary[:, 0].max() - field.boundary[:, 0].min()
        height = field.boundary[:, 1].max() - field.boundary[:, 1].min()
        params.setdefault(
            "wave_normal", np.array([1.0, 0.0]) if width >= height else np.array([0.0, 1.0])
        )
    return IntensityModel(
        kind=kind,
        intensity_factor=float(intensity_factor),
        reference_count=int(reference_count),
        params=params,
    )


def base_intensity(model, points):
    """Evaluate the un-normalized base intensity at an (n, 2) array of points."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if model.kind == "hom":
        return np.ones(points.shape[0])
    if model.kind == "cal":
        h = model.params["bandwidth"]
        anchors = np.asarray(model.params["anchors"], dtype=np.float64)
        return kernels.gaussian_kernel_sum(
            points, anchors, h, CAL_CUTOFF_BANDWIDTHS * h
        )
    if model.kind == "cen":
        mu = np.asarray(model.params["mean"], dtype=np.float64)
        sigma = np.asarray(model.params["sigma"], dtype=np.float64)
        inv = np.linalg.inv(sigma)
        det = np.linalg.det(sigma)
        d = points - mu
        q = inv[0, 0] * d[:, 0] ** 2 + 2 * inv[0, 1] * d[:, 0] * d[:, 1] + inv[1, 1] * d[:, 1] ** 2
        return np.exp(-0.5 * q) / math.sqrt((2.0 * math.pi) ** 2 * det)
    # sin: waves of the form sin(2 pi <u, x> / wavelength) + 2, always positive
    u = np.asarray(model.params["wave_normal"], dtype=np.float64)
    wl = model.params["wavelength"]
    return np.sin(2.0 * math.pi * (points @ u) / wl) + 2.0


def eval_intensity(model, points):
    """Normalized intensity (1/m^2) at one point or an (n, 2) array."""
    if model.alpha is None:
        raise NotNormalized("call normalize() before evaluating the intensity")
    return model.intensity_factor * model.alpha * base_intensity(model, points)


def normalize(model, field):
    """Set alpha so the intensity integrates to intensity_factor * n_ref.

    The integral uses the midpoint rule over the grid cells whose center is
    inside the field; the same discretization is reused to cache the grid
    maximum needed by the rejection sampler.
    """
    centers = field.cell_centers_inside()
    base = base_intensity(model, centers)
    integral = float(base.sum()) * field.grid_step**2
    if integral <= 0.0:
        raise ZeroIntensity("base intensity integrates to zero over the field")
    return replace(
        model,
        alpha=model.reference_count / integral,
        grid_max_base=float(base.max()),
    )


def select_bandwidth(anchors, field, seed, n_candidates=50):
    """Pick a kernel bandwidth by leave-one-out cross-validated likelihood.

    Candidates are drawn from a gamma distribution with mean 1.5 and standard
    deviation 1.1 (shape/scale parameterization derived from those moments).
    Each candidate is scored by the leave-one-out log likelihood of the
    anchors under the kernel density estimator with that bandwidth; the best
    one wins, ties going to the smaller bandwidth. Candidates for which some
    anchor has zero leave-one-out density are skipped.
    """
    if hasattr(anchors, "locations"):
        anchors = anchors.locations
    anchors = np.asarray(anchors, dtype=np.float64)
    n = anchors.shape[0]
    if n < 10:
        raise ValueError("bandwidth selection needs at least 10 anchors")
    mean, sd = 1.5, 1.1
    shape = (mean / sd) ** 2
    scale = sd * sd / mean
    rng = np.random.default_rng(np.uint64(seed))
    candidates = rng.gamma(shape, scale, size=n_candidates)
    d2 = ((anchors[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
    best_h = None
    best_ll = -np.inf
    for h in candidates:
        k = np.exp(-d2 / (2.0 * h * h))
        loo = k.sum(axis=1) - 1.0  # drop the self term
        if np.any(loo <= 0.0):
            continue
        dens = loo / ((n - 1) * 2.0 * math.pi * h * h)
        ll = float(np.log(dens).sum())
        if ll > best_ll or (ll == best_ll and (best_h is None or h < best_h)):
            best_ll = ll
            best_h = float(h)
    if best_h is None:
        raise BandwidthSelectionFailed(
            "no candidate bandwidth gave a finite cross-validation likelihood"
        )
    return best_h


def loo_log_likelihood(anchors, h):
    """Leave-one-out log likelihood of the anchors under a KDE with bandwidth h."""
    anchors = np.asarray(anchors, dtype=np.float64)
    n = anchors.shape[0]
    d2 = ((anchors[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
    loo = np.exp(-d2 / (2.0 * h * h)).sum(axis=1) - 1.0
    if np.any(loo <= 0.0):
        return -np.inf
    return float(np.log(loo / ((n - 1) * 2.0 * math.pi * h * h)).sum())


def sample_poisson(model, field, seed):
    """Draw one ground-truth pattern from the model on the field.

    The total count is Poisson with mean intensity_factor * n_ref; locations
    are then placed by rejection sampling against a uniform proposal on the
    field's bounding box. Identical (model, field, seed) triples give
    bit-identical patterns.
    """
    if model.alpha is None or model.grid_max_base is None:
        raise NotNormalized("call normalize() before sampling")
    rng = np.random.default_rng(np.uint64(seed))
    lam_total = model.intensity_factor * model.reference_count
    n_points = int(rng.poisson(lam_total))
    lam_max = LAMBDA_MAX_SAFETY * model.intensity_factor * model.alpha * model.grid_max_base
    xmin, ymin = field.origin
    width = field.nx * field.grid_step
    height = field.ny * field.grid_step
    bbox_area = (field.boundary[:, 0].max() - xmin) * (field.boundary[:, 1].max() - ymin)
    # expected acceptance probability, used only to size proposal batches
    p_accept = max(lam_total / (lam_max * bbox_area), 1e-6)
    accepted = []
    n_acc = 0
    while n_acc < n_points:
        batch = max(256, int(math.ceil((n_points - n_acc) / p_accept * 1.2)))
        prop = np.empty((batch, 2))
        prop[:, 0] = xmin + rng.random(batch) * (field.boundary[:, 0].max() - xmin)
        prop[:, 1] = ymin + rng.random(batch) * (field.boundary[:, 1].max() - ymin)
        u = rng.random(batch)
        lam = eval_intensity(model, prop)
        if np.any(lam > lam_max * (1.0 + 1e-12)):
            raise LambdaMaxViolation(
                "intensity exceeded the assumed maximum during rejection sampling"
            )
        keep = (u * lam_max < lam) & kernels.point_in_polygon(field.boundary, prop)
        pts = prop[keep]
        if pts.shape[0] > n_points - n_acc:
            pts = pts[: n_points - n_acc]
        accepted.append(pts)
        n_acc += pts.shape[0]
    locations = (
        np.concatenate(accepted, axis=0) if accepted else np.empty((0, 2))
    )
    return PointPattern(locations=locations, role="ground_truth")
