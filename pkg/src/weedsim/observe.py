"""Observation model: independent thinning and near-duplicate merging."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .pointproc import PointPattern


@dataclass
class ThinningSpec:
    """Retention probability for independent thinning, with a label.

    obs1/obs2 correspond to the two observation dates: their probabilities
    are the observed counts divided by the ground-truth reference count.
    """

    retain_probability: float
    label: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.retain_probability <= 1.0:
            raise ValueError("retain probability must be in (0, 1]")

    @classmethod
    def obs1(cls, n_obs1, n_ref):
        return cls(retain_probability=n_obs1 / n_ref, label="obs1")

    @classmethod
    def obs2(cls, n_obs2, n_ref):
        return cls(retain_probability=n_obs2 / n_ref, label="obs2")


def thin(pattern, spec, seed):
    """Keep each ground-truth point independently with probability p.

    Order is preserved; the output is a subset of the input. Deterministic
    for a fixed seed.
    """
    if pattern.role != "ground_truth":
        raise ValueError("thinning applies to ground-truth patterns")
    rng = np.random.default_rng(np.uint64(seed))
    keep = rng.random(len(pattern)) < spec.retain_probability
    return PointPattern(locations=pattern.locations[keep].copy(), role="observed")


def merge_close(pattern, radius=0.05):
    """Replace groups of points closer than ``radius`` by their centroid.

    Groups are the connected components of the graph linking points at
    strictly less than ``radius``; a single pass, so centroids are not
    re-examined. Output components are ordered by their smallest source index.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = pattern.locations
    n = pts.shape[0]
    if n == 0:
        return PointPattern(locations=pts.copy(), role=pattern.role)
    tree = cKDTree(pts)
    pairs = tree.query_pairs(radius, output_type="ndarray")
    if pairs.size:
        d = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
        pairs = pairs[d < radius]  # the linking relation is strict
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(n)])
    order = []
    seen = {}
    for i, r in enumerate(roots):
        if r not in seen:
            seen[r] = len(order)
            order.append(r)
    merged = np.empty((len(order), 2))
    for r, k in seen.items():
        merged[k] = pts[roots == r].mean(axis=0)
    return PointPattern(locations=merged, role=pattern.role)
