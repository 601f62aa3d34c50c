"""Built-in stand-in field and anchor dataset.

The experimental field polygon and weed coordinates are not published, so the
package ships a deterministic synthetic stand-in: a rectangular field of the
same area and a clustered anchor point set with the same total count. All
quantities that depend on the real field shape are therefore qualitative.
"""

import numpy as np

from . import defaults
from .geometry import Field
from .pointproc import PointPattern

_ANCHOR_SEED = 20190910
_CLUSTER_COUNT = 25
_CLUSTER_SD = 3.0  # m
_CLUSTER_FRACTION = 0.65


def standin_field(grid_step=defaults.GRID_STEP):
    w, h = defaults.STANDIN_FIELD_SIZE
    boundary = np.array([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])
    return Field(boundary=boundary, grid_step=grid_step)


def standin_anchors(n=defaults.REFERENCE_COUNT):
    """Clustered stand-in for the experimental ground-truth locations."""
    rng = np.random.default_rng(_ANCHOR_SEED)
    w, h = defaults.STANDIN_FIELD_SIZE
    centers = rng.random((_CLUSTER_COUNT, 2)) * (w, h)
    pts = []
    while len(pts) < n:
        if rng.random() < _CLUSTER_FRACTION:
            c = centers[rng.integers(_CLUSTER_COUNT)]
            p = c + rng.normal(0.0, _CLUSTER_SD, size=2)
        else:
            p = rng.random(2) * (w, h)
        if 0.0 <= p[0] <= w and 0.0 <= p[1] <= h:
            pts.append(p)
    return PointPattern(locations=np.asarray(pts), role="ground_truth")
