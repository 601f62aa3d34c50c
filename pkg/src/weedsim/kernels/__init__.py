"""Hot numeric kernels with two interchangeable backends.

The numba backend is used by default; set ``WEEDSIM_BACKEND=numpy`` to force
the pure-numpy fallback (or ``WEEDSIM_BACKEND=numba`` to fail loudly if numba
is unavailable). Both backends implement identical semantics; see
``benchmarks/bench_backends.py`` for a speed comparison.
"""

import os

_requested = os.environ.get("WEEDSIM_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"WEEDSIM_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy as _impl

        BACKEND = "numpy"

point_in_polygon = _impl.point_in_polygon
polygon_mask = _impl.polygon_mask
disks_mask = _impl.disks_mask
disk_counts = _impl.disk_counts
rects_mask = _impl.rects_mask
gaussian_kernel_sum = _impl.gaussian_kernel_sum
nn_tour = _impl.nn_tour
two_opt = _impl.two_opt
or_opt = _impl.or_opt

__all__ = [
    "BACKEND",
    "point_in_polygon",
    "polygon_mask",
    "disks_mask",
    "disk_counts",
    "rects_mask",
    "gaussian_kernel_sum",
    "nn_tour",
    "two_opt",
    "or_opt",
]
