"""Timing comparison of the numba and pure-numpy kernel backends.

Runs each kernel on representative workloads in a subprocess per backend
(the backend is chosen at import time via WEEDSIM_BACKEND) and prints a
table. Usage: python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads():
    import numpy as np

    from weedsim import kernels

    rng = np.random.default_rng(0)
    poly = np.array([[0.0, 0.0], [128.0, 0.0], [128.0, 64.5], [0.0, 64.5]])
    pts = rng.random((20000, 2)) * (128, 64.5)
    origin = np.array([0.0, 0.0])
    step = 0.05
    nx, ny = 2560, 1290
    anchors = rng.random((2313, 2)) * (128, 64.5)
    query = rng.random((50000, 2)) * (128, 64.5)
    tour_pts = np.vstack([[[0.0, 0.0]], rng.random((600, 2)) * (128, 64.5)])
    rects = np.empty((500, 6))
    rects[:, 0:2] = rng.random((500, 2)) * (128, 64.5)
    theta = rng.random(500) * np.pi
    rects[:, 2] = np.cos(theta)
    rects[:, 3] = np.sin(theta)
    rects[:, 4] = 0.5
    rects[:, 5] = 0.125

    return [
        ("point_in_polygon (20k pts)", lambda: kernels.point_in_polygon(poly, pts)),
        ("polygon_mask (2560x1290)", lambda: kernels.polygon_mask(poly, origin, step, nx, ny)),
        ("disks_mask (2k disks)", lambda: kernels.disks_mask(pts[:2000], 0.4, origin, step, nx, ny)),
        ("disk_counts (2k pts, r=2m)", lambda: kernels.disk_counts(pts[:2000], 2.0, origin, step, nx, ny)),
        ("rects_mask (500 rects)", lambda: kernels.rects_mask(rects, origin, step, nx, ny)),
        ("gaussian_kernel_sum (50k q)", lambda: kernels.gaussian_kernel_sum(query, anchors, 2.0, 12.0)),
        ("nn_tour (600 pts)", lambda: kernels.nn_tour(tour_pts)),
        ("two_opt (600 pts)", lambda: kernels.two_opt(tour_pts, kernels.nn_tour(tour_pts))),
        ("or_opt (600 pts)", lambda: kernels.or_opt(tour_pts, kernels.nn_tour(tour_pts))),
    ]


def run_worker(repeat):
    results = {}
    for name, fn in _workloads():
        fn()  # warm up (JIT compilation for the numba backend)
        best = min(_time_once(fn) for _ in range(repeat))
        results[name] = best
    json.dump(results, sys.stdout)


def _time_once(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        run_worker(args.repeat)
        return
    timings = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, WEEDSIM_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker",
             "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        timings[backend] = json.loads(proc.stdout)
    width = max(len(k) for k in timings["numba"]) + 2
    print(f"{'kernel':<{width}}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    for name in timings["numba"]:
        tb, tn = timings["numba"][name], timings["numpy"][name]
        print(f"{name:<{width}}{tb * 1e3:>8.1f}ms{tn * 1e3:>8.1f}ms{tn / tb:>8.1f}x")


if __name__ == "__main__":
    main()
