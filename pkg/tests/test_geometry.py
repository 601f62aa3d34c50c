import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull as ScipyHull

from weedsim.errors import DegenerateGeometry, EmptyPattern, GridMismatch
from weedsim.geometry import (
    Field,
    OrientedBox,
    RasterRegion,
    contains,
    convex_hull,
    min_bounding_box,
    rasterize_disks,
    rasterize_rects,
    region_union,
    shoelace_area,
)


class TestField:
    def test_rejects_too_few_vertices(self):
        with pytest.raises(ValueError):
            Field(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_rejects_clockwise(self):
        with pytest.raises(ValueError):
            Field(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]))

    def test_rejects_self_intersection(self):
        bowtie = np.array([[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]])
        with pytest.raises(ValueError):
            Field(bowtie)

    def test_rejects_nonpositive_step(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            Field(square, grid_step=0.0)

    def test_area_and_grid(self, small_field):
        assert small_field.area == pytest.approx(200.0)
        assert small_field.nx == 400
        assert small_field.ny == 200
        assert small_field.inside_mask.all()

    def test_start_point_lexicographic(self):
        f = Field(np.array([[3.0, 0.0], [5.0, 4.0], [0.0, 6.0], [0.0, 1.0]]))
        assert np.allclose(f.start_point(), [0.0, 1.0])

    def test_contains(self, small_field):
        assert contains(small_field, [10.0, 5.0])
        assert contains(small_field, [0.0, 0.0])  # boundary vertex
        assert contains(small_field, [10.0, 0.0])  # boundary edge
        assert not contains(small_field, [25.0, 5.0])
        assert not contains(small_field, [10.0, -0.5])

    def test_nonconvex_inside_mask(self):
        # L-shape: the notch must be outside
        f = Field(
            np.array(
                [[0.0, 0.0], [4.0, 0.0], [4.0, 2.0], [2.0, 2.0], [2.0, 4.0], [0.0, 4.0]]
            ),
            grid_step=0.5,
        )
        assert f.inside_mask.sum() == pytest.approx(12.0 / 0.25)
        assert not contains(f, [3.0, 3.0])
        assert contains(f, [1.0, 3.0])


class TestShoelace:
    def test_square(self):
        sq = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        assert shoelace_area(sq) == pytest.approx(4.0)
        assert shoelace_area(sq[::-1]) == pytest.approx(-4.0)


class TestConvexHull:
    def test_single_point_degenerate(self):
        h = convex_hull(np.array([[0.0, 0.0]]))
        assert h.degenerate
        assert h.vertices.shape == (1, 2)

    def test_two_points_degenerate(self):
        h = convex_hull(np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert h.degenerate

    def test_collinear_degenerate(self):
        h = convex_hull(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
        assert h.degenerate

    def test_square_with_interior_point(self):
        pts = np.array(
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]
        )
        h = convex_hull(pts)
        assert not h.degenerate
        assert h.vertices.shape == (4, 2)
        assert shoelace_area(h.vertices) == pytest.approx(1.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyPattern):
            convex_hull(np.empty((0, 2)))

    def test_counterclockwise(self, rng):
        pts = rng.random((30, 2))
        h = convex_hull(pts)
        assert shoelace_area(h.vertices) > 0

    def test_against_scipy_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(4, 50))
            pts = rng.random((n, 2)) * 100
            ours = convex_hull(pts)
            oracle = ScipyHull(pts)
            got = {tuple(v) for v in ours.vertices}
            want = {tuple(pts[i]) for i in oracle.vertices}
            assert got == want


class TestMinBoundingBox:
    def test_collinear_rejected(self):
        with pytest.raises(DegenerateGeometry):
            min_bounding_box(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))

    def test_duplicate_points_rejected(self):
        with pytest.raises(DegenerateGeometry):
            min_bounding_box(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_axis_aligned_rectangle(self):
        pts = np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 1.0], [0.0, 1.0]])
        box = min_bounding_box(pts)
        assert box.area == pytest.approx(4.0)
        assert abs(box.axis @ np.array([1.0, 0.0])) == pytest.approx(1.0)
        assert box.half_lengths[0] >= box.half_lengths[1]

    def test_rotation_sweep_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 40))
            pts = rng.random((n, 2)) * 50
            try:
                box = min_bounding_box(pts)
            except DegenerateGeometry:
                continue
            assert abs(np.linalg.norm(box.axis) - 1.0) < 1e-12
            best = np.inf
            for k in range(360):
                theta = math.radians(k * 0.5)
                u = np.array([math.cos(theta), math.sin(theta)])
                v = np.array([-u[1], u[0]])
                su, sv = pts @ u, pts @ v
                best = min(best, (su.max() - su.min()) * (sv.max() - sv.min()))
            assert box.area <= best * 1.001
            # the box must contain every point
            u = box.axis
            v = np.array([-u[1], u[0]])
            d = pts - box.center
            assert np.all(np.abs(d @ u) <= box.half_lengths[0] + 1e-9)
            assert np.all(np.abs(d @ v) <= box.half_lengths[1] + 1e-9)


class TestRasterize:
    def test_disk_area(self, small_field):
        region = rasterize_disks(small_field, np.array([[10.0, 5.0]]), 1.25)
        assert region.area == pytest.approx(math.pi * 1.25**2, rel=0.01)

    def test_disk_clipped_to_field(self, small_field):
        region = rasterize_disks(small_field, np.array([[0.0, 0.0]]), 1.0)
        assert region.area == pytest.approx(math.pi / 4.0, rel=0.05)

    def test_disk_union_not_double_counted(self, small_field):
        centers = np.array([[10.0, 5.0], [10.1, 5.0]])
        region = rasterize_disks(small_field, centers, 0.4)
        single = rasterize_disks(small_field, centers[:1], 0.4)
        assert single.area < region.area < 2 * single.area

    def test_disk_radius_validation(self, small_field):
        with pytest.raises(ValueError):
            rasterize_disks(small_field, np.array([[1.0, 1.0]]), 0.0)

    def test_rect_axis_aligned_area(self, small_field):
        rect = OrientedBox(
            center=np.array([10.0, 5.0]),
            axis=np.array([1.0, 0.0]),
            half_lengths=(1.0, 0.5),
        )
        region = rasterize_rects(small_field, [rect])
        assert region.area == pytest.approx(2.0, rel=0.02)

    def test_rect_rotated_area(self, small_field):
        theta = math.radians(30)
        rect = OrientedBox(
            center=np.array([10.0, 5.0]),
            axis=np.array([math.cos(theta), math.sin(theta)]),
            half_lengths=(1.5, 0.25),
        )
        region = rasterize_rects(small_field, [rect])
        assert region.area == pytest.approx(1.5, rel=0.05)

    def test_empty_inputs(self, small_field):
        assert rasterize_disks(small_field, np.empty((0, 2)), 1.0).area == 0.0
        assert rasterize_rects(small_field, []).area == 0.0

    def test_rect_validation(self, small_field):
        bad = OrientedBox(
            center=np.array([1.0, 1.0]),
            axis=np.array([1.0, 0.0]),
            half_lengths=(0.0, 0.5),
        )
        with pytest.raises(ValueError):
            rasterize_rects(small_field, [bad])


class TestRegionUnion:
    def test_union(self, small_field):
        a = rasterize_disks(small_field, np.array([[5.0, 5.0]]), 0.5)
        b = rasterize_disks(small_field, np.array([[15.0, 5.0]]), 0.5)
        u = region_union(a, b)
        assert u.area == pytest.approx(a.area + b.area)

    def test_mismatch_raises(self, small_field, tiny_field):
        a = RasterRegion.empty(small_field)
        b = RasterRegion.empty(tiny_field)
        with pytest.raises(GridMismatch):
            region_union(a, b)
