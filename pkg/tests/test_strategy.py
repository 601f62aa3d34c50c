import math

import numpy as np
import pytest

from weedsim.errors import InvalidStart
from weedsim.geometry import convex_hull
from weedsim.pointproc import PointPattern
from weedsim.strategy import (
    RobotConfig,
    TractorConfig,
    action_threshold,
    plan_robot,
    plan_tractor,
    polyline_length,
    robot_route,
)


def _targets(locations):
    return PointPattern(locations=np.asarray(locations, dtype=float), role="targeted")


def _observed(locations):
    return PointPattern(locations=np.asarray(locations, dtype=float), role="observed")


def _seg_dist(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


class TestActionThreshold:
    def test_role_check(self):
        with pytest.raises(ValueError):
            action_threshold(_targets([[0.0, 0.0]]), 1.0)

    def test_infinite_keeps_all(self, rng):
        obs = _observed(rng.random((30, 2)))
        out = action_threshold(obs, math.inf)
        assert np.array_equal(out.locations, obs.locations)
        assert out.role == "targeted"

    def test_single_point_dropped(self):
        assert len(action_threshold(_observed([[1.0, 1.0]]), 2.0)) == 0

    def test_boundary_distance_kept(self):
        obs = _observed([[0.0, 0.0], [2.5, 0.0]])
        assert len(action_threshold(obs, 2.5)) == 2
        assert len(action_threshold(obs, 2.4999)) == 0

    def test_against_nn_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 150))
            pts = rng.random((n, 2)) * 30
            threshold = float(rng.random() * 3 + 0.1)
            out = action_threshold(_observed(pts), threshold)
            keep = []
            for i in range(n):
                d = np.sqrt(((pts - pts[i]) ** 2).sum(axis=1))
                d[i] = np.inf
                if d.min() <= threshold:
                    keep.append(i)
            assert np.array_equal(out.locations, pts[keep])


class TestRobot:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            RobotConfig(treatment_radius=0.0)

    def test_empty_targets(self, small_field):
        plan = plan_robot(_targets(np.empty((0, 2))), RobotConfig(0.2), small_field,
                          small_field.start_point())
        assert plan.driving_distance == 0.0
        assert plan.treated_region.area == 0.0
        assert plan.route.shape == (1, 2)

    def test_invalid_start(self, small_field):
        with pytest.raises(InvalidStart):
            plan_robot(_targets([[1.0, 1.0]]), RobotConfig(0.2), small_field,
                       np.array([-5.0, -5.0]))

    def test_route_closed_and_visits_all(self, small_field, rng):
        pts = rng.random((40, 2)) * (20, 10)
        x0 = small_field.start_point()
        plan = plan_robot(_targets(pts), RobotConfig(0.2), small_field, x0)
        assert np.allclose(plan.route[0], x0) and np.allclose(plan.route[-1], x0)
        route_rows = {tuple(r) for r in plan.route}
        assert all(tuple(p) in route_rows for p in pts)
        assert plan.driving_distance == pytest.approx(polyline_length(plan.route))

    def test_route_independent_of_radius(self, small_field, rng):
        pts = rng.random((25, 2)) * (20, 10)
        x0 = small_field.start_point()
        p1 = plan_robot(_targets(pts), RobotConfig(0.2), small_field, x0)
        p2 = plan_robot(_targets(pts), RobotConfig(1.25), small_field, x0)
        assert np.array_equal(p1.route, p2.route)
        assert p2.treated_region.area > p1.treated_region.area

    def test_targets_inside_region(self, small_field, rng):
        pts = rng.random((60, 2)) * (20, 10)
        plan = plan_robot(_targets(pts), RobotConfig(0.2), small_field,
                          small_field.start_point())
        j, i = small_field.cell_index(pts)
        assert plan.treated_region.mask[j, i].all()

    def test_single_target(self, small_field):
        x0 = small_field.start_point()
        plan = plan_robot(_targets([[10.0, 5.0]]), RobotConfig(0.4), small_field, x0)
        assert plan.driving_distance == pytest.approx(
            2 * np.linalg.norm(np.array([10.0, 5.0]) - x0)
        )

    def test_two_opt_not_worse_than_nn(self, small_field, rng):
        from weedsim import kernels

        for _ in range(20):
            pts = rng.random((30, 2)) * (20, 10)
            x0 = small_field.start_point()
            route = robot_route(pts, x0)
            xy = np.vstack([x0.reshape(1, 2), pts])
            nn = kernels.nn_tour(xy)
            nn_len = polyline_length(np.vstack([xy[nn], xy[nn[0]]]))
            assert polyline_length(route) <= nn_len + 1e-9


class TestTractor:
    def test_config_defaults(self):
        cfg = TractorConfig(sections=10)
        assert cfg.treatment_length == pytest.approx(0.25)
        with pytest.raises(ValueError):
            TractorConfig(sections=0)
        with pytest.raises(ValueError):
            TractorConfig(meander_width=0.0)

    def test_empty_targets(self, small_field):
        plan = plan_tractor(_targets(np.empty((0, 2))), TractorConfig(), small_field,
                            small_field.start_point())
        assert plan.driving_distance == 0.0 and plan.treated_region.area == 0.0

    def test_route_independent_of_sections(self, small_field, rng):
        pts = rng.random((30, 2)) * (18, 8) + 1
        x0 = small_field.start_point()
        p1 = plan_tractor(_targets(pts), TractorConfig(sections=1), small_field, x0)
        p5 = plan_tractor(_targets(pts), TractorConfig(sections=5), small_field, x0)
        assert np.array_equal(p1.route, p5.route)
        assert p1.driving_distance == p5.driving_distance
        assert p1.treated_region.area >= p5.treated_region.area

    def test_coverage_and_rectangles(self, small_field, rng):
        w = 2.5
        for trial in range(30):
            n = int(rng.integers(1, 60))
            ns = int(rng.choice([1, 5, 10]))
            pts = rng.random((n, 2)) * (18, 8) + 1
            cfg = TractorConfig(sections=ns)
            plan = plan_tractor(_targets(pts), cfg, small_field,
                                small_field.start_point())
            # every target within w/2 of its swath
            for k, p in enumerate(pts):
                a, b = plan.swaths[int(plan.swath_of_target[k])]
                assert _seg_dist(p, np.asarray(a), np.asarray(b)) <= w / 2 + 1e-9
            # every hull point within w/2 of some swath
            distinct = np.unique(pts, axis=0)
            if distinct.shape[0] >= 3:
                hull = convex_hull(distinct)
                if not hull.degenerate:
                    for p in hull.vertices:
                        d = min(
                            _seg_dist(p, np.asarray(a), np.asarray(b))
                            for a, b in plan.swaths
                        )
                        assert d <= w / 2 + 1e-9
            # rectangles: exact sides, one per target, containing it
            assert len(plan.rectangles) == n
            for rect, src in zip(plan.rectangles, plan.rect_sources):
                assert 2 * rect.half_lengths[0] == pytest.approx(cfg.treatment_length)
                assert 2 * rect.half_lengths[1] == pytest.approx(w / ns)
                p = pts[src[0]]
                d = p - rect.center
                v = np.array([-rect.axis[1], rect.axis[0]])
                assert abs(d @ rect.axis) <= rect.half_lengths[0] + 1e-9
                assert abs(d @ v) <= rect.half_lengths[1] + 1e-9

    def test_targets_inside_region(self, small_field, rng):
        pts = rng.random((40, 2)) * (18, 8) + 1
        plan = plan_tractor(_targets(pts), TractorConfig(sections=10), small_field,
                            small_field.start_point())
        j, i = small_field.cell_index(pts)
        assert plan.treated_region.mask[j, i].all()

    def test_single_target_degenerate(self, small_field):
        plan = plan_tractor(_targets([[10.0, 5.0]]), TractorConfig(), small_field,
                            small_field.start_point())
        assert len(plan.swaths) == 1
        assert plan.driving_distance > 0

    def test_collinear_targets_degenerate(self, small_field):
        pts = [[2.0, 2.0], [6.0, 4.0], [10.0, 6.0]]
        plan = plan_tractor(_targets(pts), TractorConfig(), small_field,
                            small_field.start_point())
        assert len(plan.swaths) == 1
        a, b = (np.asarray(s) for s in plan.swaths[0])
        for p in np.asarray(pts):
            assert _seg_dist(p, a, b) <= 1e-9

    def test_shorter_orientation_chosen(self, small_field, rng):
        # reversing the first direction can only give an equal or longer route
        pts = rng.random((20, 2)) * (18, 8) + 1
        x0 = small_field.start_point()
        plan = plan_tractor(_targets(pts), TractorConfig(), small_field, x0)
        swaths = [(np.asarray(a), np.asarray(b)) for a, b in plan.swaths]
        for first_reversed in (False, True):
            waypoints = [x0]
            flip = first_reversed
            for a, b in swaths:
                waypoints.extend([b, a] if flip else [a, b])
                flip = not flip
            waypoints.append(x0)
            alt = polyline_length(np.asarray(waypoints))
            assert plan.driving_distance <= alt + 1e-9
