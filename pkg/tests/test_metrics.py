import math

import numpy as np
import pytest

from weedsim.geometry import RasterRegion, rasterize_disks
from weedsim.metrics import compute_metrics, max_remaining_density, treated_weeds
from weedsim.pointproc import PointPattern
from weedsim.strategy import RobotConfig, TractorConfig, plan_robot, plan_tractor


def _gt(locations):
    return PointPattern(locations=np.asarray(locations, dtype=float), role="ground_truth")


def _tg(locations):
    return PointPattern(locations=np.asarray(locations, dtype=float), role="targeted")


def _empty_plan(field):
    from weedsim.strategy import TreatmentPlan

    return TreatmentPlan(
        route=np.asarray([field.start_point()]),
        driving_distance=0.0,
        treated_region=RasterRegion.empty(field),
        targeted=_tg(np.empty((0, 2))),
    )


class TestExamples:
    def test_no_treatment_single_weed(self, tiny_field):
        rec = compute_metrics(_gt([[2.0, 2.0]]), _empty_plan(tiny_field), tiny_field)
        assert rec.remaining_fraction == 1.0
        assert rec.max_remaining_density == pytest.approx(1 / (4 * math.pi))
        assert rec.treated_area_fraction == 0.0
        assert rec.area_per_treated_weed is None
        assert rec.n_treated == 0

    def test_all_treated(self, tiny_field):
        pts = [[1.0, 1.0], [3.0, 2.0]]
        plan = plan_robot(_tg(pts), RobotConfig(0.2), tiny_field, tiny_field.start_point())
        rec = compute_metrics(_gt(pts), plan, tiny_field)
        assert rec.remaining_fraction == 0.0
        assert rec.max_remaining_density == 0.0
        assert rec.n_treated == 2
        assert rec.area_per_treated_weed == pytest.approx(plan.treated_region.area / 2)

    def test_collateral_damage(self, tiny_field):
        target = [[2.0, 2.0]]
        gt = _gt([[2.0, 2.0], [2.1, 2.0]])  # second weed untargeted but in the disk
        plan = plan_robot(_tg(target), RobotConfig(0.2), tiny_field, tiny_field.start_point())
        treated = treated_weeds(gt, plan)
        assert len(treated) == 2

    def test_far_weed_untreated(self, tiny_field):
        gt = _gt([[2.0, 2.0], [4.0, 2.0]])  # 2 m apart, radius 1.25
        plan = plan_robot(_tg([[2.0, 2.0]]), RobotConfig(1.25), tiny_field,
                          tiny_field.start_point())
        treated = treated_weeds(gt, plan)
        assert len(treated) == 1
        rec = compute_metrics(gt, plan, tiny_field)
        assert rec.remaining_fraction == 0.5

    def test_empty_ground_truth_flags(self, tiny_field):
        rec = compute_metrics(_gt(np.empty((0, 2))), _empty_plan(tiny_field), tiny_field)
        assert rec.remaining_fraction is None
        assert rec.max_remaining_density is None
        assert rec.area_per_treated_weed is None

    def test_counts_chain(self, tiny_field, rng):
        pts = rng.random((30, 2)) * (5, 4)
        targets = pts[:12]
        plan = plan_tractor(_tg(targets), TractorConfig(sections=10), tiny_field,
                            tiny_field.start_point())
        rec = compute_metrics(_gt(pts), plan, tiny_field, n_observed=20)
        assert rec.n_ground >= rec.n_treated >= rec.n_targeted
        assert rec.n_ground >= rec.n_observed


class TestDensity:
    def test_brute_force_oracle(self, tiny_field, rng):
        for _ in range(10):
            n = int(rng.integers(1, 40))
            pts = rng.random((n, 2)) * (5, 4)
            got = max_remaining_density(pts, tiny_field)
            centers = tiny_field.cell_centers_inside()
            best = 0
            for c in centers:
                best = max(best, int((((pts - c) ** 2).sum(axis=1) <= 4.0 + 1e-12).sum()))
            assert got == pytest.approx(best / (4 * math.pi))

    def test_monotone_in_treatment(self, tiny_field, rng):
        pts = rng.random((50, 2)) * (5, 4)
        gt = _gt(pts)
        base = compute_metrics(gt, _empty_plan(tiny_field), tiny_field)
        plan = plan_robot(_tg(pts[:20]), RobotConfig(0.4), tiny_field,
                          tiny_field.start_point())
        rec = compute_metrics(gt, plan, tiny_field)
        assert rec.max_remaining_density <= base.max_remaining_density
        assert rec.remaining_fraction <= base.remaining_fraction

    def test_f_r_antitone_in_region(self, tiny_field, rng):
        pts = rng.random((40, 2)) * (5, 4)
        gt = _gt(pts)
        small = plan_robot(_tg(pts[:10]), RobotConfig(0.2), tiny_field,
                           tiny_field.start_point())
        large = plan_robot(_tg(pts[:10]), RobotConfig(0.8), tiny_field,
                           tiny_field.start_point())
        assert np.all(large.treated_region.mask >= small.treated_region.mask)
        rec_s = compute_metrics(gt, small, tiny_field)
        rec_l = compute_metrics(gt, large, tiny_field)
        assert rec_l.remaining_fraction <= rec_s.remaining_fraction

    def test_a_t_relative_to_field_area(self, tiny_field):
        region = rasterize_disks(tiny_field, np.array([[2.5, 2.0]]), 0.5)
        from weedsim.strategy import TreatmentPlan

        plan = TreatmentPlan(
            route=np.asarray([tiny_field.start_point()]),
            driving_distance=0.0,
            treated_region=region,
            targeted=_tg([[2.5, 2.0]]),
        )
        rec = compute_metrics(_gt([[2.5, 2.0]]), plan, tiny_field)
        assert rec.treated_area_fraction == pytest.approx(region.area / 20.0)
