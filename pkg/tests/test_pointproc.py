import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from weedsim import pointproc
from weedsim.errors import LambdaMaxViolation, NotNormalized, ZeroIntensity
from weedsim.pointproc import (
    PointPattern,
    eval_intensity,
    make_model,
    normalize,
    sample_poisson,
    select_bandwidth,
)


class TestPointPattern:
    def test_role_validation(self):
        with pytest.raises(ValueError):
            PointPattern(locations=np.zeros((1, 2)), role="weeds")

    def test_with_role_copies(self):
        p = PointPattern(locations=np.zeros((2, 2)), role="ground_truth")
        q = p.with_role("observed")
        assert q.role == "observed"
        q.locations[0, 0] = 5.0
        assert p.locations[0, 0] == 0.0

    def test_len(self):
        assert len(PointPattern(locations=np.zeros((3, 2)), role="observed")) == 3


def _integral(model, field):
    lam = eval_intensity(model, field.cell_centers_inside())
    return float(lam.sum()) * field.grid_step**2


class TestNormalize:
    @pytest.mark.parametrize("factor", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("kind", ["hom", "cen", "sin"])
    def test_integral_invariant(self, small_field, kind, factor):
        model = make_model(kind, small_field, intensity_factor=factor, reference_count=300)
        model = normalize(model, small_field)
        assert _integral(model, small_field) == pytest.approx(factor * 300, rel=0.005)

    def test_cal_integral_invariant(self, small_field, rng):
        anchors = rng.random((60, 2)) * (20, 10)
        model = make_model(
            "cal", small_field, reference_count=300, anchors=anchors, bandwidth=1.2
        )
        model = normalize(model, small_field)
        assert _integral(model, small_field) == pytest.approx(300, rel=0.005)

    def test_eval_before_normalize_raises(self, small_field):
        model = make_model("hom", small_field)
        with pytest.raises(NotNormalized):
            eval_intensity(model, np.array([[1.0, 1.0]]))

    def test_zero_intensity_raises(self, small_field):
        # anchors far outside the field with a small truncated kernel
        model = make_model(
            "cal",
            small_field,
            reference_count=300,
            anchors=np.array([[500.0, 500.0]] * 12),
            bandwidth=0.5,
        )
        with pytest.raises(ZeroIntensity):
            normalize(model, small_field)


class TestBaseIntensities:
    def test_hom_constant(self, small_field):
        model = normalize(make_model("hom", small_field, reference_count=200), small_field)
        lam = eval_intensity(model, np.array([[1.0, 1.0], [19.0, 9.0]]))
        assert lam[0] == pytest.approx(lam[1])
        assert lam[0] == pytest.approx(200 / 200.0, rel=0.005)  # n_ref / area

    def test_sin_positive_and_matches_formula(self, small_field):
        model = make_model("sin", small_field, wavelength=7.0)
        pts = np.array([[0.0, 0.0], [1.75, 0.0], [3.5, 2.0], [5.25, 9.0]])
        base = pointproc.base_intensity(model, pts)
        want = np.sin(2 * math.pi * pts[:, 0] / 7.0) + 2.0
        assert np.allclose(base, want)
        assert base.min() >= 1.0

    def test_sin_wave_normal_follows_long_side(self):
        from weedsim.geometry import Field

        tall = Field(np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 30.0], [0.0, 30.0]]))
        model = make_model("sin", tall)
        assert np.allclose(model.params["wave_normal"], [0.0, 1.0])

    def test_cen_matches_scipy_pdf(self, small_field):
        sigma = np.array([[4.0, 1.0], [1.0, 2.0]])
        model = make_model("cen", small_field, sigma=sigma)
        pts = np.array([[10.0, 5.0], [12.0, 6.0], [0.0, 0.0]])
        base = pointproc.base_intensity(model, pts)
        mu = small_field.boundary.mean(axis=0)
        want = multivariate_normal(mean=mu, cov=sigma).pdf(pts)
        assert np.allclose(base, want, rtol=1e-12)

    def test_cen_requires_spd_sigma(self, small_field):
        with pytest.raises(ValueError):
            make_model("cen", small_field, sigma=np.array([[1.0, 5.0], [5.0, 1.0]]))

    def test_cal_matches_naive_sum(self, small_field, rng):
        anchors = rng.random((25, 2)) * (20, 10)
        h = 0.8
        model = make_model("cal", small_field, anchors=anchors, bandwidth=h)
        pts = rng.random((40, 2)) * (20, 10)
        base = pointproc.base_intensity(model, pts)
        d2 = ((pts[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
        full = np.exp(-d2 / (2 * h * h))
        cutoff = pointproc.CAL_CUTOFF_BANDWIDTHS * h
        want = np.where(d2 <= cutoff**2, full, 0.0).sum(axis=1)
        assert np.allclose(base, want, rtol=1e-12)
        # the truncated tail is bounded by n * exp(-cutoff^2 / (2 h^2))
        tail = anchors.shape[0] * math.exp(-(cutoff**2) / (2 * h * h))
        assert np.all(np.abs(base - full.sum(axis=1)) <= tail + 1e-15)


class TestSampling:
    def test_deterministic(self, small_field):
        model = normalize(make_model("hom", small_field, reference_count=150), small_field)
        a = sample_poisson(model, small_field, 42)
        b = sample_poisson(model, small_field, 42)
        c = sample_poisson(model, small_field, 43)
        assert np.array_equal(a.locations, b.locations)
        assert not np.array_equal(a.locations, c.locations)
        assert a.role == "ground_truth"

    def test_points_inside_field(self, small_field):
        model = normalize(make_model("cen", small_field, reference_count=300), small_field)
        p = sample_poisson(model, small_field, 7)
        assert np.all(p.locations[:, 0] >= 0) and np.all(p.locations[:, 0] <= 20)
        assert np.all(p.locations[:, 1] >= 0) and np.all(p.locations[:, 1] <= 10)

    def test_count_statistics(self, small_field):
        model = normalize(make_model("hom", small_field, reference_count=200), small_field)
        counts = [len(sample_poisson(model, small_field, s)) for s in range(100)]
        se = math.sqrt(200 / 100)
        assert abs(np.mean(counts) - 200) < 4 * se

    def test_unnormalized_raises(self, small_field):
        model = make_model("hom", small_field)
        with pytest.raises(NotNormalized):
            sample_poisson(model, small_field, 1)

    def test_lambda_max_violation(self, small_field):
        model = normalize(make_model("cen", small_field, reference_count=200), small_field)
        tampered = replace(model, grid_max_base=model.grid_max_base / 10.0)
        with pytest.raises(LambdaMaxViolation):
            sample_poisson(tampered, small_field, 3)

    def test_intensity_factor_scales_counts(self, small_field):
        base = make_model("hom", small_field, reference_count=400)
        lo = normalize(replace(base, intensity_factor=0.5), small_field)
        hi = normalize(replace(base, intensity_factor=2.0), small_field)
        n_lo = np.mean([len(sample_poisson(lo, small_field, s)) for s in range(30)])
        n_hi = np.mean([len(sample_poisson(hi, small_field, s)) for s in range(30)])
        assert n_hi > 3 * n_lo


class TestBandwidth:
    def test_selection_deterministic_and_positive(self, small_field, rng):
        anchors = rng.random((80, 2)) * (20, 10)
        h1 = select_bandwidth(anchors, small_field, seed=5)
        h2 = select_bandwidth(anchors, small_field, seed=5)
        assert h1 == h2 > 0

    def test_selection_maximizes_loo_likelihood(self, small_field, rng):
        anchors = rng.random((60, 2)) * (20, 10)
        h = select_bandwidth(anchors, small_field, seed=9)
        # re-draw the same candidate set and re-score independently
        cand_rng = np.random.default_rng(np.uint64(9))
        shape = (1.5 / 1.1) ** 2
        scale = 1.1**2 / 1.5
        candidates = cand_rng.gamma(shape, scale, size=50)
        scores = [pointproc.loo_log_likelihood(anchors, c) for c in candidates]
        assert pointproc.loo_log_likelihood(anchors, h) == pytest.approx(max(scores))

    def test_needs_enough_anchors(self, small_field):
        with pytest.raises(ValueError):
            select_bandwidth(np.zeros((5, 2)), small_field, seed=1)
