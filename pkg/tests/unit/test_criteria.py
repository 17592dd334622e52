import logging

import numpy as np
import pytest

from ehvikit.core.criteria import (
    CriterionEvaluator,
    GaussPred,
    ehvi,
    ehvi_2d,
    ehvi_3d,
    ehvi_boxes,
    ehvi_dd,
    improvement,
    poi,
)
from ehvikit.core.decomposition import BoxPartition, partition_dd
from ehvikit.core.errors import DimensionMismatchError, ReferencePointError
from ehvikit.core.hypervolume import hvi
from ehvikit.core.montecarlo import mc_ehvi, mc_poi
from ehvikit.core.pareto import ParetoApprox
from ehvikit.models.enums import CriterionEnum
from ehvikit.models.schemas import FrontSpec
from ehvikit.services.benchmarks import random_front
from tests.fixtures.sample_fronts import (
    STAIRCASE_PRED_MU,
    STAIRCASE_PRED_SIGMA,
    STAIRCASE_2D,
    STAIRCASE_2D_CANDIDATE,
    STAIRCASE_2D_HVI,
    SWEEP_3D,
    VOXEL_3D,
    VOXEL_3D_CANDIDATE,
)


def _front(points) -> ParetoApprox:
    return ParetoApprox(np.array(points, dtype=float))


def _random_instance(rng, d: int, n: int, seed: int):
    front = random_front(FrontSpec(d=d, n=n, seed=seed))
    mu = rng.uniform(0.2, 1.2, d)
    sigma = rng.uniform(0.05, 0.5, d)
    return front, GaussPred(mu, sigma)


def _split_boxes(part: BoxPartition, rng) -> BoxPartition:
    """Cuts every box in two along a random coordinate, keeping the union."""
    lower, upper = [], []
    for lo, hi in zip(part.lower, part.upper):
        k = int(rng.integers(len(lo)))
        top = hi[k] if np.isfinite(hi[k]) else lo[k] + 2.0
        cut = lo[k] + rng.uniform(0.2, 0.8) * (top - lo[k])
        first_hi, second_lo = hi.copy(), lo.copy()
        first_hi[k] = cut
        second_lo[k] = cut
        lower += [lo, second_lo]
        upper += [first_hi, hi]
    return BoxPartition(np.array(lower), np.array(upper), part.source_front_size)


class TestGaussPred:
    def test_rejects_negative_sigma(self):
        with pytest.raises(ValueError):
            GaussPred(np.zeros(2), np.array([1.0, -1.0]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            GaussPred(np.zeros(2), np.ones(3))

    def test_zero_sigma_is_degenerate(self):
        assert GaussPred(np.zeros(2), np.array([0.0, 1.0])).degenerate


class TestEhvi:
    def test_staircase_instance_against_monte_carlo(self):
        front = _front(STAIRCASE_2D)
        pred = GaussPred(np.array(STAIRCASE_PRED_MU), np.array(STAIRCASE_PRED_SIGMA))
        exact = ehvi_2d(pred, front, (0, 0))
        estimate = mc_ehvi(pred, front, (0, 0), samples=400_000, seed=3)
        assert abs(exact - estimate.value) <= 4 * estimate.std_error

    def test_sweep_instance_against_monte_carlo(self):
        front = _front(SWEEP_3D)
        pred = GaussPred(np.full(3, 3.0), np.ones(3))
        exact = ehvi_3d(pred, front, (0, 0, 0))
        estimate = mc_ehvi(pred, front, (0, 0, 0), samples=400_000, seed=5)
        assert abs(exact - estimate.value) <= 4 * estimate.std_error

    def test_zero_sigma_gives_hvi(self):
        pred = GaussPred(np.array(STAIRCASE_2D_CANDIDATE), np.zeros(2))
        value = ehvi(pred, _front(STAIRCASE_2D), (0, 0))
        assert value == pytest.approx(STAIRCASE_2D_HVI, abs=1e-12)

    def test_zero_sigma_three_d(self):
        front = _front(VOXEL_3D)
        pred = GaussPred(np.array(VOXEL_3D_CANDIDATE), np.zeros(3))
        expected = hvi(VOXEL_3D_CANDIDATE, front, (0, 0, 0))
        assert ehvi_3d(pred, front, (0, 0, 0)) == pytest.approx(expected, abs=1e-12)

    def test_deep_in_dominated_region(self):
        pred = GaussPred(np.array([0.5, 0.5]), np.array([1e-3, 1e-3]))
        assert ehvi_2d(pred, _front(STAIRCASE_2D), (0, 0)) <= 1e-12

    def test_mean_at_reference_with_tiny_sigma(self):
        pred = GaussPred(np.zeros(3), np.full(3, 1e-8))
        assert ehvi_3d(pred, _front(SWEEP_3D), (0, 0, 0)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_small_sigma_limit(self, d):
        rng = np.random.default_rng(d)
        ref = np.zeros(d)
        for seed in range(100):
            front = random_front(FrontSpec(d=d, n=8, seed=seed))
            mu = rng.uniform(0.1, 1.2, d)
            value = ehvi(GaussPred(mu, np.full(d, 1e-6)), front, ref)
            assert value == pytest.approx(hvi(mu, front, ref), abs=1e-4)

    @pytest.mark.parametrize("d", [2, 3])
    def test_generic_path_matches_dedicated(self, d):
        rng = np.random.default_rng(20 + d)
        ref = np.zeros(d)
        for seed in range(100):
            front, pred = _random_instance(rng, d, int(rng.integers(1, 20)), seed)
            dedicated = ehvi(pred, front, ref)
            generic = ehvi_dd(pred, front, ref)
            assert generic == pytest.approx(dedicated, rel=1e-9, abs=1e-15)

    @pytest.mark.parametrize(
        "n", [1, 10, pytest.param(50, marks=pytest.mark.slow)]
    )
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_against_monte_carlo(self, d, n):
        rng = np.random.default_rng(40 + d + n)
        ref = np.zeros(d)
        for seed in range(3):
            front, pred = _random_instance(rng, d, n, seed)
            exact = ehvi(pred, front, ref)
            estimate = mc_ehvi(pred, front, ref, samples=200_000, seed=seed)
            assert abs(exact - estimate.value) <= 4 * estimate.std_error + 1e-12

    def test_monotone_in_mean(self):
        rng = np.random.default_rng(8)
        for seed in range(20):
            front, pred = _random_instance(rng, 3, 10, seed)
            j = int(rng.integers(3))
            raised = pred.mu.copy()
            raised[j] += rng.uniform(0.01, 0.5)
            before = ehvi(pred, front, np.zeros(3))
            after = ehvi(GaussPred(raised, pred.sigma), front, np.zeros(3))
            assert after >= before - 1e-12

    def test_partition_independence(self):
        rng = np.random.default_rng(12)
        for seed in range(10):
            front, pred = _random_instance(rng, 4, 8, seed)
            part = partition_dd(front, np.zeros(4))
            split = _split_boxes(part, rng)
            original = ehvi_boxes(pred.mu, pred.sigma, part)[0]
            assert ehvi_boxes(pred.mu, pred.sigma, split)[0] == pytest.approx(
                original, rel=1e-9
            )

    def test_improvement_matches_hvi(self):
        front = _front(VOXEL_3D)
        part = partition_dd(front, np.zeros(3))
        values = improvement(np.array([VOXEL_3D_CANDIDATE, (0.5, 0.5, 0.5)]), part)
        assert values[0] == pytest.approx(hvi(VOXEL_3D_CANDIDATE, front, np.zeros(3)))
        assert values[1] == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ehvi(GaussPred(np.ones(3), np.ones(3)), _front(STAIRCASE_2D), (0, 0))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            ehvi(GaussPred(np.ones(2), np.ones(2)), _front(STAIRCASE_2D), (0, 0), "5d")

    @pytest.mark.parametrize("method", ["2d", "dd"])
    def test_minus_infinity_reference_rejected(self, method):
        pred = GaussPred(np.array(STAIRCASE_PRED_MU), np.array(STAIRCASE_PRED_SIGMA))
        with pytest.raises(ReferencePointError, match="must be finite"):
            ehvi(pred, _front(STAIRCASE_2D), (-np.inf, -np.inf), method)

    def test_minus_infinity_reference_rejected_in_3d(self):
        pred = GaussPred(np.full(3, 0.5), np.full(3, 0.3))
        with pytest.raises(ReferencePointError):
            ehvi_3d(pred, _front(SWEEP_3D), (0.0, -np.inf, 0.0))
        with pytest.raises(ReferencePointError):
            CriterionEvaluator(_front(SWEEP_3D), (-np.inf,) * 3, CriterionEnum.EHVI)
        assert 0.0 < poi(pred, _front(SWEEP_3D)) < 1.0


class TestPoi:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_single_point_symmetric(self, d):
        y = np.arange(1.0, d + 1.0)
        value = poi(GaussPred(y, np.full(d, 0.7)), _front([y]))
        assert value == pytest.approx(1.0 - 0.5**d, abs=1e-12)

    def test_two_d_quadrant(self):
        assert poi(GaussPred(np.ones(2), np.ones(2)), _front([(1.0, 1.0)])) == pytest.approx(
            0.75, abs=1e-15
        )

    def test_far_above_front(self):
        pred = GaussPred(np.full(2, 100.0), np.full(2, 1e-3))
        assert poi(pred, _front(STAIRCASE_2D)) == pytest.approx(1.0)

    def test_dominated_mean(self):
        pred = GaussPred(np.array([0.5, 0.5]), np.full(2, 1e-3))
        assert poi(pred, _front(STAIRCASE_2D)) == pytest.approx(0.0, abs=1e-12)

    def test_zero_sigma_indicator(self):
        front = _front(STAIRCASE_2D)
        assert poi(GaussPred(np.array([0.5, 0.5]), np.zeros(2)), front) == 0.0
        assert poi(GaussPred(np.array([3.5, 0.5]), np.zeros(2)), front) == 1.0

    @pytest.mark.parametrize(
        "n", [1, 10, pytest.param(50, marks=pytest.mark.slow)]
    )
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_against_monte_carlo(self, d, n):
        rng = np.random.default_rng(60 + d + n)
        for seed in range(3):
            front, pred = _random_instance(rng, d, n, seed)
            exact = poi(pred, front)
            assert 0.0 <= exact <= 1.0
            estimate = mc_poi(pred, front, samples=200_000, seed=seed)
            assert abs(exact - estimate.value) <= 4 * estimate.std_error + 1e-12


class TestCriterionEvaluator:
    def test_batch_matches_single_calls(self):
        front = random_front(FrontSpec(d=3, n=12, seed=1))
        rng = np.random.default_rng(1)
        mu = rng.uniform(0.2, 1.2, (30, 3))
        sigma = rng.uniform(0.05, 0.5, (30, 3))
        sigma[0] = 0.0
        values = CriterionEvaluator(front, np.zeros(3), CriterionEnum.EHVI)(mu, sigma)
        for k in range(30):
            expected = ehvi(GaussPred(mu[k], sigma[k]), front, np.zeros(3))
            assert values[k] == pytest.approx(expected, rel=1e-9, abs=1e-15)

    def test_poi_ignores_reference(self):
        front = random_front(FrontSpec(d=2, n=5, seed=3))
        mu = np.array([[0.5, 0.9], [1.0, 1.0]])
        sigma = np.full((2, 2), 0.2)
        a = CriterionEvaluator(front, None, "poi")(mu, sigma)
        b = CriterionEvaluator(front, np.full(2, 0.5), "poi")(mu, sigma)
        assert np.array_equal(a, b)
        assert a[0] == pytest.approx(poi(GaussPred(mu[0], sigma[0]), front))

    def test_members_outside_reference_are_ignored(self, caplog):
        front = _front([(1.0, 3.0), (3.0, -1.0)])
        with caplog.at_level(logging.WARNING):
            evaluator = CriterionEvaluator(front, (0.0, 0.0), "ehvi")
        assert "ignored" in caplog.text
        value = evaluator(np.array([2.0, 2.0]), np.zeros(2))[0]
        assert value == pytest.approx(2.0 * 2.0 - 1.0 * 2.0)

    def test_ehvi_needs_reference(self):
        with pytest.raises(ValueError):
            CriterionEvaluator(_front(STAIRCASE_2D), None, CriterionEnum.EHVI)
