import logging

import numpy as np
import pytest

from ehvikit.core import decomposition
from ehvikit.core.decomposition import (
    BoxPartition,
    Hyperbox,
    decomposition_stats,
    local_lower_bounds,
    partition,
    partition_2d,
    partition_3d,
    partition_dd,
    split_orthant_union,
)
from ehvikit.core.errors import DimensionMismatchError
from ehvikit.core.pareto import ParetoApprox
from ehvikit.models.schemas import FrontSpec
from ehvikit.services.benchmarks import random_front
from tests.fixtures.sample_fronts import STAIRCASE_2D, SWEEP_3D

INF = np.inf


def _front(points) -> ParetoApprox:
    return ParetoApprox(np.array(points, dtype=float))


def _non_dominated(samples: np.ndarray, front: ParetoApprox, ref) -> np.ndarray:
    above = np.all(samples > np.asarray(ref), axis=1)
    dominated = np.zeros(len(samples), dtype=bool)
    for p in front.points:
        dominated |= np.all(samples <= p, axis=1)
    return above & ~dominated


def _general_position_front(rng, n: int, d: int) -> ParetoApprox:
    shell = np.abs(rng.standard_normal((n, d)))
    return _front(shell / np.linalg.norm(shell, axis=1, keepdims=True))


class TestPartition2D:
    def test_slices_of_staircase(self):
        part = partition_2d(_front(STAIRCASE_2D), (0, 0))
        assert part.lower.tolist() == [[0, 2.5], [1, 1.5], [2, 1], [3, 0]]
        assert part.upper.tolist() == [[1, INF], [2, INF], [3, INF], [INF, INF]]

    def test_unsorted_input(self):
        part = partition_2d(_front(STAIRCASE_2D[::-1]), (0, 0))
        assert part.lower.tolist() == [[0, 2.5], [1, 1.5], [2, 1], [3, 0]]

    def test_single_point(self):
        assert len(partition_2d(_front([(2.0, 3.0)]), (0, 0))) == 2

    def test_empty_front(self):
        part = partition_2d(ParetoApprox.empty(2), (0, 0))
        assert part.lower.tolist() == [[0, 0]]
        assert part.upper.tolist() == [[INF, INF]]

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            partition_2d(_front(SWEEP_3D), (0, 0, 0))

    def test_count_is_n_plus_one(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            front = _general_position_front(rng, n, 2)
            assert len(partition_2d(front, (0, 0))) == front.n + 1


class TestPartition3D:
    def test_known_slice(self):
        part = partition_3d(_front(SWEEP_3D), (0, 0, 0))
        boxes = [(b.lower, b.upper) for b in part.boxes]
        assert ((1.0, 2.0, 2.0), (2.0, 4.0, INF)) in boxes
        assert len(part) == 9

    def test_single_point(self):
        part = partition_3d(_front([(1.0, 2.0, 3.0)]), (0, 0, 0))
        assert len(part) == 3
        assert np.all(np.isinf(part.upper[:, 2]))

    def test_count_is_two_n_plus_one(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            front = _general_position_front(rng, n, 3)
            assert len(partition_3d(front, (0, 0, 0))) == 2 * front.n + 1

    def test_ties_stay_within_bound(self):
        front = _front([(1, 3, 2), (2, 2, 2), (3, 1, 2), (1, 1, 3)])
        part = partition_3d(front, (0, 0, 0))
        assert len(part) <= 2 * front.n + 1
        samples = np.random.default_rng(3).uniform(0, 4, (20_000, 3))
        assert np.array_equal(
            part.membership_counts(samples), _non_dominated(samples, front, (0, 0, 0))
        )


class TestLocalLowerBounds:
    def test_staircase(self):
        bounds = local_lower_bounds(_front(STAIRCASE_2D), (0, 0))
        assert sorted(map(tuple, bounds.points.tolist())) == [
            (0, 2.5),
            (1, 1.5),
            (2, 1),
            (3, 0),
        ]

    def test_single_point(self):
        bounds = local_lower_bounds(_front([(4.0, 2.0)]), (0, 0))
        assert sorted(map(tuple, bounds.points.tolist())) == [(0, 2), (4, 0)]

    def test_two_d_count(self):
        front = _general_position_front(np.random.default_rng(5), 25, 2)
        assert len(local_lower_bounds(front, (0, 0))) == 26

    def test_mutually_non_dominated_in_minimization_order(self):
        front = random_front(FrontSpec(d=4, n=20, seed=2))
        pts = local_lower_bounds(front, np.zeros(4)).points
        le = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
        np.fill_diagonal(le, False)
        assert not le.any()


class TestPartitionValidity:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("n", [1, 10, 50])
    def test_disjoint_and_covering(self, d, n):
        rng = np.random.default_rng(100 * d + n)
        ref = np.zeros(d)
        for seed in range(2):
            front = random_front(FrontSpec(d=d, n=n, seed=seed))
            samples = rng.uniform(0.0, 1.2, (10_000, d))
            expected = _non_dominated(samples, front, ref).astype(int)
            for method in ("auto", "dd"):
                counts = partition(front, ref, method).membership_counts(samples)
                assert np.array_equal(counts, expected)

    def test_single_4d_point_volume(self):
        part = partition_dd(_front([(1.0, 1.0, 1.0, 1.0)]), np.zeros(4))
        ceiling = np.full(4, 3.0)
        assert part.clipped_volume(ceiling) == pytest.approx(3.0**4 - 1.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_dd_matches_dedicated_volume(self, d):
        ref = np.zeros(d)
        ceiling = np.full(d, 5.0)
        for seed in range(20):
            front = random_front(FrontSpec(d=d, n=15, seed=seed))
            dedicated = partition(front, ref).clipped_volume(ceiling)
            generic = partition_dd(front, ref).clipped_volume(ceiling)
            assert generic == pytest.approx(dedicated, rel=1e-9)

    def test_empty_front_is_one_orthant(self):
        part = partition_dd(ParetoApprox.empty(4), np.zeros(4))
        assert len(part) == 1
        assert part.upper.tolist() == [[INF] * 4]

    def test_minus_infinity_reference(self):
        front = _front(STAIRCASE_2D)
        part = partition(front, (-INF, -INF))
        assert part.lower[0].tolist() == [-INF, 2.5]
        assert part.lower[-1].tolist() == [3.0, -INF]


class TestSplitOrthantUnion:
    def test_union_of_two_corners(self):
        lower, upper = split_orthant_union(
            np.array([[1.0, 0.0], [0.0, 1.0]]), np.zeros(2), np.full(2, 2.0)
        )
        widths = np.prod(upper - lower, axis=1)
        assert widths.sum() == pytest.approx(4.0 - 1.0)

    def test_no_corner_inside(self):
        lower, upper = split_orthant_union(
            np.array([[5.0, 5.0]]), np.zeros(2), np.full(2, 2.0)
        )
        assert lower.shape == (0, 2)


class TestBoxes:
    def test_hyperbox_rejects_empty(self):
        with pytest.raises(ValueError):
            Hyperbox((0.0, 1.0), (1.0, 1.0))

    def test_partition_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            BoxPartition(np.zeros((2, 2)), np.ones((3, 2)), 1)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            partition(_front(STAIRCASE_2D), (0, 0), method="4d")

    def test_stats_are_logged(self, caplog):
        front = random_front(FrontSpec(d=4, n=10, seed=0))
        with caplog.at_level(logging.INFO):
            stats = decomposition_stats(front, np.zeros(4))
        assert stats.n == 10
        assert stats.boxes == len(partition_dd(front, np.zeros(4)))
        assert "local lower bounds" in caplog.text

    def test_stats_reuse_given_partition(self, monkeypatch):
        front = random_front(FrontSpec(d=3, n=12, seed=2))
        boxes = partition(front, np.zeros(3))

        def fail(*args, **kwargs):
            raise AssertionError("partition rebuilt")

        monkeypatch.setattr(decomposition, "partition", fail)
        stats = decomposition_stats(front, np.zeros(3), boxes=boxes)
        assert stats.boxes == len(boxes)
        assert stats.lower_bounds == len(local_lower_bounds(front, np.zeros(3)))
