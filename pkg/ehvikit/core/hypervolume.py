import logging
import math
from typing import Sequence

import numpy as np

from ehvikit.core.decomposition import partition_2d, partition_3d, split_orthant_union
from ehvikit.core.errors import DimensionMismatchError
from ehvikit.core.pareto import ParetoApprox, check_reference, as_objvec, nd_filter

logger = logging.getLogger(__name__)

HVI_CHUNK_ELEMENTS = 4_000_000


def dominated_boxes(
    front: ParetoApprox, r: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    """
    Disjoint boxes whose union is the region dominated by ``front`` above ``r``.

    Works on the negated front: the dominated region becomes a union of
    orthants [-y, ∞) clipped at -r.
    """
    ref = check_reference(r, front)
    if front.n == 0:
        return np.empty((0, front.dim)), np.empty((0, front.dim))
    neg_lo, neg_hi = split_orthant_union(
        -front.points, np.full(front.dim, -np.inf), -ref
    )
    return -neg_hi, -neg_lo


def _hv_2d(points: np.ndarray, ref: np.ndarray) -> float:
    # Descending y_1 gives ascending y_2; each point adds one staircase step.
    pts = points[np.argsort(-points[:, 0], kind="stable")]
    next_y1 = np.append(pts[1:, 0], ref[0])
    return math.fsum((pts[:, 0] - next_y1) * (pts[:, 1] - ref[1]))


def _hv_3d(front: ParetoApprox, ref: np.ndarray) -> float:
    # Slices opened at a point's own level are dominated by it down to r_3;
    # the slices opened by the closing sentinel sit at level r_3 and add nothing.
    slices = partition_3d(front, ref)
    finite = np.isfinite(slices.upper[:, 0]) & np.isfinite(slices.upper[:, 1])
    lo, hi = slices.lower[finite], slices.upper[finite]
    return math.fsum(
        (hi[:, 0] - lo[:, 0]) * (hi[:, 1] - lo[:, 1]) * (lo[:, 2] - ref[2])
    )


def hypervolume(front: ParetoApprox, r: Sequence[float]) -> float:
    """
    Computes the Lebesgue measure of the region dominated by ``front`` above ``r``.

    Args:
        front: Mutually non-dominated points, each strictly above ``r``.
        r: The reference point.

    Returns:
        The hypervolume; 0 for an empty front.
    """
    ref = check_reference(r, front)
    if front.n == 0:
        return 0.0
    if front.dim == 2:
        return _hv_2d(front.points, ref)
    if front.dim == 3:
        return _hv_3d(front, ref)
    lower, upper = dominated_boxes(front, ref)
    return math.fsum(np.prod(upper - lower, axis=1))


def hvi(y: Sequence[float], front: ParetoApprox, r: Sequence[float]) -> float:
    """Hypervolume gained by adding ``y`` to ``front``; 0 when ``y`` is dominated."""
    y = as_objvec(y)
    if y.shape[0] != front.dim:
        raise DimensionMismatchError(
            f"Point has {y.shape[0]} coordinates, front has {front.dim}"
        )
    if front.n and np.any(np.all(front.points >= y, axis=1)):
        return 0.0
    ref = check_reference(r, front)
    extended = nd_filter(np.vstack((front.points, y)))
    gain = hypervolume(extended, ref) - hypervolume(front, ref)
    return max(gain, 0.0)


def hvi_many(ys: np.ndarray, front: ParetoApprox, r: Sequence[float]) -> np.ndarray:
    """
    Vectorized HVI for a matrix of candidate points.

    HVI(y) = vol([r, y]) − vol([r, y] ∩ dominated region); candidates not
    strictly above ``r`` in every coordinate get 0.
    """
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    ref = check_reference(r, front)
    if ys.shape[1] != front.dim:
        raise DimensionMismatchError(
            f"Points have {ys.shape[1]} coordinates, front has {front.dim}"
        )
    lower, upper = dominated_boxes(front, ref)
    own = np.prod(np.clip(ys - ref, 0.0, None), axis=1)
    if len(lower) == 0:
        return own

    chunk = max(1, HVI_CHUNK_ELEMENTS // (len(lower) * front.dim))
    covered = np.empty(len(ys))
    for start in range(0, len(ys), chunk):
        block = ys[start : start + chunk, None, :]
        widths = np.clip(np.minimum(block, upper) - lower, 0.0, None)
        covered[start : start + chunk] = np.prod(widths, axis=2).sum(axis=1)
    return np.clip(own - covered, 0.0, None)
