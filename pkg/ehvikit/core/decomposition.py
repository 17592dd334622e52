import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sortedcontainers import SortedKeyList

from ehvikit.core.errors import DimensionMismatchError
from ehvikit.core.pareto import ParetoApprox, check_reference

logger = logging.getLogger(__name__)

PARTITION_METHODS = ("auto", "2d", "3d", "dd")

# Membership tests broadcast (samples, boxes, d); keep the temporary bounded.
MEMBERSHIP_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class Hyperbox:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise DimensionMismatchError("Box bounds have different lengths")
        if not all(lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"Empty box: lower={self.lower}, upper={self.upper}")


@dataclass(frozen=True, eq=False)
class BoxPartition:
    """Interior-disjoint boxes covering the non-dominated space of a front.

    Bounds are stored as (N, d) arrays; ``upper`` may hold +inf.
    """

    lower: np.ndarray
    upper: np.ndarray
    source_front_size: int

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 2:
            raise DimensionMismatchError(
                f"Box bounds must be equal (N, d) arrays, got {lower.shape} and {upper.shape}"
            )
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[1]

    def __len__(self) -> int:
        return self.lower.shape[0]

    @property
    def boxes(self) -> list[Hyperbox]:
        return [
            Hyperbox(tuple(lo.tolist()), tuple(hi.tolist()))
            for lo, hi in zip(self.lower, self.upper)
        ]

    def membership_counts(self, samples: np.ndarray) -> np.ndarray:
        """Number of boxes (l, u] holding each sample row."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        chunk = max(1, MEMBERSHIP_CHUNK_ELEMENTS // max(1, len(self) * self.dim))
        counts = np.empty(len(samples), dtype=int)
        for start in range(0, len(samples), chunk):
            block = samples[start : start + chunk, None, :]
            inside = np.all((block > self.lower) & (block <= self.upper), axis=2)
            counts[start : start + chunk] = inside.sum(axis=1)
        return counts

    def clipped_volume(self, ceiling: Sequence[float]) -> float:
        """Total volume after clipping every upper bound at ``ceiling``."""
        top = np.minimum(self.upper, np.asarray(ceiling, dtype=float))
        widths = np.clip(top - self.lower, 0.0, None)
        return float(np.sum(np.prod(widths, axis=1)))


@dataclass(frozen=True, eq=False)
class LocalLowerBounds:
    points: np.ndarray

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class DecompositionStats:
    n: int
    d: int
    lower_bounds: int
    boxes: int


def _require_dim(front: ParetoApprox, dim: int, name: str):
    if front.dim != dim:
        raise DimensionMismatchError(f"{name} needs d={dim}, got d={front.dim}")


def partition_2d(front: ParetoApprox, r: Sequence[float]) -> BoxPartition:
    """
    Splits the 2-D non-dominated space into n+1 vertical slices.

    Points are ordered by ascending y_1 (descending y_2) between the
    sentinels (r_1, ∞) and (∞, r_2). Slice i has lower bound
    (y_1^(i-1), y_2^(i)) and upper bound (y_1^(i), ∞).
    """
    _require_dim(front, 2, "partition_2d")
    ref = check_reference(r, front, allow_minus_inf=True)
    pts = front.points[np.argsort(front.points[:, 0], kind="stable")]
    y1 = np.concatenate(([ref[0]], pts[:, 0], [np.inf]))
    y2 = np.concatenate(([np.inf], pts[:, 1], [ref[1]]))

    lower = np.column_stack((y1[:-1], y2[1:]))
    upper = np.column_stack((y1[1:], np.full(len(pts) + 1, np.inf)))
    return BoxPartition(lower, upper, front.n)


def _staircase_key(q):
    return q[0]


def partition_3d(front: ParetoApprox, r: Sequence[float]) -> BoxPartition:
    """
    Sweeps the front in descending y_3 and emits the 3-D integration slices.

    A sorted list keyed on y_1 holds the current y_1 y_2 staircase between
    the sentinels (r_1, ∞) and (∞, r_2). Each point emits one slice per
    staircase point it covers in projection plus one, every slice reaching
    from the point's y_3 to +∞. A final sentinel at height r_3 closes the
    sweep, so general-position fronts yield exactly 2n+1 slices.
    Equal y_3 levels are processed in ascending y_1; zero-width slices are
    dropped.
    """
    _require_dim(front, 3, "partition_3d")
    ref = check_reference(r, front, allow_minus_inf=True)
    order = np.lexsort((front.points[:, 0], -front.points[:, 2]))

    staircase = SortedKeyList([(ref[0], np.inf), (np.inf, ref[1])], key=_staircase_key)
    lower: list[tuple[float, float, float]] = []
    upper: list[tuple[float, float, float]] = []

    def emit(l1, l2, l3, u1, u2):
        if l1 < u1 and l2 < u2:
            lower.append((l1, l2, l3))
            upper.append((u1, u2, np.inf))

    for y1, y2, y3 in front.points[order]:
        b = staircase.bisect_key_right(y1)
        a = b
        while staircase[a - 1][1] <= y2:
            a -= 1
        left = staircase[a - 1]
        right = staircase[b]
        covered = list(staircase[a:b])

        if not covered:
            emit(left[0], right[1], y3, y1, y2)
        else:
            emit(left[0], covered[0][1], y3, covered[0][0], y2)
            for prev, cur in zip(covered, covered[1:]):
                emit(prev[0], cur[1], y3, cur[0], y2)
            emit(covered[-1][0], right[1], y3, y1, y2)
            del staircase[a:b]
        staircase.add((y1, y2))

    # Closing sentinel (∞, ∞, r_3) covers what is left of the staircase.
    remaining = list(staircase[1:-1])
    if not remaining:
        emit(ref[0], ref[1], ref[2], np.inf, np.inf)
    else:
        emit(ref[0], remaining[0][1], ref[2], remaining[0][0], np.inf)
        for prev, cur in zip(remaining, remaining[1:]):
            emit(prev[0], cur[1], ref[2], cur[0], np.inf)
        emit(remaining[-1][0], ref[1], ref[2], np.inf, np.inf)

    return BoxPartition(
        np.array(lower, dtype=float).reshape(-1, 3),
        np.array(upper, dtype=float).reshape(-1, 3),
        front.n,
    )


def _drop_redundant(kept: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Minimal elements (minimization order) of kept ∪ candidates.

    ``kept`` is already mutually minimal and no candidate can make one of
    its rows redundant, so only candidates are tested.
    """
    candidates = np.unique(candidates, axis=0)
    pool = np.vstack((kept, candidates))
    le = np.all(pool[None, :, :] <= candidates[:, None, :], axis=2)
    lt = np.any(pool[None, :, :] < candidates[:, None, :], axis=2)
    redundant = np.any(le & lt, axis=1)
    duplicate = np.any(np.all(kept[None, :, :] == candidates[:, None, :], axis=2), axis=1)
    return np.vstack((kept, candidates[~(redundant | duplicate)]))


def local_lower_bounds(front: ParetoApprox, r: Sequence[float]) -> LocalLowerBounds:
    """
    Locates the local lower bounds of the non-dominated space.

    The non-dominated space equals the union of the open orthants above the
    returned points. Starting from {r}, each front point y replaces every
    bound l < y (strictly, all coordinates) with the d bounds obtained by
    raising one coordinate of l to y's value, then redundant bounds are
    discarded. Ties between coordinates need no special handling.
    """
    ref = check_reference(r, front, allow_minus_inf=True)
    d = front.dim
    bounds = ref[None, :].copy()

    for y in front.points:
        hit = np.all(bounds < y, axis=1)
        if not hit.any():
            continue
        affected = bounds[hit]
        candidates = np.repeat(affected, d, axis=0)
        coord = np.tile(np.arange(d), len(affected))
        candidates[np.arange(len(candidates)), coord] = y[coord]
        bounds = _drop_redundant(bounds[~hit], candidates)

    return LocalLowerBounds(bounds)


def split_orthant_union(
    corners: np.ndarray, lo: np.ndarray, hi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Partitions [lo, hi] ∩ ∪_c [c, ∞) into disjoint boxes.

    Corners are inserted by ascending last coordinate. Each inserted corner
    carves its orthant out of every free box it meets; the remainder of such
    a box is split into at most d-1 free pieces. The piece below the
    corner's last coordinate can never be reached by a later corner and is
    discarded, so every emitted box keeps hi's last coordinate.

    Returns:
        Arrays (lower, upper) of the emitted boxes, each of shape (N, d).
    """
    corners = np.asarray(corners, dtype=float)
    d = len(lo)
    free_lo = np.asarray(lo, dtype=float)[None, :].copy()
    free_hi = np.asarray(hi, dtype=float)[None, :].copy()
    out_lo: list[np.ndarray] = []
    out_hi: list[np.ndarray] = []

    for c in corners[np.argsort(corners[:, -1], kind="stable")]:
        hit = np.all(c < free_hi, axis=1)
        if not hit.any():
            continue
        box_lo, box_hi = free_lo[hit], free_hi[hit]
        out_lo.append(np.maximum(box_lo, c))
        out_hi.append(box_hi)

        piece_lo, piece_hi = [free_lo[~hit]], [free_hi[~hit]]
        clipped = box_lo.copy()
        for j in range(d - 1):
            keep = clipped[:, j] < c[j]
            if keep.any():
                p_lo = clipped[keep].copy()
                p_hi = box_hi[keep].copy()
                p_hi[:, j] = c[j]
                piece_lo.append(p_lo)
                piece_hi.append(p_hi)
            clipped[:, j] = np.maximum(clipped[:, j], c[j])
        free_lo = np.vstack(piece_lo)
        free_hi = np.vstack(piece_hi)

    if not out_lo:
        return np.empty((0, d)), np.empty((0, d))
    return np.vstack(out_lo), np.vstack(out_hi)


def partition_dd(front: ParetoApprox, r: Sequence[float]) -> BoxPartition:
    """
    Partitions the non-dominated space in any dimension.

    The local lower bounds are treated as a minimization front with an
    infinite reference point and its dominated space is split into boxes;
    those boxes partition the non-dominated space of ``front``. Box order
    carries no meaning.
    """
    ref = check_reference(r, front, allow_minus_inf=True)
    bounds = local_lower_bounds(front, ref)
    lower, upper = split_orthant_union(
        bounds.points, ref, np.full(front.dim, np.inf)
    )
    logger.debug(
        f"partition_dd: n={front.n}, d={front.dim}, |L|={len(bounds)}, boxes={len(lower)}"
    )
    return BoxPartition(lower, upper, front.n)


def partition(
    front: ParetoApprox, r: Sequence[float], method: str = "auto"
) -> BoxPartition:
    """Dispatches to the dedicated partitioner for d=2 and d=3, else partition_dd."""
    if method not in PARTITION_METHODS:
        raise ValueError(f"Unknown partition method '{method}'")
    if method == "auto":
        method = {2: "2d", 3: "3d"}.get(front.dim, "dd")
    if method == "2d":
        return partition_2d(front, r)
    if method == "3d":
        return partition_3d(front, r)
    return partition_dd(front, r)


def decomposition_stats(
    front: ParetoApprox,
    r: Sequence[float],
    method: str = "auto",
    boxes: BoxPartition | None = None,
) -> DecompositionStats:
    """Sizes of a decomposition; pass ``boxes`` to count an existing partition."""
    bounds = local_lower_bounds(front, r)
    if boxes is None:
        boxes = partition(front, r, method)
    stats = DecompositionStats(
        n=front.n, d=front.dim, lower_bounds=len(bounds), boxes=len(boxes)
    )
    logger.info(
        f"Decomposition of n={stats.n}, d={stats.d}: {stats.boxes} boxes, "
        f"{stats.lower_bounds} local lower bounds"
    )
    return stats
