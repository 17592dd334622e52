import logging
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ehvikit.core.errors import (
    DimensionMismatchError,
    EmptyInputError,
    ReferencePointError,
)

logger = logging.getLogger(__name__)

# Objective vectors are plain float arrays of shape (d,), maximization convention.
ObjVec = np.ndarray

MIN_OBJECTIVES = 2


def as_objvec(y: Sequence[float], dim: int | None = None) -> ObjVec:
    """Convert ``y`` to a finite float vector, checking its dimension."""
    vec = np.asarray(y, dtype=float).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatchError(
            f"Expected an objective vector of length {dim}, got {vec.shape[0]}"
        )
    if vec.shape[0] < MIN_OBJECTIVES:
        raise DimensionMismatchError(
            f"Objective vectors need at least {MIN_OBJECTIVES} coordinates"
        )
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"Objective vector has non-finite coordinates: {vec}")
    return vec


def _mutually_dominated_mask(points: np.ndarray) -> np.ndarray:
    """mask[j] is True when some row strictly dominates row j."""
    ge = np.all(points[:, None, :] >= points[None, :, :], axis=2)
    gt = np.any(points[:, None, :] > points[None, :, :], axis=2)
    return np.any(ge & gt, axis=0)


@dataclass(frozen=True, eq=False)
class ParetoApprox:
    """Archive of mutually non-dominated objective vectors.

    ``points`` is a read-only (n, d) array; n may be 0 for the empty front.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2:
            raise DimensionMismatchError(
                f"Front points must form an (n, d) array, got shape {pts.shape}"
            )
        if pts.shape[1] < MIN_OBJECTIVES:
            raise DimensionMismatchError(
                f"Fronts need at least {MIN_OBJECTIVES} objectives, got {pts.shape[1]}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValueError("Front members must have finite coordinates")
        if len(pts) > 1:
            if len(np.unique(pts, axis=0)) != len(pts):
                raise ValueError("Front contains duplicate vectors")
            if np.any(_mutually_dominated_mask(pts)):
                raise ValueError("Front members are not mutually non-dominated")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def empty(cls, dim: int) -> "ParetoApprox":
        return cls(np.empty((0, dim)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[ObjVec]:
        return iter(self.points)

    def __repr__(self) -> str:
        return f"ParetoApprox(n={self.n}, dim={self.dim})"


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"Cannot compare vectors of shapes {a.shape} and {b.shape}"
        )
    return bool(np.all(a >= b) and np.any(a > b))


def nd_filter(ys) -> ParetoApprox:
    """
    Returns the non-dominated subset of ``ys`` with duplicates removed.

    Points equal to an earlier point are dropped; a point is discarded only
    when another point strictly dominates it. Surviving points keep the order
    of their first occurrence.

    Args:
        ys: A sequence of objective vectors or an (n, d) array.

    Returns:
        The ParetoApprox of the non-dominated points.
    """
    try:
        pts = np.asarray(ys, dtype=float)
    except ValueError as e:
        raise DimensionMismatchError(f"Input vectors have uneven lengths: {e}") from e
    if pts.size == 0:
        raise EmptyInputError("nd_filter needs at least one vector")
    if pts.ndim != 2:
        raise DimensionMismatchError(
            f"Input must be a list of equal-length vectors, got shape {pts.shape}"
        )

    _, first_idx = np.unique(pts, axis=0, return_index=True)
    unique_pts = pts[np.sort(first_idx)]
    keep = ~_mutually_dominated_mask(unique_pts)
    logger.debug(
        f"nd_filter kept {int(keep.sum())} of {len(pts)} vectors "
        f"({len(pts) - len(unique_pts)} duplicates)"
    )
    return ParetoApprox(unique_pts[keep])


def check_reference(
    r: Sequence[float], front: ParetoApprox, allow_minus_inf: bool = False
) -> np.ndarray:
    """
    Validates ``r`` against ``front`` for hypervolume purposes.

    Every member must exceed ``r`` strictly in every coordinate; members on
    the reference boundary are rejected. ``r`` must be finite unless
    ``allow_minus_inf`` is set, which only the reference-free PoI
    partition needs.
    """
    ref = np.asarray(r, dtype=float).reshape(-1)
    if ref.shape[0] != front.dim:
        raise DimensionMismatchError(
            f"Reference point has {ref.shape[0]} coordinates, front has {front.dim}"
        )
    if np.any(np.isnan(ref)) or np.any(ref == np.inf):
        raise ReferencePointError(f"Reference point {ref} is not usable")
    if not allow_minus_inf and not np.all(np.isfinite(ref)):
        raise ReferencePointError(f"Reference point {ref.tolist()} must be finite")
    if front.n and not np.all(front.points > ref):
        bad = front.points[~np.all(front.points > ref, axis=1)][0]
        raise ReferencePointError(
            f"Reference point {ref.tolist()} is not dominated by member {bad.tolist()}"
        )
    return ref


def clip_to_reference(front: ParetoApprox, r: Sequence[float]) -> ParetoApprox:
    """Keeps the members that strictly dominate ``r``; the rest add no volume."""
    ref = np.asarray(r, dtype=float).reshape(-1)
    inside = np.all(front.points > ref, axis=1)
    if not np.all(inside):
        logger.debug(f"Skipping {int((~inside).sum())} members outside the reference box")
        return ParetoApprox(front.points[inside])
    return front


def negate(front: ParetoApprox) -> ParetoApprox:
    """Switches a front between minimization and maximization."""
    return ParetoApprox(-front.points)
