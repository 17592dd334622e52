import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from ehvikit.core.decomposition import BoxPartition, partition, partition_dd
from ehvikit.core.errors import DimensionMismatchError
from ehvikit.core.gauss import psi_inf_array, vartheta_array
from ehvikit.core.pareto import ParetoApprox, check_reference, clip_to_reference
from ehvikit.models.enums import CriterionEnum

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GaussPred:
    """Independent normal prediction per objective.

    A zero sigma marks a deterministic prediction; criteria then return
    their σ → 0 limit.
    """

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        sigma = np.asarray(self.sigma, dtype=float).reshape(-1)
        if mu.shape != sigma.shape:
            raise DimensionMismatchError(
                f"mu has {mu.shape[0]} entries but sigma has {sigma.shape[0]}"
            )
        if not np.all(np.isfinite(mu)) or not np.all(np.isfinite(sigma)):
            raise ValueError("Predictions must be finite")
        if np.any(sigma < 0):
            raise ValueError(f"sigma must be nonnegative, got {sigma.tolist()}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    @property
    def degenerate(self) -> bool:
        return bool(np.any(self.sigma == 0))


def _check_dims(pred: GaussPred, front: ParetoApprox):
    if pred.dim != front.dim:
        raise DimensionMismatchError(
            f"Prediction has {pred.dim} objectives, front has {front.dim}"
        )


def _omega(part: BoxPartition, mu: np.ndarray, sigma: np.ndarray):
    """Per box and coordinate: ω for bit 0 (Ψ difference) and bit 1 (ϑ).

    Shapes broadcast to (B, N, d) for B predictions and N boxes.
    """
    lo = part.lower[None, :, :]
    hi = part.upper[None, :, :]
    m = mu[:, None, :]
    s = sigma[:, None, :]
    psi_ll = psi_inf_array(lo, lo, m, s)
    omega0 = psi_ll - psi_inf_array(lo, hi, m, s)
    omega1 = vartheta_array(lo, hi, m, s)
    return psi_ll, omega0, omega1


def _fsum_rows(per_box: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(row) for row in per_box])


def improvement(mu: np.ndarray, part: BoxPartition) -> np.ndarray:
    """Exact HVI of each row of ``mu`` from the volume it cuts out of the boxes."""
    mu = np.atleast_2d(mu)
    widths = np.clip(
        np.minimum(mu[:, None, :], part.upper[None, :, :]) - part.lower[None, :, :],
        0.0,
        None,
    )
    return _fsum_rows(np.prod(widths, axis=2))


def ehvi_boxes(mu: np.ndarray, sigma: np.ndarray, part: BoxPartition) -> np.ndarray:
    """
    EHVI of a batch of predictions over an arbitrary box partition.

    Per box, the first d-1 coordinates enter through the sum over binary
    strings of ω products; the last coordinate enters through
    Ψ(l,l) − Ψ(l,u) + ϑ(l,u), which is Ψ(l,l) whenever u_d = ∞.

    Args:
        mu: (B, d) predictive means; all sigma entries strictly positive.
        sigma: (B, d) predictive standard deviations.
        part: Boxes covering the non-dominated space.

    Returns:
        (B,) array of EHVI values.
    """
    mu = np.atleast_2d(mu)
    sigma = np.atleast_2d(sigma)
    if len(part) == 0:
        return np.zeros(len(mu))
    d = part.dim
    _, omega0, omega1 = _omega(part, mu, sigma)
    last = omega0[..., d - 1] + omega1[..., d - 1]

    strings = np.zeros(last.shape)
    for bits in itertools.product((0, 1), repeat=d - 1):
        term = np.ones(last.shape)
        for k, bit in enumerate(bits):
            term = term * (omega1[..., k] if bit else omega0[..., k])
        strings += term
    return np.clip(_fsum_rows(strings * last), 0.0, None)


def poi_boxes(mu: np.ndarray, sigma: np.ndarray, part: BoxPartition) -> np.ndarray:
    """Probability mass of each prediction inside the boxes of ``part``."""
    mu = np.atleast_2d(mu)
    sigma = np.atleast_2d(sigma)
    m = mu[:, None, :]
    s = sigma[:, None, :]
    mass = ndtr((part.upper[None] - m) / s) - ndtr((part.lower[None] - m) / s)
    return np.clip(_fsum_rows(np.prod(mass, axis=2)), 0.0, 1.0)


def ehvi_2d(pred: GaussPred, front: ParetoApprox, r: Sequence[float]) -> float:
    """Exact 2-D EHVI summed over the n+1 slices of partition_2d."""
    _check_dims(pred, front)
    if front.dim != 2:
        raise DimensionMismatchError(f"ehvi_2d needs d=2, got d={front.dim}")
    check_reference(r, front)
    part = partition(front, r, "2d")
    if pred.degenerate:
        return float(improvement(pred.mu, part)[0])
    psi_ll, omega0, omega1 = _omega(part, pred.mu[None], pred.sigma[None])
    per_slice = (omega0[0, :, 0] + omega1[0, :, 0]) * psi_ll[0, :, 1]
    return max(math.fsum(per_slice), 0.0)


def ehvi_3d(pred: GaussPred, front: ParetoApprox, r: Sequence[float]) -> float:
    """Exact 3-D EHVI: four ω products per slice times Ψ(l_3, l_3)."""
    _check_dims(pred, front)
    if front.dim != 3:
        raise DimensionMismatchError(f"ehvi_3d needs d=3, got d={front.dim}")
    check_reference(r, front)
    part = partition(front, r, "3d")
    if pred.degenerate:
        return float(improvement(pred.mu, part)[0])
    psi_ll, omega0, omega1 = _omega(part, pred.mu[None], pred.sigma[None])
    w0, w1 = omega0[0], omega1[0]
    terms = (
        w0[:, 0] * w0[:, 1]
        + w0[:, 0] * w1[:, 1]
        + w1[:, 0] * w0[:, 1]
        + w1[:, 0] * w1[:, 1]
    )
    return max(math.fsum(terms * psi_ll[0, :, 2]), 0.0)


def ehvi_dd(pred: GaussPred, front: ParetoApprox, r: Sequence[float]) -> float:
    """Exact EHVI in any dimension over the boxes of partition_dd."""
    _check_dims(pred, front)
    check_reference(r, front)
    part = partition_dd(front, r)
    if pred.degenerate:
        return float(improvement(pred.mu, part)[0])
    return float(ehvi_boxes(pred.mu, pred.sigma, part)[0])


def ehvi(
    pred: GaussPred, front: ParetoApprox, r: Sequence[float], method: str = "auto"
) -> float:
    """EHVI via the dedicated path for d=2 and d=3 and partition_dd otherwise."""
    _check_dims(pred, front)
    if method == "auto":
        method = {2: "2d", 3: "3d"}.get(front.dim, "dd")
    if method == "2d":
        return ehvi_2d(pred, front, r)
    if method == "3d":
        return ehvi_3d(pred, front, r)
    if method == "dd":
        return ehvi_dd(pred, front, r)
    raise ValueError(f"Unknown EHVI method '{method}'")


def _not_dominated(mu: np.ndarray, front: ParetoApprox) -> np.ndarray:
    mu = np.atleast_2d(mu)
    if front.n == 0:
        return np.ones(len(mu))
    dominated = np.any(np.all(front.points[None] >= mu[:, None, :], axis=2), axis=1)
    return (~dominated).astype(float)


def poi(pred: GaussPred, front: ParetoApprox) -> float:
    """
    Probability that the prediction lands in the non-dominated space.

    The partition uses r = (-∞)^d, so no HV reference point is involved.
    """
    _check_dims(pred, front)
    if pred.degenerate:
        return float(_not_dominated(pred.mu, front)[0])
    part = partition(front, np.full(front.dim, -np.inf))
    return float(poi_boxes(pred.mu, pred.sigma, part)[0])


class CriterionEvaluator:
    """
    Decomposes a front once and scores batches of predictions against it.

    For EHVI, members that do not strictly dominate ``r`` are dropped
    first; they add nothing inside the reference box. PoI ignores ``r``.
    """

    def __init__(
        self,
        front: ParetoApprox,
        r: Sequence[float] | None,
        criterion: CriterionEnum | str = CriterionEnum.EHVI,
        method: str = "auto",
    ):
        if isinstance(criterion, str):
            criterion = CriterionEnum.from_string(criterion)
        self.criterion = criterion
        self.front = front

        if criterion is CriterionEnum.EHVI:
            if r is None:
                raise ValueError("EHVI needs a reference point")
            ref = np.asarray(r, dtype=float)
            clipped = clip_to_reference(front, ref)
            if clipped.n < front.n:
                logger.warning(
                    f"{front.n - clipped.n} front members do not dominate the "
                    f"reference point and are ignored by EHVI"
                )
            self.ref = check_reference(ref, clipped)
            self.partition = partition(clipped, self.ref, method)
        else:
            self.ref = np.full(front.dim, -np.inf)
            self.partition = partition(front, self.ref, method)

    def __call__(self, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        mu = np.atleast_2d(np.asarray(mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        if mu.shape[1] != self.front.dim:
            raise DimensionMismatchError(
                f"Predictions have {mu.shape[1]} objectives, front has {self.front.dim}"
            )
        values = np.empty(len(mu))
        flat = np.any(sigma == 0, axis=1)
        regular = ~flat

        if self.criterion is CriterionEnum.EHVI:
            if regular.any():
                values[regular] = ehvi_boxes(mu[regular], sigma[regular], self.partition)
            if flat.any():
                values[flat] = improvement(mu[flat], self.partition)
        else:
            if regular.any():
                values[regular] = poi_boxes(mu[regular], sigma[regular], self.partition)
            if flat.any():
                values[flat] = _not_dominated(mu[flat], self.front)
        return values
