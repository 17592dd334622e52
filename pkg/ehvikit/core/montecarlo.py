"""Monte Carlo estimators used as correctness oracles for the exact criteria.

Sampling streams: ``SeedSequence(seed).spawn(workers)`` gives one child
stream per worker; worker w draws the w-th share of the samples (the first
``samples % workers`` shares hold one extra sample) in chunks of
``chunk_size``. Partial results are merged in worker order, so an estimate
depends only on (seed, samples, workers).
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ehvikit.core.criteria import GaussPred
from ehvikit.core.errors import DimensionMismatchError
from ehvikit.core.hypervolume import hvi_many
from ehvikit.core.pareto import ParetoApprox, check_reference

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1_000
DEFAULT_CHUNK_SIZE = 100_000


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    def merge(self, other: "_Moments") -> "_Moments":
        # Chan et al. pairwise update
        if self.count == 0:
            return other
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / total
        m2 = self.m2 + other.m2 + delta**2 * self.count * other.count / total
        return _Moments(total, mean, m2)

    @classmethod
    def of(cls, values: np.ndarray) -> "_Moments":
        mean = float(values.mean())
        return cls(len(values), mean, float(np.sum((values - mean) ** 2)))


def _ehvi_target(front: ParetoApprox, ref: np.ndarray) -> Callable:
    def target(ys: np.ndarray) -> np.ndarray:
        return hvi_many(ys, front, ref)

    return target


def _poi_target(front: ParetoApprox) -> Callable:
    def target(ys: np.ndarray) -> np.ndarray:
        if front.n == 0:
            return np.ones(len(ys))
        dominated = np.zeros(len(ys), dtype=bool)
        for p in front.points:
            dominated |= np.all(ys <= p, axis=1)
        return (~dominated).astype(float)

    return target


def _sample_worker(args) -> _Moments:
    kind, pred, front, ref, count, seed_seq, chunk_size = args
    target = _ehvi_target(front, ref) if kind == "ehvi" else _poi_target(front)
    rng = np.random.default_rng(seed_seq)
    moments = _Moments(0, 0.0, 0.0)
    remaining = count
    while remaining > 0:
        size = min(chunk_size, remaining)
        ys = pred.mu + pred.sigma * rng.standard_normal((size, pred.dim))
        moments = moments.merge(_Moments.of(target(ys)))
        remaining -= size
    return moments


def _estimate(
    kind: str,
    pred: GaussPred,
    front: ParetoApprox,
    ref: np.ndarray | None,
    samples: int,
    seed: int,
    workers: int,
    chunk_size: int,
) -> McEstimate:
    if samples < MIN_SAMPLES:
        raise ValueError(f"Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}")
    if pred.dim != front.dim:
        raise DimensionMismatchError(
            f"Prediction has {pred.dim} objectives, front has {front.dim}"
        )
    workers = max(1, int(workers))
    shares = [samples // workers + (1 if w < samples % workers else 0) for w in range(workers)]
    streams = np.random.SeedSequence(seed).spawn(workers)
    jobs = [
        (kind, pred, front, ref, share, stream, chunk_size)
        for share, stream in zip(shares, streams)
    ]

    if workers == 1:
        parts = [_sample_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sample_worker, jobs))

    total = _Moments(0, 0.0, 0.0)
    for part in parts:
        total = total.merge(part)
    std = np.sqrt(total.m2 / (total.count - 1))
    estimate = McEstimate(
        value=total.mean, std_error=float(std / np.sqrt(total.count)), samples=total.count
    )
    logger.debug(
        f"MC {kind}: {estimate.value:.6g} ± {estimate.std_error:.3g} "
        f"({samples} samples, seed {seed}, {workers} workers)"
    )
    return estimate


def mc_ehvi(
    pred: GaussPred,
    front: ParetoApprox,
    r: Sequence[float],
    samples: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> McEstimate:
    """
    Estimates EHVI as the mean HVI of normal samples around ``pred``.

    Samples outside [r, ∞) contribute 0 improvement.
    """
    ref = check_reference(r, front)
    return _estimate("ehvi", pred, front, ref, samples, seed, workers, chunk_size)


def mc_poi(
    pred: GaussPred,
    front: ParetoApprox,
    samples: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> McEstimate:
    """Estimates the probability that a sample is weakly dominated by no member."""
    return _estimate("poi", pred, front, None, samples, seed, workers, chunk_size)


def mc_volume(
    front: ParetoApprox,
    r: Sequence[float],
    ceiling: Sequence[float],
    samples: int,
    seed: int,
) -> McEstimate:
    """Uniform-sampling estimate of the dominated volume inside [r, ceiling]."""
    ref = check_reference(r, front)
    top = np.asarray(ceiling, dtype=float)
    rng = np.random.default_rng(seed)
    ys = ref + (top - ref) * rng.random((samples, front.dim))
    hit = np.zeros(samples, dtype=bool)
    for p in front.points:
        hit |= np.all(ys <= p, axis=1)
    box = float(np.prod(top - ref))
    frac = hit.mean()
    return McEstimate(
        value=box * frac,
        std_error=box * float(np.sqrt(frac * (1 - frac) / (samples - 1))),
        samples=samples,
    )
