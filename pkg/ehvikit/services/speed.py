import logging
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from ehvikit.core.criteria import GaussPred, ehvi
from ehvikit.core.decomposition import local_lower_bounds, partition
from ehvikit.models.enums import FrontKindEnum
from ehvikit.models.schemas import FrontSpec
from ehvikit.services.benchmarks import random_front

logger = logging.getLogger(__name__)

DEFAULT_REPS = 10
PREDICTION_MU = 10.0
PREDICTION_SIGMA = 2.5
SPEED_DIMENSIONS = range(2, 6)
SPEED_SIZES = range(10, 201)


@dataclass(frozen=True)
class SpeedRow:
    d: int
    n: int
    kind: str
    algorithm: str
    mean_seconds: float
    repetitions: int
    mean_boxes: float
    mean_lower_bounds: float


@dataclass
class SpeedReport:
    rows: list[SpeedRow] = field(default_factory=list)
    machine: str = field(default_factory=platform.platform)
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def slopes(self) -> dict[int, float]:
        """Log-log slope of mean time against n, per dimension."""
        out = {}
        for d in sorted({row.d for row in self.rows}):
            rows = [row for row in self.rows if row.d == d]
            if len({row.n for row in rows}) >= 2:
                out[d] = loglog_slope([r.n for r in rows], [r.mean_seconds for r in rows])
        return out


def loglog_slope(ns: Sequence[float], seconds: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(ns), np.log(seconds), 1)
    return float(slope)


def _time_one(args) -> tuple[float, int, int]:
    d, n, kind, seed, method, mu, sigma = args
    front = random_front(FrontSpec(kind=kind, d=d, n=n, seed=seed))
    pred = GaussPred(np.full(d, mu), np.full(d, sigma))
    ref = np.zeros(d)
    start = time.perf_counter()
    ehvi(pred, front, ref, method=method)
    elapsed = time.perf_counter() - start
    boxes = len(partition(front, ref, method))
    bounds = len(local_lower_bounds(front, ref))
    return elapsed, boxes, bounds


def bench_speed(
    d_list: Sequence[int],
    n_list: Sequence[int],
    kind: FrontKindEnum | str = FrontKindEnum.CONCAVE_SPHERICAL,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    method: str = "auto",
    workers: int = 1,
    mu: float = PREDICTION_MU,
    sigma: float = PREDICTION_SIGMA,
) -> SpeedReport:
    """
    Times one exact EHVI evaluation (partitioning included) per random front.

    Each (d, n) cell draws ``reps`` fronts with seeds derived from ``seed``
    and predicts ``mu`` and ``sigma`` (10 and 2.5 by default) in every
    objective. With ``workers > 1`` repetitions run in separate processes,
    each timed on its own.
    """
    if isinstance(kind, str):
        kind = FrontKindEnum.from_string(kind)
    bad_d = [d for d in d_list if d not in SPEED_DIMENSIONS]
    bad_n = [n for n in n_list if n not in SPEED_SIZES]
    if bad_d or bad_n:
        raise ValueError(f"Unsupported sizes: d={bad_d}, n={bad_n}")
    if reps < 1:
        raise ValueError("reps must be at least 1")

    report = SpeedReport()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for d in d_list:
            for n in n_list:
                seeds = np.random.SeedSequence([seed, d, n]).generate_state(reps)
                jobs = [(d, n, kind, int(s), method, mu, sigma) for s in seeds]
                results = list(pool.map(_time_one, jobs)) if pool else [_time_one(j) for j in jobs]
                times, boxes, bounds = (np.array(col, dtype=float) for col in zip(*results))
                row = SpeedRow(
                    d=d,
                    n=n,
                    kind=kind.value,
                    algorithm=method,
                    mean_seconds=float(times.mean()),
                    repetitions=reps,
                    mean_boxes=float(boxes.mean()),
                    mean_lower_bounds=float(bounds.mean()),
                )
                report.rows.append(row)
                logger.info(
                    f"d={d} n={n}: {row.mean_seconds * 1e3:.3f} ms over {reps} reps, "
                    f"{row.mean_boxes:.1f} boxes, {row.mean_lower_bounds:.1f} local lower bounds"
                )
    finally:
        if pool:
            pool.shutdown()

    for d, slope in report.slopes().items():
        logger.info(f"d={d}: log-log slope of EHVI time vs n is {slope:.3f}")
    return report
