from dataclasses import dataclass
from typing import Callable

import numpy as np

from ehvikit.core.errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class Problem:
    """A box-constrained problem whose objectives are to be maximized.

    ``func`` maps an (B, m) batch of decision vectors to (B, d) objective
    vectors. Minimization problems are negated before they get here.
    """

    name: str
    m: int
    d: int
    bounds: np.ndarray
    func: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        bounds = np.asarray(self.bounds, dtype=float)
        if bounds.shape != (self.m, 2):
            raise DimensionMismatchError(
                f"bounds must have shape ({self.m}, 2), got {bounds.shape}"
            )
        if not np.all(bounds[:, 0] < bounds[:, 1]):
            raise ValueError("Every bound needs lo < hi")
        object.__setattr__(self, "bounds", bounds)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if xs.shape[1] != self.m:
            raise DimensionMismatchError(
                f"{self.name} takes {self.m} inputs, got {xs.shape[1]}"
            )
        return np.asarray(self.func(xs), dtype=float).reshape(len(xs), self.d)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate_many(np.asarray(x, dtype=float).reshape(1, -1))[0]
