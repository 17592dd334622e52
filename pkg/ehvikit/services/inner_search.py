import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_PARENTS = 5
DEFAULT_OFFSPRING = 20
INITIAL_STEP = 0.3
MIN_STEP = 1e-6
STAGNATION_GENERATIONS = 15


@dataclass
class SearchResult:
    """Every point the search evaluated, in evaluation order, plus the winner."""

    best_x: np.ndarray
    best_value: float
    best_index: int
    xs: np.ndarray
    values: np.ndarray
    restarts: int = 0


class EvolutionStrategy:
    """
    Restarted (μ, λ) evolution strategy on the unit box.

    Offspring inherit a log-normally mutated step size from a random parent
    and are projected back into [0, 1]^m. The strategy restarts from uniform
    parents once steps collapse or the best value stalls. The winner is the
    first evaluated point holding the maximal value.
    """

    def __init__(
        self,
        parents: int = DEFAULT_PARENTS,
        offspring: int = DEFAULT_OFFSPRING,
        initial_step: float = INITIAL_STEP,
    ):
        if parents < 1 or offspring < parents:
            raise ValueError("Need 1 <= parents <= offspring")
        self.parents = parents
        self.offspring = offspring
        self.initial_step = initial_step

    def maximize(
        self,
        objective: Callable[[np.ndarray], np.ndarray],
        m: int,
        budget: int,
        rng: np.random.Generator,
    ) -> SearchResult:
        """
        Maximizes a batch objective over [0, 1]^m.

        Args:
            objective: Maps a (B, m) batch to (B,) values.
            m: Search dimension.
            budget: Total number of objective evaluations.
            rng: Source of randomness.
        """
        tau = 1.0 / np.sqrt(2.0 * m)
        evaluated_x: list[np.ndarray] = []
        evaluated_v: list[np.ndarray] = []
        used = 0

        def evaluate(batch: np.ndarray) -> np.ndarray:
            nonlocal used
            batch = batch[: budget - used]
            values = np.asarray(objective(batch), dtype=float)
            evaluated_x.append(batch)
            evaluated_v.append(values)
            used += len(batch)
            return values

        restarts = -1
        while used < budget:
            restarts += 1
            pop = rng.random((self.parents, m))
            steps = np.full(self.parents, self.initial_step)
            values = evaluate(pop)
            if len(values) < len(pop):
                break
            best_in_run = values.max()
            stall = 0
            while used < budget and steps.max() > MIN_STEP and stall < STAGNATION_GENERATIONS:
                pick = rng.integers(0, len(pop), self.offspring)
                child_steps = steps[pick] * np.exp(tau * rng.standard_normal(self.offspring))
                children = pop[pick] + child_steps[:, None] * rng.standard_normal(
                    (self.offspring, m)
                )
                children = np.clip(children, 0.0, 1.0)
                child_values = evaluate(children)
                child_steps = child_steps[: len(child_values)]
                children = children[: len(child_values)]

                order = np.argsort(-child_values, kind="stable")[: self.parents]
                pop, steps, values = children[order], child_steps[order], child_values[order]
                if values.max() > best_in_run:
                    best_in_run = values.max()
                    stall = 0
                else:
                    stall += 1
            logger.debug(f"ES restart {restarts} ended at {used}/{budget} evaluations")

        xs = np.vstack(evaluated_x)
        all_values = np.concatenate(evaluated_v)
        best_index = int(np.argmax(all_values))
        return SearchResult(
            best_x=xs[best_index],
            best_value=float(all_values[best_index]),
            best_index=best_index,
            xs=xs,
            values=all_values,
            restarts=restarts + 1,
        )
