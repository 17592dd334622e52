import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from ehvikit.core.criteria import CriterionEvaluator
from ehvikit.core.errors import ProblemEvaluationError
from ehvikit.core.hypervolume import hypervolume
from ehvikit.core.pareto import ParetoApprox, clip_to_reference, nd_filter
from ehvikit.models.kriging import KrigingModel, fit, predict_multi_many
from ehvikit.models.problem import Problem
from ehvikit.models.schemas import RunConfig
from ehvikit.services.benchmarks import PUBLISHED_MOBGO_HV, parse_problem_name
from ehvikit.services.inner_search import EvolutionStrategy

logger = logging.getLogger(__name__)


@dataclass
class Archive:
    """Every evaluated (x, y) pair and the non-dominated front of the ys."""

    m: int
    d: int
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    front: ParetoApprox | None = None

    def __post_init__(self):
        if self.front is None:
            self.front = ParetoApprox.empty(self.d)

    @property
    def g(self) -> int:
        return len(self.xs)

    def add(self, x: np.ndarray, y: np.ndarray):
        self.xs.append(np.asarray(x, dtype=float))
        self.ys.append(np.asarray(y, dtype=float))
        self.front = nd_filter(np.vstack((self.front.points, self.ys[-1])))

    def decision_matrix(self) -> np.ndarray:
        return np.vstack(self.xs) if self.xs else np.empty((0, self.m))

    def objective_matrix(self) -> np.ndarray:
        return np.vstack(self.ys) if self.ys else np.empty((0, self.d))


@dataclass
class RunResult:
    archive: Archive
    history: list[tuple[int, float]]
    models: list[KrigingModel] = field(default_factory=list)

    @property
    def final_hv(self) -> float:
        return self.history[-1][1] if self.history else 0.0


def lhs(eta: int, bounds: Sequence[Sequence[float]], seed: int) -> np.ndarray:
    """Latin hypercube sample of ``eta`` points inside ``bounds``, one per stratum."""
    if eta < 1:
        raise ValueError(f"eta must be at least 1, got {eta}")
    bounds = np.asarray(bounds, dtype=float)
    sampler = qmc.LatinHypercube(d=len(bounds), seed=seed)
    return qmc.scale(sampler.random(eta), bounds[:, 0], bounds[:, 1])


def front_hypervolume(front: ParetoApprox, ref: Sequence[float]) -> float:
    """HV counting only the members that strictly dominate ``ref``."""
    return hypervolume(clip_to_reference(front, ref), ref)


def fit_models(
    archive: Archive,
    bounds: np.ndarray,
    cfg: RunConfig,
    previous: Sequence[KrigingModel] | None = None,
) -> list[KrigingModel]:
    """Fits one Kriging model per objective on the distinct archive inputs."""
    xs = archive.decision_matrix()
    ys = archive.objective_matrix()
    _, first = np.unique(xs, axis=0, return_index=True)
    if len(first) < len(xs):
        logger.warning(f"Dropping {len(xs) - len(first)} duplicate training inputs")
        keep = np.sort(first)
        xs, ys = xs[keep], ys[keep]

    def fit_one(k: int) -> KrigingModel:
        theta0 = previous[k].theta if previous else None
        return fit(
            xs,
            ys[:, k],
            budget=cfg.kriging_budget,
            bounds=bounds,
            nugget=cfg.nugget,
            theta0=theta0,
        )

    if cfg.fit_workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.fit_workers) as pool:
            return list(pool.map(fit_one, range(archive.d)))
    return [fit_one(k) for k in range(archive.d)]


def propose(
    models: Sequence[KrigingModel],
    front: ParetoApprox,
    cfg: RunConfig,
    rng: np.random.Generator | None = None,
    optimizer: EvolutionStrategy | None = None,
) -> np.ndarray:
    """
    Finds the decision vector maximizing the infill criterion.

    The inner search runs on the unit box and every point it evaluates is
    scored by the criterion on the models' predictions. If every score is
    zero, the evaluated point with the largest summed predictive variance is
    returned instead.

    Returns:
        The proposed decision vector in the problem's coordinates.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    optimizer = optimizer or EvolutionStrategy()
    bounds = models[0].bounds
    lo, width = bounds[:, 0], bounds[:, 1] - bounds[:, 0]
    ref = cfg.ref_point if cfg.ref_point else None
    evaluator = CriterionEvaluator(front, ref, cfg.criterion)

    def objective(unit: np.ndarray) -> np.ndarray:
        mu, sigma2 = predict_multi_many(models, lo + unit * width, cfg.variance_floor)
        return evaluator(mu, np.sqrt(sigma2))

    result = optimizer.maximize(objective, len(lo), cfg.inner_budget, rng)
    best = result.best_x
    if result.best_value <= 0.0:
        _, sigma2 = predict_multi_many(models, lo + result.xs * width, cfg.variance_floor)
        best = result.xs[int(np.argmax(sigma2.sum(axis=1)))]
        logger.warning(
            f"{cfg.criterion.value.upper()} was zero at all {len(result.xs)} inner "
            f"candidates; proposing the point of maximal predictive variance"
        )
    else:
        logger.debug(
            f"Inner search: best {cfg.criterion.value} {result.best_value:.6g} "
            f"after {len(result.xs)} evaluations, {result.restarts} restarts"
        )
    return lo + best * width


def _evaluate(problem: Problem, x: np.ndarray, archive: Archive, history: list):
    try:
        y = problem.evaluate(x)
    except Exception as e:
        logger.error(f"Evaluation {archive.g + 1} of {problem.name} failed: {e}")
        raise ProblemEvaluationError(
            f"{problem.name} failed at evaluation {archive.g + 1}: {e}", archive, history
        ) from e
    if not np.all(np.isfinite(y)):
        raise ProblemEvaluationError(
            f"{problem.name} returned non-finite objectives {y.tolist()}", archive, history
        )
    return y


def _record(archive: Archive, history: list, x, y, ref):
    archive.add(x, y)
    history.append((archive.g, front_hypervolume(archive.front, ref)))


def _validate(problem: Problem, cfg: RunConfig) -> np.ndarray:
    if cfg.eta < problem.m + 1:
        raise ValueError(f"eta ({cfg.eta}) must be at least m + 1 ({problem.m + 1})")
    if len(cfg.ref_point) != problem.d:
        raise ValueError(
            f"Reference point has {len(cfg.ref_point)} coordinates, "
            f"{problem.name} has {problem.d} objectives"
        )
    return np.asarray(cfg.ref_point, dtype=float)


def _log_published(problem: Problem, cfg: RunConfig, final_hv: float):
    try:
        problem_id = parse_problem_name(problem.name)
    except ValueError:
        return
    published = PUBLISHED_MOBGO_HV.get((problem_id, problem.m, cfg.criterion.value))
    if published is not None:
        logger.info(
            f"{problem.name}: final HV {final_hv:.6g} after {cfg.tc} evaluations; "
            f"published {cfg.criterion.value.upper()}-MOBGO mean after 300 is {published:.6g}"
        )


def run(problem: Problem, cfg: RunConfig) -> RunResult:
    """
    Runs MOBGO: LHS initialization, then fit, propose, evaluate until tc.

    The initial sample counts toward ``tc``. The HV history gets one entry
    per evaluation.

    Raises:
        ProblemEvaluationError: An evaluation failed; it carries the partial
            archive and history.
    """
    ref = _validate(problem, cfg)
    archive = Archive(m=problem.m, d=problem.d)
    history: list[tuple[int, float]] = []
    logger.info(
        f"Starting {cfg.criterion.value.upper()}-MOBGO on {problem.name} "
        f"(m={problem.m}, d={problem.d}, eta={cfg.eta}, tc={cfg.tc}, seed={cfg.seed})"
    )

    for x in lhs(cfg.eta, problem.bounds, cfg.seed):
        _record(archive, history, x, _evaluate(problem, x, archive, history), ref)
    logger.info(f"Initial design: {archive.front.n} non-dominated, HV {history[-1][1]:.6g}")

    models: list[KrigingModel] = []
    while archive.g < cfg.tc:
        models = fit_models(archive, problem.bounds, cfg, previous=models)
        rng = np.random.default_rng([cfg.seed, archive.g])
        x = propose(models, archive.front, cfg, rng=rng)
        _record(archive, history, x, _evaluate(problem, x, archive, history), ref)
        logger.info(
            f"g={archive.g}/{cfg.tc}: front size {archive.front.n}, HV {history[-1][1]:.6g}"
        )

    _log_published(problem, cfg, history[-1][1])
    return RunResult(archive=archive, history=history, models=models)


def run_lhs_baseline(problem: Problem, cfg: RunConfig) -> RunResult:
    """Spends the whole budget ``tc`` on one Latin hypercube sample."""
    ref = _validate(problem, cfg)
    archive = Archive(m=problem.m, d=problem.d)
    history: list[tuple[int, float]] = []
    for x in lhs(cfg.tc, problem.bounds, cfg.seed):
        _record(archive, history, x, _evaluate(problem, x, archive, history), ref)
    logger.info(f"LHS baseline on {problem.name}: HV {history[-1][1]:.6g} after {cfg.tc}")
    return RunResult(archive=archive, history=history)
