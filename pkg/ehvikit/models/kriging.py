import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from ehvikit.core.criteria import GaussPred
from ehvikit.core.errors import DimensionMismatchError, SurrogateError

logger = logging.getLogger(__name__)

DEFAULT_NUGGET = 1e-10
DEFAULT_BUDGET = 1000
DEFAULT_VARIANCE_FLOOR = 1e-12
LOG10_THETA_BOUNDS = (-3.0, 3.0)


def corr(x: Sequence[float], x2: Sequence[float], theta: Sequence[float]) -> float:
    """Gaussian correlation Π_i exp(−θ_i (x_i − x2_i)²)."""
    x, x2, theta = (np.asarray(v, dtype=float).reshape(-1) for v in (x, x2, theta))
    if not (x.shape == x2.shape == theta.shape):
        raise DimensionMismatchError(
            f"corr needs equal lengths, got {x.shape[0]}, {x2.shape[0]}, {theta.shape[0]}"
        )
    if np.any(theta < 0):
        raise ValueError("theta must be nonnegative")
    return float(np.exp(-np.sum(theta * (x - x2) ** 2)))


def _corr_matrix(a: np.ndarray, b: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.exp(-cdist(a, b, metric="sqeuclidean", w=theta))


@dataclass(frozen=True)
class _Likelihood:
    value: float
    factor: tuple
    mu_hat: float
    sigma2_hat: float
    inv_ones: np.ndarray
    alpha: np.ndarray


def _concentrated(
    x: np.ndarray, y: np.ndarray, theta: np.ndarray, nugget: float
) -> _Likelihood | None:
    n = len(y)
    sigma = _corr_matrix(x, x, theta) + nugget * np.eye(n)
    try:
        factor = cho_factor(sigma, lower=True)
    except LinAlgError:
        return None
    ones = np.ones(n)
    inv_ones = cho_solve(factor, ones)
    mu_hat = float(inv_ones @ y / (ones @ inv_ones))
    resid = y - mu_hat
    alpha = cho_solve(factor, resid)
    sigma2_hat = max(float(resid @ alpha) / n, 0.0)
    log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
    value = -0.5 * n * np.log(max(sigma2_hat, np.finfo(float).tiny)) - 0.5 * log_det
    return _Likelihood(value, factor, mu_hat, sigma2_hat, inv_ones, alpha)


@dataclass(frozen=True, eq=False)
class KrigingModel:
    """Fitted ordinary Kriging state for one objective.

    ``train_x`` is stored normalized to [0, 1]^m using ``bounds``.
    """

    theta: np.ndarray
    mu_hat: float
    sigma2_hat: float
    train_x: np.ndarray
    train_y: np.ndarray
    corr_factor: tuple
    bounds: np.ndarray
    nugget: float
    log_likelihood: float
    inv_ones: np.ndarray
    alpha: np.ndarray

    @property
    def m(self) -> int:
        return self.train_x.shape[1]

    def normalize(self, x: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        return (np.atleast_2d(x) - lo) / (hi - lo)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "mu_hat": self.mu_hat,
            "sigma2_hat": self.sigma2_hat,
            "nugget": self.nugget,
            "log_likelihood": self.log_likelihood,
            "bounds": self.bounds.tolist(),
            "train_x": self.train_x.tolist(),
            "train_y": self.train_y.tolist(),
        }


def _resolve_bounds(xs: np.ndarray, bounds) -> np.ndarray:
    if bounds is None:
        lo, hi = xs.min(axis=0), xs.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        return np.column_stack((lo, hi))
    bounds = np.asarray(bounds, dtype=float)
    if bounds.shape != (xs.shape[1], 2):
        raise DimensionMismatchError(
            f"bounds must have shape ({xs.shape[1]}, 2), got {bounds.shape}"
        )
    return bounds


def log_likelihood(
    xs, ys, theta: Sequence[float], bounds=None, nugget: float = DEFAULT_NUGGET
) -> float:
    """Concentrated log-likelihood −(n/2)ln σ̂² − ½ln|Σ| at ``theta``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float).reshape(-1)
    b = _resolve_bounds(xs, bounds)
    x = (xs - b[:, 0]) / (b[:, 1] - b[:, 0])
    result = _concentrated(x, ys, np.asarray(theta, dtype=float), nugget)
    return -np.inf if result is None else float(result.value)


def fit(
    xs,
    ys,
    budget: int = DEFAULT_BUDGET,
    bounds=None,
    nugget: float = DEFAULT_NUGGET,
    theta0: Sequence[float] | None = None,
) -> KrigingModel:
    """
    Fits an ordinary Kriging model by maximum likelihood.

    θ is searched in log10 space over [1e-3, 1e3]^m by Nelder-Mead, starting
    from θ = 1 (or from ``theta0`` when its likelihood is higher) and
    limited to ``budget`` likelihood evaluations.

    Args:
        xs: (n, m) training inputs, pairwise distinct.
        ys: (n,) training outputs.
        budget: Maximum number of likelihood evaluations.
        bounds: (m, 2) box used to normalize inputs; the data range if None.
        nugget: Diagonal regularization of the correlation matrix.
        theta0: Optional warm start.

    Returns:
        The fitted KrigingModel.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float).reshape(-1)
    n, m = xs.shape
    if n < 2:
        raise SurrogateError(f"Kriging needs at least 2 samples, got {n}")
    if len(ys) != n:
        raise DimensionMismatchError(f"{n} inputs but {len(ys)} outputs")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if len(np.unique(xs, axis=0)) != n:
        raise SurrogateError("Training inputs contain duplicates")

    b = _resolve_bounds(xs, bounds)
    x = (xs - b[:, 0]) / (b[:, 1] - b[:, 0])

    def negative(z: np.ndarray) -> float:
        theta = 10.0 ** np.clip(z, *LOG10_THETA_BOUNDS)
        result = _concentrated(x, ys, theta, nugget)
        return np.inf if result is None else -result.value

    start = np.zeros(m)
    start_value = negative(start)
    if theta0 is not None:
        warm = np.clip(np.log10(np.asarray(theta0, dtype=float)), *LOG10_THETA_BOUNDS)
        warm_value = negative(warm)
        if warm_value < start_value:
            start, start_value = warm, warm_value
    if not np.isfinite(start_value):
        raise SurrogateError("Correlation matrix is not positive definite at the start point")

    best_z, best_value = start, start_value
    if budget > 1:
        result = minimize(
            negative,
            start,
            method="Nelder-Mead",
            bounds=[LOG10_THETA_BOUNDS] * m,
            options={"maxfev": budget - 1, "xatol": 1e-4, "fatol": 1e-8},
        )
        if result.fun < best_value:
            best_z, best_value = result.x, float(result.fun)
        logger.debug(
            f"Likelihood search: {result.nfev} evaluations, "
            f"log-likelihood {-start_value:.6g} -> {-best_value:.6g}"
        )

    theta = 10.0 ** np.clip(best_z, *LOG10_THETA_BOUNDS)
    state = _concentrated(x, ys, theta, nugget)
    return KrigingModel(
        theta=theta,
        mu_hat=state.mu_hat,
        sigma2_hat=state.sigma2_hat,
        train_x=x,
        train_y=ys.copy(),
        corr_factor=state.factor,
        bounds=b,
        nugget=nugget,
        log_likelihood=float(state.value),
        inv_ones=state.inv_ones,
        alpha=state.alpha,
    )


def predict_many(model: KrigingModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of the Kriging predictor at each row of ``xs``."""
    if not isinstance(model, KrigingModel):
        raise SurrogateError("predict needs a fitted KrigingModel")
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != model.m:
        raise DimensionMismatchError(
            f"Query has {xs.shape[1]} inputs, model was fitted on {model.m}"
        )
    c = _corr_matrix(model.normalize(xs), model.train_x, model.theta)
    mu = model.mu_hat + c @ model.alpha

    inv_c = cho_solve(model.corr_factor, c.T)
    ones_inv_ones = model.inv_ones.sum()
    reduction = np.einsum("ij,ji->i", c, inv_c)
    trend = (1.0 - c @ model.inv_ones) ** 2 / ones_inv_ones
    sigma2 = model.sigma2_hat * (1.0 - reduction + trend)
    return mu, np.clip(sigma2, 0.0, None)


def predict(model: KrigingModel, x: Sequence[float]) -> tuple[float, float]:
    mu, sigma2 = predict_many(model, np.asarray(x, dtype=float).reshape(1, -1))
    return float(mu[0]), float(sigma2[0])


def predict_multi(
    models: Sequence[KrigingModel],
    x: Sequence[float],
    variance_floor: float = DEFAULT_VARIANCE_FLOOR,
) -> GaussPred:
    """Stacks per-objective predictions into a GaussPred with floored variances."""
    mu, sigma2 = predict_multi_many(
        models, np.asarray(x, dtype=float).reshape(1, -1), variance_floor
    )
    return GaussPred(mu[0], np.sqrt(sigma2[0]))


def predict_multi_many(
    models: Sequence[KrigingModel], xs, variance_floor: float = DEFAULT_VARIANCE_FLOOR
) -> tuple[np.ndarray, np.ndarray]:
    """(B, d) means and floored variances for a batch of decision vectors."""
    if not models:
        raise SurrogateError("predict_multi needs at least one model")
    if len({model.m for model in models}) != 1:
        raise DimensionMismatchError("Models were fitted on different input dimensions")
    columns = [predict_many(model, xs) for model in models]
    mu = np.column_stack([col[0] for col in columns])
    sigma2 = np.column_stack([col[1] for col in columns])
    return mu, np.maximum(sigma2, variance_floor)
