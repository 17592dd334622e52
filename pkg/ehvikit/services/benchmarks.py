import logging

import numpy as np

from ehvikit.core.pareto import ParetoApprox, nd_filter
from ehvikit.models.enums import FrontKindEnum
from ehvikit.models.problem import Problem
from ehvikit.models.schemas import FrontSpec

logger = logging.getLogger(__name__)

SUPPORTED_DTLZ = (1, 2, 3, 4, 5, 7)
DTLZ4_ALPHA = 100.0

# Reference points in the minimization sense; DTLZ7 holds (leading, last).
DTLZ_REFERENCE = {1: 400.0, 2: 2.5, 3: 1500.0, 4: 2.5, 5: 11.0, 7: (1.0, 10.0)}

# Published mean HV after 300 evaluations, keyed by (id, m, criterion).
PUBLISHED_MOBGO_HV = {
    (1, 6, "ehvi"): 6.39587e7,
    (1, 6, "poi"): 6.33975e7,
    (2, 6, "ehvi"): 1.50203e1,
    (2, 6, "poi"): 1.49975e1,
    (3, 6, "ehvi"): 3.37451e9,
    (3, 6, "poi"): 3.36952e9,
    (4, 6, "ehvi"): 1.37964e1,
    (4, 6, "poi"): 1.44561e1,
    (5, 6, "ehvi"): 1.31728e3,
    (5, 6, "poi"): 1.31883e3,
    (7, 6, "ehvi"): 5.08646e0,
    (7, 6, "poi"): 4.06894e0,
    (1, 18, "ehvi"): 5.1288e7,
    (1, 18, "poi"): 2.7077e7,
    (2, 18, "ehvi"): 1.2639e1,
    (2, 18, "poi"): 1.4239e1,
    (3, 18, "ehvi"): 3.2911e9,
    (3, 18, "poi"): 2.6798e9,
    (4, 18, "ehvi"): 8.3732e0,
    (4, 18, "poi"): 1.2054e1,
    (5, 18, "ehvi"): 1.3128e3,
    (5, 18, "poi"): 1.3050e3,
    (7, 18, "ehvi"): 4.5911e0,
    (7, 18, "poi"): 1.0198e0,
}


def _g_multimodal(tail: np.ndarray) -> np.ndarray:
    k = tail.shape[1]
    z = tail - 0.5
    return 100.0 * (k + np.sum(z**2 - np.cos(20.0 * np.pi * z), axis=1))


def _g_sphere(tail: np.ndarray) -> np.ndarray:
    return np.sum((tail - 0.5) ** 2, axis=1)


def _linear_front(head: np.ndarray, g: np.ndarray, d: int) -> np.ndarray:
    f = np.empty((len(head), d))
    for i in range(d):
        part = np.prod(head[:, : d - 1 - i], axis=1)
        if i > 0:
            part = part * (1.0 - head[:, d - 1 - i])
        f[:, i] = 0.5 * part * (1.0 + g)
    return f


def _spherical_front(angles: np.ndarray, g: np.ndarray, d: int) -> np.ndarray:
    """Objectives (1+g)·Π cos·sin over angles given in units of π/2."""
    f = np.empty((len(angles), d))
    cos = np.cos(angles * np.pi / 2.0)
    sin = np.sin(angles * np.pi / 2.0)
    for i in range(d):
        part = np.prod(cos[:, : d - 1 - i], axis=1)
        if i > 0:
            part = part * sin[:, d - 1 - i]
        f[:, i] = (1.0 + g) * part
    return f


def dtlz_minimization(problem_id: int, xs: np.ndarray, d: int) -> np.ndarray:
    """Standard DTLZ objectives (to be minimized) for a batch of inputs."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    head, tail = xs[:, : d - 1], xs[:, d - 1 :]

    if problem_id == 1:
        return _linear_front(head, _g_multimodal(tail), d)
    if problem_id == 2:
        return _spherical_front(head, _g_sphere(tail), d)
    if problem_id == 3:
        return _spherical_front(head, _g_multimodal(tail), d)
    if problem_id == 4:
        return _spherical_front(head**DTLZ4_ALPHA, _g_sphere(tail), d)
    if problem_id == 5:
        g = _g_sphere(tail)
        angles = np.empty_like(head)
        angles[:, 0] = head[:, 0]
        angles[:, 1:] = (1.0 + 2.0 * g[:, None] * head[:, 1:]) / (2.0 * (1.0 + g[:, None]))
        return _spherical_front(angles, g, d)
    if problem_id == 7:
        k = tail.shape[1]
        g = 1.0 + 9.0 / k * np.sum(tail, axis=1)
        h = d - np.sum(head / (1.0 + g[:, None]) * (1.0 + np.sin(3.0 * np.pi * head)), axis=1)
        return np.column_stack((head, (1.0 + g) * h))
    raise ValueError(f"Unsupported DTLZ problem id: {problem_id}")


def dtlz(problem_id: int, m: int, d: int = 3) -> Problem:
    """
    Builds a DTLZ problem on [0, 1]^m in the maximization convention.

    Args:
        problem_id: One of 1, 2, 3, 4, 5, 7.
        m: Number of decision variables, at least d.
        d: Number of objectives.

    Returns:
        A Problem whose objectives are the negated DTLZ objectives.
    """
    if problem_id not in SUPPORTED_DTLZ:
        raise ValueError(
            f"Unsupported DTLZ problem id: {problem_id}; choose from {SUPPORTED_DTLZ}"
        )
    if d < 2 or m < d:
        raise ValueError(f"DTLZ needs m >= d >= 2, got m={m}, d={d}")

    def func(xs: np.ndarray) -> np.ndarray:
        return -dtlz_minimization(problem_id, xs, d)

    bounds = np.column_stack((np.zeros(m), np.ones(m)))
    return Problem(name=f"dtlz{problem_id}", m=m, d=d, bounds=bounds, func=func)


def reference_point(problem_id: int, d: int = 3) -> np.ndarray:
    """The DTLZ reference point, negated into the maximization convention."""
    if problem_id not in DTLZ_REFERENCE:
        raise ValueError(f"No reference point for DTLZ problem id {problem_id}")
    value = DTLZ_REFERENCE[problem_id]
    if isinstance(value, tuple):
        leading, last = value
        ref = np.append(np.full(d - 1, leading), last)
    else:
        ref = np.full(d, value)
    return -ref


def parse_problem_name(name: str) -> int:
    """'dtlz2' or 'DTLZ2' -> 2."""
    key = name.strip().lower()
    if not key.startswith("dtlz") or not key[4:].isdigit():
        raise ValueError(f"Unknown problem '{name}'")
    problem_id = int(key[4:])
    if problem_id not in SUPPORTED_DTLZ:
        raise ValueError(f"Unsupported DTLZ problem id: {problem_id}")
    return problem_id


def _shell_points(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    directions = np.abs(rng.standard_normal((count, d)))
    norms = np.linalg.norm(directions, axis=1)
    return directions[norms > 0] / norms[norms > 0, None]


def random_front(spec: FrontSpec) -> ParetoApprox:
    """
    Samples n mutually non-dominated points on a spherical shell.

    Concave fronts lie on the positive orthant of the sphere of radius R;
    convex fronts are the same points reflected to R·(1 − u). The result is
    deterministic for a given spec.
    """
    rng = np.random.default_rng(spec.seed)
    points = np.empty((0, spec.d))
    while len(points) < spec.n:
        shell = _shell_points(rng, spec.n - len(points), spec.d)
        if spec.kind is FrontKindEnum.CONCAVE_SPHERICAL:
            batch = spec.radius * shell
        else:
            batch = spec.radius * (1.0 - shell)
        points = nd_filter(np.vstack((points, batch))).points
    front = ParetoApprox(points[: spec.n])
    logger.debug(
        f"Generated {spec.kind.value} front with n={front.n}, d={front.dim}, seed={spec.seed}"
    )
    return front
