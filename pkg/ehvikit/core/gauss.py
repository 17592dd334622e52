"""Scalar Gaussian kernels behind the closed-form EHVI and PoI integrals.

All functions take the argument order (a, b, mu, sigma). The ``*_array``
variants broadcast over numpy arrays and accept infinite bounds.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr
from scipy.stats import norm


@dataclass(frozen=True)
class Gauss1D:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be strictly positive, got {self.sigma}")


def std_phi(s: float) -> float:
    """Standard normal density; 0 at ±∞."""
    return float(norm.pdf(s))


def std_cdf(s: float) -> float:
    """Standard normal CDF, exactly 0 at -∞ and 1 at +∞."""
    return float(ndtr(s))


def psi_inf_array(a, b, mu, sigma) -> np.ndarray:
    """
    Vectorized ∫_b^∞ (z − a) ξ_{μ,σ}(z) dz.

    Equal to σ·φ((b−μ)/σ) + (μ−a)·(1 − Φ((b−μ)/σ)); exactly 0 where b = +∞.
    """
    a, b, mu, sigma = np.broadcast_arrays(
        np.asarray(a, dtype=float),
        np.asarray(b, dtype=float),
        np.asarray(mu, dtype=float),
        np.asarray(sigma, dtype=float),
    )
    s = (b - mu) / sigma
    tail = norm.sf(s)
    out = sigma * norm.pdf(s) + (mu - a) * tail
    return np.where(np.isposinf(b), 0.0, out)


def vartheta_array(l, u, mu, sigma) -> np.ndarray:
    """Vectorized (u − l)·(1 − Φ((u − μ)/σ)); exactly 0 where u = +∞."""
    l, u, mu, sigma = np.broadcast_arrays(
        np.asarray(l, dtype=float),
        np.asarray(u, dtype=float),
        np.asarray(mu, dtype=float),
        np.asarray(sigma, dtype=float),
    )
    finite = np.isfinite(u)
    u_safe = np.where(finite, u, 0.0)
    l_safe = np.where(finite, l, 0.0)
    out = (u_safe - l_safe) * norm.sf((u_safe - mu) / sigma)
    return np.where(finite, out, 0.0)


def psi_inf(a: float, b: float, g: Gauss1D) -> float:
    return float(psi_inf_array(a, b, g.mu, g.sigma))


def vartheta(l: float, u: float, g: Gauss1D) -> float:
    if not l < u:
        raise ValueError(f"vartheta needs l < u, got l={l}, u={u}")
    return float(vartheta_array(l, u, g.mu, g.sigma))


def ell(u: float, y: float, l: float) -> float:
    """One-dimensional improvement min(u, y) − l on the improving range."""
    if y < l:
        raise ValueError(f"ell is only defined for y >= l, got y={y}, l={l}")
    return min(u, y) - l
