"""Coefficient sequences and reproducing kernels.

Covers the Hermite space of smoothness ``alpha`` (coefficients
``r_alpha(k) ~ k**-alpha``) and the unanchored Sobolev space on the unit
cube whose kernel is built from Bernoulli polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hermite import hermite_weighted_table, log_falling_factorial


@dataclass(frozen=True)
class HermiteSpaceParams:
    """Dimension ``s`` and smoothness ``alpha`` of a Hermite space."""

    s: int
    alpha: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"dimension s must be >= 1, got {self.s}")
        if self.alpha < 1:
            raise ValueError(f"smoothness alpha must be >= 1, got {self.alpha}")


def beta_tau(tau: int, k: int) -> float:
    """Falling factorial ``k! / (k - tau)!``, zero when ``k < tau``."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if k < tau:
        return 0.0
    if k <= 170:
        return float(math.factorial(k) // math.factorial(k - tau))
    return math.exp(log_falling_factorial(k, tau))


def r_alpha(alpha: int, k: int) -> float:
    """Hermite coefficient weight ``r_alpha(k) = 1 / sum_{tau=0}^{alpha} beta_tau(k)``.

    The ``tau = 0`` term is taken to be 1, so ``r_alpha(0) = 1``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1.0
    top = min(alpha, k)
    if k <= 170:
        total = sum(math.factorial(k) // math.factorial(k - tau) for tau in range(top + 1))
        return 1.0 / total
    # dominant term first: sum = beta_top * (1 + beta_{top-1}/beta_top + ...)
    log_top = log_falling_factorial(k, top)
    rel = math.fsum(math.exp(log_falling_factorial(k, tau) - log_top) for tau in range(top + 1))
    return math.exp(-log_top) / rel


def r_alpha_array(alpha: int, k) -> np.ndarray:
    """Vectorized :func:`r_alpha` for float-safe ranges (``k**alpha < 1e300``)."""
    k = np.asarray(k, dtype=float)
    total = np.ones(k.shape)
    p = np.ones(k.shape)
    for tau in range(1, alpha + 1):
        p = np.where(k >= tau, p * (k - tau + 1), 0.0)
        total += p
    return 1.0 / total


class CoefficientSequence:
    """``r_alpha`` with optional memoization of the first ``cache_size`` values."""

    def __init__(self, alpha: int, cache_size: int | None = None):
        if alpha < 1:
            raise ValueError("alpha must be >= 1")
        self.alpha = alpha
        self.cache_size = cache_size
        if cache_size:
            self._cached = lru_cache(maxsize=cache_size)(self._compute)
        else:
            self._cached = self._compute

    def _compute(self, k):
        return r_alpha(self.alpha, k)

    def __call__(self, k: int) -> float:
        return self._cached(int(k))


def r_multi(params: HermiteSpaceParams, k) -> float:
    """Product weight ``r_{s,alpha}(k) = prod_j r_alpha(k_j)``."""
    k = list(np.atleast_1d(np.asarray(k, dtype=np.int64)))
    if len(k) != params.s:
        raise ValueError(f"dimension mismatch: expected {params.s} indices, got {len(k)}")
    result = 1.0
    for kj in k:
        result *= r_alpha(params.alpha, int(kj))
    return result


def _hermite_kernel_1d(alpha, x, y, K):
    table = hermite_weighted_table(K, np.array([x, y]))
    r = r_alpha_array(alpha, np.arange(K + 1))
    # H_k(x) H_k(y) = psi_k(x) psi_k(y) / sqrt(phi(x) phi(y))
    weighted = math.fsum(r * table[:, 0] * table[:, 1])
    return weighted * math.exp(0.25 * (x * x + y * y)) * math.sqrt(2.0 * math.pi)


def hermite_kernel(params: HermiteSpaceParams, x, y, K: int) -> float:
    """Truncated reproducing kernel ``sum_{k in {0..K}^s} r_{s,alpha}(k) H_k(x) H_k(y)``.

    The kernel factorizes over coordinates, so this is a product of 1-D
    sums, each accumulated in ascending ``k`` with ``math.fsum``.
    """
    if K < 0:
        raise ValueError("truncation K must be nonnegative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size != params.s or y.size != params.s:
        raise ValueError(f"expected vectors of length {params.s}")
    result = 1.0
    for xj, yj in zip(x, y):
        result *= _hermite_kernel_1d(params.alpha, float(xj), float(yj), K)
    return result


# Bernoulli polynomial coefficients, constant term first.
_F = Fraction
BERNOULLI_COEFFS = (
    (_F(1),),
    (_F(-1, 2), _F(1)),
    (_F(1, 6), _F(-1), _F(1)),
    (_F(0), _F(1, 2), _F(-3, 2), _F(1)),
    (_F(-1, 30), _F(0), _F(1), _F(-2), _F(1)),
    (_F(0), _F(-1, 6), _F(0), _F(5, 3), _F(-5, 2), _F(1)),
    (_F(1, 42), _F(0), _F(-1, 2), _F(0), _F(5, 2), _F(-3), _F(1)),
    (_F(0), _F(1, 6), _F(0), _F(-7, 6), _F(0), _F(7, 2), _F(-7, 2), _F(1)),
    (_F(-1, 30), _F(0), _F(2, 3), _F(0), _F(-7, 3), _F(0), _F(14, 3), _F(-4), _F(1)),
)
MAX_SOBOLEV_ALPHA = 4


def bernoulli_poly(r: int, x):
    """Bernoulli polynomial ``B_r(x)`` for ``0 <= r <= 8`` and ``x`` in ``[0, 1]``."""
    if not 0 <= r < len(BERNOULLI_COEFFS):
        raise ValueError(f"Bernoulli degree must be in 0..8, got {r}")
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("Bernoulli polynomial argument outside [0, 1]")
    coeffs = [float(c) for c in BERNOULLI_COEFFS[r]]
    out = np.zeros(arr.shape)
    for c in reversed(coeffs):
        out = out * arr + c
    return float(out) if arr.ndim == 0 else out


def sobolev_kernel_1d(alpha: int, x, y):
    """1-D kernel ``sum_r B_r(x)B_r(y)/(r!)^2 + (-1)^(alpha+1) B_{2alpha}(|x-y|)/(2alpha)!``.

    Broadcasts over ``x`` and ``y``.
    """
    if not 1 <= alpha <= MAX_SOBOLEV_ALPHA:
        raise ValueError(f"Sobolev kernel supports 1 <= alpha <= {MAX_SOBOLEV_ALPHA}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x < 0) | (x >= 1)) or np.any((y < 0) | (y >= 1)):
        raise ValueError("Sobolev kernel arguments must lie in [0, 1)")
    total = np.zeros(np.broadcast(x, y).shape)
    for r in range(alpha + 1):
        total = total + bernoulli_poly(r, x) * bernoulli_poly(r, y) / math.factorial(r) ** 2
    sign = -1.0 if alpha % 2 == 0 else 1.0
    return total + sign * bernoulli_poly(2 * alpha, np.abs(x - y)) / math.factorial(2 * alpha)


def sobolev_kernel(alpha: int, x, y) -> float:
    """Product kernel of the unanchored Sobolev space on ``[0, 1)^s``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("x and y must have the same dimension")
    return float(np.prod(sobolev_kernel_1d(alpha, x, y)))
