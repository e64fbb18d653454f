"""Normalized probabilists' Hermite polynomials and related bounds.

``H_k`` is normalized so that ``int H_k^2 phi = 1`` for the standard normal
density ``phi``. Values are produced by the three-term recurrence

    H_{k+1}(x) = (x H_k(x) - sqrt(k) H_{k-1}(x)) / sqrt(k + 1)

with power-of-two rescaling, so degrees up to ``10**8`` are reachable.
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import kernels

MAX_DEGREE = 10**8
_LOG_2PI = math.log(2.0 * math.pi)


class DegreeOverflowError(ValueError):
    """Requested Hermite degree is above the configured maximum."""


def _check_degree(k, max_degree):
    if k < 0:
        raise ValueError(f"Hermite degree must be nonnegative, got {k}")
    if k > max_degree:
        raise DegreeOverflowError(f"degree {k} exceeds max degree {max_degree}")


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return np.ascontiguousarray(arr.ravel()), arr.shape, arr.ndim == 0


def _finish(values, shape, scalar):
    values = values.reshape(shape)
    return float(values) if scalar else values


def hermite(k: int, x, max_degree: int = MAX_DEGREE):
    """Evaluate ``H_k(x)``.

    Returns ``inf`` (with the correct sign) when the value lies outside the
    double range, which happens for large ``k * x**2``; use
    :func:`hermite_weighted` in that regime.
    """
    _check_degree(k, max_degree)
    flat, shape, scalar = _as_array(x)
    mant, _, ex = kernels.hermite_scaled(int(k), flat, False)
    with np.errstate(over="ignore"):
        return _finish(np.ldexp(mant, ex), shape, scalar)


def hermite_weighted(k: int, x, max_degree: int = MAX_DEGREE):
    """Evaluate ``H_k(x) * sqrt(phi(x))`` without intermediate overflow.

    The result satisfies ``|value| <= 1`` (Cramér's inequality).
    """
    _check_degree(k, max_degree)
    flat, shape, scalar = _as_array(x)
    mant, _, ex = kernels.hermite_scaled(int(k), flat, True)
    return _finish(np.ldexp(mant, ex), shape, scalar)


def hermite_weighted_table(kmax: int, x) -> np.ndarray:
    """Array ``T[k, i] = H_k(x_i) sqrt(phi(x_i))`` for ``k = 0..kmax``."""
    _check_degree(kmax, MAX_DEGREE)
    flat = np.ascontiguousarray(np.asarray(x, dtype=float).ravel())
    return kernels.weighted_table(int(kmax), flat)


def hermite_multi(k, x) -> float:
    """Tensor-product polynomial ``prod_j H_{k_j}(x_j)``."""
    k = np.asarray(k, dtype=np.int64).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if k.shape != x.shape:
        raise ValueError(f"dimension mismatch: len(k)={k.size}, len(x)={x.size}")
    if np.any(k < 0):
        raise ValueError("Hermite multi-index entries must be nonnegative")
    result = 1.0
    for kj, xj in zip(k, x):
        result *= hermite(int(kj), float(xj))
    return result


class GaussianDensity:
    """Standard Gaussian density on ``R^s``."""

    def __init__(self, s: int):
        if s < 1:
            raise ValueError("dimension must be positive")
        self.s = s

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.s:
            raise ValueError(f"expected trailing dimension {self.s}, got {x.shape[-1]}")
        return np.exp(-0.5 * np.sum(x * x, axis=-1) - 0.5 * self.s * _LOG_2PI)

    def log(self, x):
        x = np.asarray(x, dtype=float)
        return -0.5 * np.sum(x * x, axis=-1) - 0.5 * self.s * _LOG_2PI


def gaussian_density(x) -> np.ndarray:
    """1-D standard normal density, elementwise."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x - 0.5 * _LOG_2PI)


def sigma_bound(k) -> float:
    """Upper bound ``prod_j min(1, sqrt(pi) / k_j**(1/12))`` on ``sup |H_k sqrt(phi_s)|``."""
    result = 1.0
    for kj in np.atleast_1d(np.asarray(k, dtype=float)):
        if kj < 0:
            raise ValueError("multi-index entries must be nonnegative")
        if kj > 0:
            result *= min(1.0, math.sqrt(math.pi) / kj ** (1.0 / 12.0))
    return result


def log_falling_factorial(k: int, tau: int) -> float:
    """``log(k! / (k - tau)!)`` for ``k >= tau >= 0``.

    Short products are summed term by term; the log-gamma difference
    cancels badly when ``k`` is large and ``tau`` small.
    """
    if tau <= 256:
        return math.fsum(math.log(k - j) for j in range(tau))
    return math.lgamma(k + 1) - math.lgamma(k - tau + 1)


def hermite_derivative_factor(k: int, tau: int) -> float:
    """Factor ``sqrt(k! / (k - tau)!)`` in ``d^tau/dx^tau H_k = factor * H_{k-tau}``; zero if ``k < tau``."""
    if k < tau:
        return 0.0
    if k <= 170:
        return math.sqrt(math.factorial(k) / math.factorial(k - tau))
    return math.exp(0.5 * log_falling_factorial(k, tau))
