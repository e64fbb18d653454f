"""Worst-case errors of quadrature rules.

For a 1-D rule ``sum_i w_i f(x_i)`` in the Hermite space of smoothness
``alpha`` the squared worst-case error is the coefficient series

    e^2 = (1 - sum_i w_i)^2 + sum_{k>=1} r_alpha(k) (sum_i w_i H_k(x_i))^2,

evaluated here up to ``k = m`` with a rigorous bound on the remainder.
For equal-weight rules on the unit cube the Sobolev-space error follows
from the kernel double sum.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .rules import QuadratureRule
from .spaces import HermiteSpaceParams, MAX_SOBOLEV_ALPHA, sobolev_kernel_1d

DEFAULT_TRUNCATION = 5 * 10**7
_QUARTER_LOG_2PI = 0.25 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class WceReport:
    """Truncated worst-case error ``e_m`` and its bookkeeping.

    ``tail_bound`` bounds ``e_inf - e_m`` from above.
    """

    value: float
    m: int
    bias_term: float
    tail_bound: float
    terms: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "WceReport":
        return cls(**json.loads(text))


def _check_1d(rule: QuadratureRule):
    if rule.s != 1:
        raise ValueError(f"the Hermite series error is implemented for s = 1 only, got s = {rule.s}")


def hermite_moments(rule: QuadratureRule, m: int, nthreads: int = 1) -> np.ndarray:
    """``S_k = sum_i w_i H_k(x_i)`` for ``k = 0..m``."""
    _check_1d(rule)
    x = np.ascontiguousarray(rule.nodes[:, 0])
    w = np.ascontiguousarray(rule.weights)
    return kernels.hermite_moments(x, w, int(m), int(nthreads))


def series_tail_bound(alpha: int, rule: QuadratureRule, m: int) -> float:
    """Upper bound on ``sum_{k>m} r_alpha(k) S_k^2``.

    Uses ``|S_k| <= C sigma(k)`` with ``C = sum |w_i| / sqrt(phi(x_i))`` and
    ``sigma(k)^2 <= pi k^(-1/6)``, then ``r_alpha(k) <= (k - alpha + 1)^-alpha``
    for ``k > alpha`` and an integral comparison. Degrees ``m < k <= alpha``
    are bounded term by term with ``r_alpha(k) <= 1/k!``.
    """
    x = rule.nodes[:, 0]
    with np.errstate(divide="ignore"):
        log_c = np.log(np.abs(rule.weights)) + 0.25 * x * x + _QUARTER_LOG_2PI
        c = math.fsum(np.exp(log_c[np.isfinite(log_c)]))
    if c == 0.0:
        return 0.0
    total = 0.0
    for k in range(m + 1, alpha + 1):
        total += min(1.0, math.pi / k ** (1.0 / 6.0)) / math.factorial(k)
    p = alpha - 5.0 / 6.0
    j_start = max(m, alpha) + 1 - alpha + 1
    total += math.pi * (j_start - 1) ** (-p) / p
    return c * c * total


def wce_hermite_1d(alpha: int, rule: QuadratureRule, m: int = DEFAULT_TRUNCATION,
                   nthreads: int = 1) -> WceReport:
    """Truncated worst-case error ``e_m`` of a 1-D rule in the Hermite space.

    The moments ``S_k`` for all nodes advance together through the
    recurrence, so memory is ``O(N)`` and time ``O(N m)``. The reduction
    order is fixed, so the value does not depend on ``nthreads``.
    """
    _check_1d(rule)
    HermiteSpaceParams(1, alpha)
    if m < 1:
        raise ValueError(f"truncation m must be >= 1, got {m}")
    x = np.ascontiguousarray(rule.nodes[:, 0])
    w = np.ascontiguousarray(rule.weights)
    _, series = kernels.hermite_series(x, w, int(alpha), int(m), int(nthreads))
    bias = (1.0 - math.fsum(w)) ** 2
    sq = bias + series
    value = math.sqrt(sq)
    tail = series_tail_bound(alpha, rule, m)
    # e_inf - e_m <= sqrt(sq + tail) - sqrt(sq)
    tail_bound = tail / (math.sqrt(sq + tail) + value) if tail > 0 else 0.0
    if not (math.isfinite(value) and math.isfinite(tail_bound)):
        raise FloatingPointError("non-finite worst-case error")
    return WceReport(value=value, m=int(m), bias_term=bias, tail_bound=tail_bound, terms=int(m))


def _unit_cube_points(rule):
    if isinstance(rule, QuadratureRule):
        N = rule.size
        if not np.allclose(rule.weights, 1.0 / N, rtol=1e-12, atol=0.0):
            raise ValueError("the Sobolev error formula needs equal weights 1/N")
        return rule.nodes
    pts = np.asarray(rule, dtype=float)
    return pts[:, None] if pts.ndim == 1 else pts


def wce_sobolev(alpha: int, rule, squared: bool = False) -> float:
    """Worst-case error of an equal-weight rule in the unanchored Sobolev space.

    ``e^2 = -1 + N^-2 sum_{i,j} prod_c K_alpha(x_ic, x_jc)``; ``rule`` may be
    a :class:`QuadratureRule` or an ``(N, s)`` array of points in ``[0, 1)^s``.
    """
    if not 1 <= alpha <= MAX_SOBOLEV_ALPHA:
        raise ValueError(f"Sobolev error supports 1 <= alpha <= {MAX_SOBOLEV_ALPHA}")
    pts = _unit_cube_points(rule)
    N = pts.shape[0]
    gram = np.ones((N, N))
    for c in range(pts.shape[1]):
        gram *= sobolev_kernel_1d(alpha, pts[:, c][:, None], pts[:, c][None, :])
    e2 = math.fsum(gram.ravel()) / (N * N) - 1.0
    if squared:
        return e2
    return math.sqrt(max(e2, 0.0))


def err1_bound(params: HermiteSpaceParams, b: float) -> float:
    """Gaussian mass outside ``[-b, b]^s`` bound ``1 - (1 - exp(-b^2/4))^s``."""
    if not b > 0:
        raise ValueError("b must be positive")
    return -math.expm1(params.s * math.log1p(-math.exp(-0.25 * b * b)))


def _gderiv_coeffs(alpha):
    # g(z) = (z - z^2)^alpha; coefficients of the alpha-th derivative, constant first
    return [Fraction((-1) ** k * math.comb(alpha, k) * math.factorial(alpha + k), math.factorial(k))
            for k in range(alpha + 1)]


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def inthelp_oracle(alpha: int, a: float, b: float) -> float:
    """``int_0^1 g^(alpha)(z) g^(alpha)(b z + a) dz`` by exact polynomial arithmetic."""
    if not 1 <= alpha <= MAX_SOBOLEV_ALPHA:
        raise ValueError(f"alpha must be in 1..{MAX_SOBOLEV_ALPHA}")
    c = _gderiv_coeffs(alpha)
    fa, fb = Fraction(a), Fraction(b)
    shifted = [Fraction(0)]
    power = [Fraction(1)]
    for ck in c:
        shifted = [u + ck * v for u, v in
                   zip(shifted + [Fraction(0)] * (len(power) - len(shifted)), power)]
        power = _poly_mul(power, [fa, fb])
    prod = _poly_mul(c, shifted)
    return float(sum(coef / (j + 1) for j, coef in enumerate(prod)))


def inthelp_closed_form(alpha: int, b: float) -> float:
    """``(alpha!)^2 / (2 alpha + 1) * b^alpha``."""
    return math.factorial(alpha) ** 2 / (2 * alpha + 1) * b**alpha
