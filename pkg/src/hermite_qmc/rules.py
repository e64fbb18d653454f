"""Quadrature rules for the standard Gaussian measure.

Three families are provided:

* ``paper_rule``: a net on the unit cube mapped affinely onto ``[-b, b]^s``
  with ``b = 2 sqrt(alpha ln N)`` and weights ``(2b)^s / N * phi_s(x)``.
* ``gauss_hermite``: probabilists' Gauss-Hermite rules.
* ``icdf_rule``: a net mapped through the Gaussian quantile function.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import erfc

from ._backend import kernels
from .hermite import GaussianDensity, hermite_weighted_table
from .spaces import HermiteSpaceParams

GAUSS_HERMITE_MAX_NODES = 1024
TENSOR_BUDGET = 10**6
_SQRT2 = math.sqrt(2.0)
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes ``(N, s)`` and weights ``(N,)``; arrays are stored read-only."""

    nodes: np.ndarray
    weights: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        weights = np.array(self.weights, dtype=float).ravel()
        if nodes.ndim != 2 or nodes.shape[0] != weights.size:
            raise ValueError(f"{nodes.shape[0]} nodes but {weights.size} weights")
        if weights.size < 1:
            raise ValueError("a rule needs at least one node")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("nodes must be finite")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def s(self) -> int:
        return self.nodes.shape[1]

    def apply(self, f) -> float:
        """``sum_i w_i f(x_i)`` with ``f`` evaluated on the ``(N, s)`` node array."""
        return math.fsum(self.weights * np.asarray(f(self.nodes), dtype=float))

    def to_csv(self, sink=None):
        """Write ``x_1,...,x_s,weight`` rows with 17 significant digits."""
        own = sink is None
        sink = io.StringIO() if own else sink
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow([f"x_{j + 1}" for j in range(self.s)] + ["weight"])
        for node, w in zip(self.nodes, self.weights):
            writer.writerow([format(v, ".17g") for v in node] + [format(w, ".17g")])
        return sink.getvalue() if own else None

    @classmethod
    def from_csv(cls, source):
        if isinstance(source, str):
            source = io.StringIO(source)
        rows = list(csv.reader(source))
        header, body = rows[0], rows[1:]
        if not header or header[-1] != "weight":
            raise ValueError("CSV header must end with 'weight'")
        data = np.array([[float(v) for v in row] for row in body], dtype=float)
        data = data.reshape(len(body), len(header))
        return cls(nodes=data[:, :-1], weights=data[:, -1])


@dataclass(frozen=True)
class CubeMap:
    """Affine map ``z -> 2 b z - b`` from ``[0, 1]^s`` onto ``[-b, b]^s``."""

    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"half-width b must be positive, got {self.b}")

    def apply(self, z):
        z = np.asarray(z, dtype=float)
        if np.any((z < 0.0) | (z > 1.0)):
            raise ValueError("cube map argument outside [0, 1]")
        return 2.0 * self.b * z - self.b


def cube_map_apply(cmap: CubeMap, z):
    return cmap.apply(z)


def paper_half_width(alpha: int, N: int) -> float:
    """``b = 2 sqrt(alpha ln N)``."""
    if N < 2:
        raise ValueError(f"need N >= 2 so that ln N > 0, got {N}")
    return 2.0 * math.sqrt(alpha * math.log(N))


def paper_rule(params: HermiteSpaceParams, points) -> QuadratureRule:
    """Map ``N`` unit-cube points to ``[-b, b]^s`` and weight by the Gaussian density."""
    z = np.asarray(points, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    if z.shape[1] != params.s:
        raise ValueError(f"points have dimension {z.shape[1]}, expected {params.s}")
    N = z.shape[0]
    b = paper_half_width(params.alpha, N)
    nodes = CubeMap(b).apply(z)
    weights = (2.0 * b) ** params.s / N * GaussianDensity(params.s)(nodes)
    return QuadratureRule(nodes, weights, {"family": "hodnet", "alpha": params.alpha, "b": b, "N": N})


def _polish_roots(x, N):
    # Newton on H_N using H_N' = sqrt(N) H_{N-1}; both come on a common scale.
    for _ in range(3):
        hk, hkm1, _ = kernels.hermite_scaled(N, np.ascontiguousarray(x), True)
        x = x - hk / (math.sqrt(N) * hkm1)
    return x


def gauss_hermite(N: int) -> QuadratureRule:
    """Probabilists' Gauss-Hermite rule with ``N`` nodes (weights sum to 1).

    Nodes are eigenvalues of the Jacobi matrix, refined by Newton steps.
    Weights use the Christoffel function ``1 / sum_{k<N} H_k(x)^2``, which
    keeps tiny tail weights accurate to full relative precision.
    """
    if not 1 <= N <= GAUSS_HERMITE_MAX_NODES:
        raise ValueError(f"Gauss-Hermite size must be in 1..{GAUSS_HERMITE_MAX_NODES}, got {N}")
    if N == 1:
        return QuadratureRule(np.zeros((1, 1)), np.ones(1), {"family": "gauss-hermite", "N": 1})
    x = eigh_tridiagonal(np.zeros(N), np.sqrt(np.arange(1.0, N)), eigvals_only=True)
    x = _polish_roots(np.sort(x), N)
    x = 0.5 * (x - x[::-1])
    if N % 2:
        x[N // 2] = 0.0
    psi = hermite_weighted_table(N - 1, x)
    # psi_k^2 = H_k^2 phi, so w = phi / sum psi_k^2, formed in logs
    log_phi = -0.5 * x * x - 0.5 * _LOG_2PI
    w = np.exp(log_phi - np.log(np.sum(psi * psi, axis=0)))
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(x[:, None], w, {"family": "gauss-hermite", "N": N})


def gauss_hermite_tensor(N_1d: int, s: int, budget: int = TENSOR_BUDGET) -> QuadratureRule:
    """Full tensor product of the ``N_1d``-point rule in ``s`` dimensions."""
    if s < 1:
        raise ValueError("dimension must be positive")
    if N_1d**s > budget:
        raise ValueError(f"{N_1d}**{s} nodes exceed the budget of {budget}")
    base = gauss_hermite(N_1d)
    x1 = base.nodes[:, 0]
    w1 = base.weights
    idx = np.array(list(itertools.product(range(N_1d), repeat=s)), dtype=np.int64)
    nodes = x1[idx]
    weights = np.prod(w1[idx], axis=1)
    return QuadratureRule(nodes, weights, {"family": "gauss-hermite-tensor", "N_1d": N_1d, "s": s})


def normal_cdf(x):
    """Standard normal CDF via ``erfc`` (accurate in both tails)."""
    return 0.5 * erfc(-np.asarray(x, dtype=float) / _SQRT2)


# Acklam's rational approximation (relative error about 1.15e-9).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _polyval(coeffs, x):
    out = np.zeros_like(x)
    for c in coeffs:
        out = out * x + c
    return out


def _acklam_lower(p):
    # valid for 0 < p <= 0.5
    x = np.empty_like(p)
    tail = p < _P_LOW
    q = np.sqrt(-2.0 * np.log(p[tail]))
    x[tail] = _polyval(_C, q) / (_polyval(_D, q) * q + 1.0)
    mid = ~tail
    q = p[mid] - 0.5
    r = q * q
    x[mid] = _polyval(_A, r) * q / (_polyval(_B, r) * r + 1.0)
    return x


def inverse_normal_cdf(p):
    """Gaussian quantile ``Phi^{-1}(p)`` for ``0 < p < 1``.

    Rational approximation followed by one Halley step on
    ``Phi(x) - p``. Upper-half inputs are reflected through ``1 - p``
    (exact for ``p >= 0.5``) so the result is odd about ``p = 0.5``.
    """
    arr = np.asarray(p, dtype=float)
    flat = arr.ravel()
    if np.any(~((flat > 0.0) & (flat < 1.0))):
        raise ValueError("inverse normal CDF needs 0 < p < 1")
    upper = flat > 0.5
    lo = np.where(upper, 1.0 - flat, flat)
    x = _acklam_lower(lo)
    e = normal_cdf(x) - lo
    u = e * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    x = np.where(upper, -x, x)
    x[flat == 0.5] = 0.0
    x = x.reshape(arr.shape)
    return float(x) if arr.ndim == 0 else x


def icdf_rule(points, spacing: float | None = None) -> QuadratureRule:
    """Equal-weight rule with nodes ``Phi^{-1}(z_i)`` componentwise.

    Coordinates equal to 0 are moved to ``spacing / 2``, where ``spacing``
    is the net's digit resolution (e.g. ``2**-n``); it is required when any
    coordinate is zero.
    """
    z = np.array(points, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    zero = z == 0.0
    if zero.any():
        if spacing is None or not 0 < spacing < 1:
            raise ValueError("points contain 0; pass the net spacing to shift them")
        z[zero] = 0.5 * spacing
    nodes = inverse_normal_cdf(z)
    N = z.shape[0]
    return QuadratureRule(nodes, np.full(N, 1.0 / N), {"family": "icdf-qmc", "N": N})


RULE_FAMILIES = ("hodnet", "gauss-hermite", "icdf-qmc")


def build_rule(family: str, alpha: int, log2n: int, interlace_factor: int | None = None,
               direction_source="embedded") -> QuadratureRule:
    """Construct the 1-D rule with ``N = 2**log2n`` nodes for a study family."""
    from .nets import interlaced_sobol

    if family not in RULE_FAMILIES:
        raise ValueError(f"unknown rule family {family!r}")
    if family == "gauss-hermite":
        return gauss_hermite(2**log2n)
    d = alpha if interlace_factor is None else interlace_factor
    points, precision = interlaced_sobol(1, log2n, d, direction_source)
    if family == "hodnet":
        rule = paper_rule(HermiteSpaceParams(1, alpha), points)
    else:
        # zero moves to half the base net's digit spacing, i.e. 1/(2N)
        rule = icdf_rule(points, spacing=2.0**-log2n)
    rule.metadata.update(interlace_factor=d, precision=precision)
    return rule
