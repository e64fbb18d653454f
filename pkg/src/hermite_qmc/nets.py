"""Digital nets over prime fields, Sobol' matrices and digit interlacing.

A digital net with generating matrices ``C_1..C_s`` (``n x m`` over F_q)
maps the base-q digits of an index ``h < q**m`` to the point whose j-th
coordinate has digits ``C_j @ digits(h) mod q``. Coordinates are also kept
as exact integers ``x * q**n`` so quality checks do not touch floats.
"""
from __future__ import annotations

import io
import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

# First lines of the Joe-Kuo "new-joe-kuo-6.21201" table (dimensions 2..8).
EMBEDDED_DIRECTION_NUMBERS = """\
d       s       a       m_i
2       1       0       1
3       2       1       1 3
4       3       1       1 3 1
5       3       2       1 1 1
6       4       1       1 1 3 3
7       4       4       1 3 5 13
8       5       2       1 1 5 5 17
"""

MAX_FLOAT_BITS = 53


class DirectionNumberError(ValueError):
    """Malformed direction-number input; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InsufficientDimensionsError(ValueError):
    """Direction-number source has fewer dimensions than requested."""


def _is_prime(q):
    return q >= 2 and all(q % p for p in range(2, math.isqrt(q) + 1))


@dataclass
class GeneratingMatrices:
    """``s`` generating matrices of shape ``(n, m)`` over F_q."""

    q: int
    n: int
    m: int
    entries: np.ndarray
    degrees: tuple = field(default=())

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64)
        if not _is_prime(self.q):
            raise ValueError(f"base q={self.q} is not prime")
        if not self.n >= self.m >= 1:
            raise ValueError(f"need n >= m >= 1, got n={self.n}, m={self.m}")
        if self.entries.ndim != 3 or self.entries.shape[1:] != (self.n, self.m):
            raise ValueError(f"entries must have shape (s, {self.n}, {self.m}), got {self.entries.shape}")
        if self.entries.size and (self.entries.min() < 0 or self.entries.max() >= self.q):
            raise ValueError(f"entries must lie in 0..{self.q - 1}")

    @property
    def s(self):
        return self.entries.shape[0]

    def dump(self, stream):
        """Write ``q n m s`` then each matrix row by row, digits space-separated."""
        stream.write(f"{self.q} {self.n} {self.m} {self.s}\n")
        for mat in self.entries:
            for row in mat:
                stream.write(" ".join(str(int(v)) for v in row) + "\n")

    def dumps(self):
        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, stream):
        lines = [ln.split() for ln in stream.read().splitlines() if ln.strip()]
        if not lines or len(lines[0]) != 4:
            raise ValueError("expected header 'q n m s'")
        q, n, m, s = (int(v) for v in lines[0])
        rows = lines[1:]
        if len(rows) != s * n:
            raise ValueError(f"expected {s * n} matrix rows, got {len(rows)}")
        entries = np.array([[int(v) for v in row] for row in rows], dtype=np.int64)
        if entries.size and entries.shape[1] != m:
            raise ValueError(f"expected {m} digits per row")
        return cls(q=q, n=n, m=m, entries=entries.reshape(s, n, m))

    @classmethod
    def loads(cls, text):
        return cls.load(io.StringIO(text))


def radical_inverse(h, q: int, m: int):
    """Van der Corput value of ``h`` in base ``q`` using ``m`` digits.

    The reversed digits are assembled as an integer first, so the result is
    the correctly rounded value of ``rev(h) / q**m``.
    """
    h = np.asarray(h, dtype=np.int64)
    rev = np.zeros(h.shape, dtype=np.int64)
    for _ in range(m):
        rev = rev * q + h % q
        h = h // q
    return rev / float(q) ** m


class DigitalNet:
    """The ``q**m`` points generated by a set of generating matrices."""

    def __init__(self, matrices: GeneratingMatrices):
        self.matrices = matrices
        self.q = matrices.q
        self.m = matrices.m
        self.n = matrices.n
        self.s = matrices.s
        if self.q ** self.n >= 2**63:
            raise ValueError("q**n must fit in a signed 64-bit integer")
        self._ints = None

    def __len__(self):
        return self.q**self.m

    def _digit_vector(self, h):
        digits = np.zeros(self.m, dtype=np.int64)
        for i in range(self.m):
            h, digits[i] = divmod(h, self.q)
        return digits

    def integer_point(self, h: int) -> np.ndarray:
        """Coordinates of point ``h`` scaled by ``q**n`` (exact integers)."""
        if not 0 <= h < len(self):
            raise IndexError(f"index {h} outside 0..{len(self) - 1}")
        xi = self.matrices.entries @ self._digit_vector(h) % self.q  # (s, n)
        weights = self.q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return xi @ weights

    def point(self, h: int) -> np.ndarray:
        """Point ``x_h`` in ``[0, 1)^s``."""
        return self.integer_point(h) / float(self.q) ** self.n

    def integer_points(self) -> np.ndarray:
        """All points as an ``(q**m, s)`` array of integers ``x * q**n``."""
        if self._ints is not None:
            return self._ints
        N = len(self)
        weights = self.q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        # cols[j, k]: integer value of column k of C_j read as n digits
        cols = np.einsum("jik,i->jk", self.matrices.entries, weights)
        h = np.arange(N, dtype=np.int64)
        if self.q == 2:
            out = np.zeros((N, self.s), dtype=np.int64)
            for k in range(self.m):
                bit = (h >> k) & 1
                out ^= bit[:, None] * cols[None, :, k]
        else:
            digits = np.stack([(h // self.q**i) % self.q for i in range(self.m)], axis=1)
            xi = np.einsum("jik,hk->hji", self.matrices.entries, digits) % self.q
            out = xi @ weights
        self._ints = out
        return out

    def points(self) -> np.ndarray:
        return self.integer_points() / float(self.q) ** self.n


def net_point(net: DigitalNet, h: int) -> np.ndarray:
    return net.point(h)


def _read_text(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("ascii")
    return data


def parse_direction_numbers(source):
    """Parse a Joe-Kuo style table into ``[(dim, degree, a, [m_1..m_deg]), ...]``.

    ``source`` may be a path, ``bytes`` or a readable (text or binary) stream.
    The first line is a header and is skipped.
    """
    text = _read_text(source)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if lineno == 1 or not line.strip():
            continue
        fields = line.split()
        try:
            dim, deg, a, *minit = (int(v) for v in fields)
        except ValueError:
            raise DirectionNumberError(f"non-integer field in {line!r}", lineno) from None
        if deg < 1 or len(minit) != deg:
            raise DirectionNumberError(f"expected {deg} initial direction numbers, got {len(minit)}", lineno)
        if not 0 <= a < 2 ** max(deg - 1, 0):
            raise DirectionNumberError(f"coefficient a={a} out of range for degree {deg}", lineno)
        for i, mi in enumerate(minit, start=1):
            if mi % 2 == 0 or not 0 < mi < 2**i:
                raise DirectionNumberError(f"m_{i}={mi} must be odd and below 2**{i}", lineno)
        if rows and dim != rows[-1][0] + 1:
            raise DirectionNumberError(f"dimension {dim} out of sequence", lineno)
        if not rows and dim != 2:
            raise DirectionNumberError("table must start at dimension 2", lineno)
        rows.append((dim, deg, a, minit))
    return rows


def _sobol_direction_integers(deg, a, minit, m):
    mm = list(minit[:m])
    for k in range(deg, m):
        v = mm[k - deg] ^ (mm[k - deg] << deg)
        for i in range(1, deg):
            if (a >> (deg - 1 - i)) & 1:
                v ^= mm[k - i] << i
        mm.append(v)
    return mm


def load_direction_numbers(source, s: int, m: int) -> GeneratingMatrices:
    """Binary Sobol' generating matrices (``n = m``) for the first ``s`` dimensions.

    Dimension 1 is the identity (van der Corput); dimensions 2.. come from
    the table. ``source`` is a path, bytes, a stream, or ``"embedded"``.
    """
    if s < 1 or m < 1:
        raise ValueError("s and m must be positive")
    if isinstance(source, str) and source == "embedded":
        source = EMBEDDED_DIRECTION_NUMBERS.encode("ascii")
    rows = parse_direction_numbers(source)
    if len(rows) + 1 < s:
        raise InsufficientDimensionsError(f"requested {s} dimensions, source provides {len(rows) + 1}")
    n = m
    entries = np.zeros((s, n, m), dtype=np.int64)
    entries[0] = np.eye(n, m, dtype=np.int64)
    degrees = [1]
    for j, (_, deg, a, minit) in enumerate(rows[: s - 1], start=1):
        degrees.append(deg)
        for k, mk in enumerate(_sobol_direction_integers(deg, a, minit, m), start=1):
            # v_k = m_k / 2**k: row i (1-based) holds bit k-i of m_k
            for i in range(1, k + 1):
                entries[j, i - 1, k - 1] = (mk >> (k - i)) & 1
    return GeneratingMatrices(q=2, n=n, m=m, entries=entries, degrees=tuple(degrees))


def sobol_net(s: int, m: int, source="embedded") -> DigitalNet:
    return DigitalNet(load_direction_numbers(source, s, m))


def sobol_t_parameter(matrices: GeneratingMatrices) -> int:
    """Sobol's quality bound ``t = sum_j (deg_j - 1)`` from the primitive-polynomial degrees."""
    if not matrices.degrees:
        raise ValueError("matrices carry no polynomial degrees")
    return sum(d - 1 for d in matrices.degrees)


@dataclass(frozen=True)
class InterlacedNetSpec:
    """Interlace ``factor`` successive coordinates of a ``factor * s``-dimensional net."""

    factor: int
    s: int

    @property
    def base_dimension(self):
        return self.factor * self.s


def interlace_integers(base_ints: np.ndarray, d: int, n: int):
    """Interlace the digits of integer coordinates with ``n`` bits each.

    Output coordinate ``j`` takes its ``(a*d + r)``-th bit (0-based, most
    significant first) from bit ``a`` of base coordinate ``j*d + r``.
    Only the leading ``min(53, d*n)`` output bits are kept. Returns the
    integer coordinates and that precision.
    """
    base_ints = np.asarray(base_ints, dtype=np.int64)
    npts, dim = base_ints.shape
    if d < 1 or dim % d:
        raise ValueError(f"base dimension {dim} is not divisible by interlacing factor {d}")
    precision = min(MAX_FLOAT_BITS, d * n)
    out = np.zeros((npts, dim // d), dtype=np.int64)
    for j in range(dim // d):
        for ob in range(precision):
            a, r = divmod(ob, d)
            bit = (base_ints[:, j * d + r] >> (n - 1 - a)) & 1
            out[:, j] |= bit << (precision - 1 - ob)
    return out, precision


def deinterlace_integers(ints: np.ndarray, d: int, n: int) -> np.ndarray:
    """Bit-level inverse of :func:`interlace_integers` (up to the kept precision)."""
    ints = np.asarray(ints, dtype=np.int64)
    npts, s = ints.shape
    precision = min(MAX_FLOAT_BITS, d * n)
    out = np.zeros((npts, s * d), dtype=np.int64)
    for j in range(s):
        for ob in range(precision):
            a, r = divmod(ob, d)
            bit = (ints[:, j] >> (precision - 1 - ob)) & 1
            out[:, j * d + r] |= bit << (n - 1 - a)
    return out


def interlace(base: DigitalNet, d: int, n: int | None = None) -> np.ndarray:
    """Points of the digit-interlaced net in ``[0, 1)^(base.s / d)``."""
    if base.q != 2:
        raise ValueError("interlacing is implemented for q = 2")
    n = base.n if n is None else n
    if n > base.n:
        raise ValueError(f"requested {n} digits but the net has {base.n}")
    ints = base.integer_points() >> (base.n - n)
    out, precision = interlace_integers(ints, d, n)
    return np.ldexp(out.astype(float), -precision)


def interlaced_sobol(s: int, m: int, d: int, source="embedded"):
    """``2**m`` interlaced Sobol' points; returns ``(points, precision_bits)``."""
    net = sobol_net(d * s, m, source)
    points = interlace(net, d)
    return points, min(MAX_FLOAT_BITS, d * net.n)


def elementary_interval_check(net: DigitalNet, exponents) -> bool:
    """True iff every box ``prod [a_j q^-d_j, (a_j+1) q^-d_j)`` holds ``q**(m - sum d)`` points."""
    exponents = [int(e) for e in exponents]
    if len(exponents) != net.s:
        raise ValueError(f"need {net.s} exponents, got {len(exponents)}")
    total = sum(exponents)
    if total > net.m or min(exponents) < 0:
        raise ValueError("exponents must be nonnegative with sum <= m")
    if any(e > net.n for e in exponents):
        return False
    ints = net.integer_points()
    box = np.zeros(len(net), dtype=np.int64)
    for j, dj in enumerate(exponents):
        box = box * net.q**dj + ints[:, j] // net.q ** (net.n - dj)
    counts = np.bincount(box, minlength=net.q**total)
    return bool(np.all(counts == net.q ** (net.m - total)))


def is_tms_net(net: DigitalNet, t: int) -> bool:
    """Check every partition with ``sum d_j <= m - t`` (exhaustive; small nets only)."""
    if t > net.m:
        return True
    for total in range(net.m - t + 1):
        for exps in itertools.product(range(total + 1), repeat=net.s):
            if sum(exps) == total and not elementary_interval_check(net, exps):
                return False
    return True
