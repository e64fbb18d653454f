"""Pure-numpy fallback with the same interface as the compiled ``_kernels``.

Loops over the Hermite degree run in Python and vectorize over nodes, so
this backend is one to two orders of magnitude slower than the extension.
"""
import math

import numpy as np

BACKEND = "python"
CHUNK_SIZE = 64
_KBLOCK = 512
_RESCALE_EXP = 600
_BIG = math.ldexp(1.0, _RESCALE_EXP)
_QUARTER_LOG_2PI = 0.25 * math.log(2.0 * math.pi)
_LN2 = math.log(2.0)


def _start(x, weighted):
    if weighted:
        e0 = -0.25 * x * x - _QUARTER_LOG_2PI
        shift = np.rint(e0 / _LN2)
        return np.exp(e0 - shift * _LN2), shift.astype(np.int64)
    return np.ones_like(x), np.zeros(x.shape, dtype=np.int64)


def hermite_scaled(k, x, weighted=False):
    x = np.ascontiguousarray(x, dtype=float)
    h0, ex = _start(x, weighted)
    if k == 0:
        return h0, np.zeros_like(x), ex
    h1 = x * h0
    for j in range(1, k):
        h0, h1 = h1, x * h1 / math.sqrt(j + 1.0) - h0 * math.sqrt(j / (j + 1.0))
        big = np.abs(h1) > _BIG
        if big.any():
            h1 = np.where(big, np.ldexp(h1, -_RESCALE_EXP), h1)
            h0 = np.where(big, np.ldexp(h0, -_RESCALE_EXP), h0)
            ex = ex + big * _RESCALE_EXP
    return h1, h0, ex


def weighted_table(kmax, x):
    x = np.ascontiguousarray(x, dtype=float)
    table = np.empty((kmax + 1, x.size))
    h0, ex = _start(x, True)
    table[0] = np.ldexp(h0, ex)
    if kmax == 0:
        return table
    h1 = x * h0
    table[1] = np.ldexp(h1, ex)
    for j in range(1, kmax):
        h0, h1 = h1, x * h1 / math.sqrt(j + 1.0) - h0 * math.sqrt(j / (j + 1.0))
        big = np.abs(h1) > _BIG
        if big.any():
            h1 = np.where(big, np.ldexp(h1, -_RESCALE_EXP), h1)
            h0 = np.where(big, np.ldexp(h0, -_RESCALE_EXP), h0)
            ex = ex + big * _RESCALE_EXP
        table[j + 1] = np.ldexp(h1, ex)
    return table


def _neumaier_columns(partials):
    """Compensated sum over axis 1 of a 2-D array, in column order."""
    s = np.zeros(partials.shape[0])
    c = np.zeros(partials.shape[0])
    for j in range(partials.shape[1]):
        v = partials[:, j]
        t = s + v
        c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
        s = t
    return s + c


def _blocks(x, c, m):
    """Yield arrays of ``S_k`` in consecutive blocks, starting with ``[S_0, S_1]``."""
    n = x.size
    nchunks = max(1, -(-n // CHUNK_SIZE))
    xp = np.zeros(nchunks * CHUNK_SIZE)
    cp = np.zeros(nchunks * CHUNK_SIZE)
    xp[:n] = x
    cp[:n] = c
    xp = xp.reshape(nchunks, CHUNK_SIZE)
    g0 = cp.reshape(nchunks, CHUNK_SIZE)
    g1 = g0 * xp
    head = [g0.sum(axis=1)]
    if m >= 1:
        head.append(g1.sum(axis=1))
    yield _neumaier_columns(np.array(head))
    k = 1
    while k < m:
        nk = min(_KBLOCK, m - k)
        partial = np.empty((nk, nchunks))
        for t in range(nk):
            a = 1.0 / math.sqrt(k + t + 1.0)
            b = math.sqrt((k + t) / (k + t + 1.0))
            g0, g1 = g1, xp * g1 * a - g0 * b
            partial[t] = g1.sum(axis=1)
        yield _neumaier_columns(partial)
        k += nk


def hermite_moments(x, c, m, nthreads=1):
    x = np.ascontiguousarray(x, dtype=float)
    c = np.ascontiguousarray(c, dtype=float)
    return np.concatenate(list(_blocks(x, c, m)))[: m + 1]


def _r_alpha_array(k, alpha):
    total = np.ones(k.shape)
    p = np.ones(k.shape)
    for tau in range(1, alpha + 1):
        p = np.where(k >= tau, p * (k - tau + 1), 0.0)
        total += p
    return 1.0 / total


def hermite_series(x, c, alpha, m, nthreads=1):
    x = np.ascontiguousarray(x, dtype=float)
    c = np.ascontiguousarray(c, dtype=float)
    s0 = 0.0
    sums = []
    k = 0
    for block in _blocks(x, c, m):
        ks = np.arange(k, k + block.size, dtype=float)
        if k == 0:
            s0 = float(block[0])
        terms = _r_alpha_array(ks, alpha) * block * block
        if k == 0:
            terms = terms[1:]
        sums.append(math.fsum(terms))
        k += block.size
    return s0, float(_neumaier_columns(np.array([sums]))[0]) if sums else 0.0
