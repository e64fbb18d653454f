# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for Hermite recurrences.

The moment kernels split the nodes into fixed chunks of ``CHUNK`` nodes.
Each chunk's partial sum is formed in a fixed lane order and the chunk
partials are merged in chunk order, so results do not depend on the
number of OpenMP threads.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sqrt, exp, ldexp, fabs, log, lround

cnp.import_array()

cdef enum:
    CHUNK = 64
    LANES = 8
    GROUP = 4
    KBLOCK = 512
    RESCALE_EXP = 600

cdef double BIG = ldexp(1.0, RESCALE_EXP)
cdef double LN2 = 0.6931471805599453
cdef double QUARTER_LOG_2PI = 0.4594692666023363


BACKEND = "compiled"
CHUNK_SIZE = CHUNK


def hermite_scaled(long k, const double[::1] x, bint weighted=False):
    """Return ``(h_k, h_km1, e)`` with ``H_k(x) = h_k * 2**e`` per entry.

    With ``weighted`` the values carry the factor ``sqrt(phi(x))``.
    ``h_km1`` holds ``H_{k-1}`` on the same scale (zero for ``k == 0``).
    """
    cdef Py_ssize_t n = x.shape[0], i
    cdef long j
    cdef double h0, h1, h2, xi, e0
    cdef long ex, shift
    out_k = np.empty(n)
    out_km1 = np.empty(n)
    out_e = np.empty(n, dtype=np.int64)
    cdef double[::1] ok = out_k, okm1 = out_km1
    cdef cnp.int64_t[::1] oe = out_e
    with nogil:
        for i in range(n):
            xi = x[i]
            ex = 0
            if weighted:
                # sqrt(phi(x)) = exp(-x^2/4) (2 pi)^(-1/4), split into 2**shift * O(1)
                e0 = -0.25 * xi * xi - QUARTER_LOG_2PI
                shift = lround(e0 / LN2)
                h0 = exp(e0 - shift * LN2)
                ex = shift
            else:
                h0 = 1.0
            h1 = xi * h0
            if k == 0:
                ok[i] = h0
                okm1[i] = 0.0
                oe[i] = ex
                continue
            for j in range(1, k):
                h2 = (xi * h1 / sqrt(j + 1.0)) - h0 * sqrt(j / (j + 1.0))
                h0 = h1
                h1 = h2
                if fabs(h1) > BIG:
                    h1 = ldexp(h1, -RESCALE_EXP)
                    h0 = ldexp(h0, -RESCALE_EXP)
                    ex += RESCALE_EXP
            ok[i] = h1
            okm1[i] = h0
            oe[i] = ex
    return out_k, out_km1, out_e


def weighted_table(long kmax, const double[::1] x):
    """Table ``T[k, i] = H_k(x_i) sqrt(phi(x_i))`` for ``0 <= k <= kmax``."""
    cdef Py_ssize_t n = x.shape[0], i
    cdef long j
    cdef double h0, h1, h2, xi, e0
    cdef long ex, shift
    table = np.empty((kmax + 1, n))
    cdef double[:, ::1] t = table
    with nogil:
        for i in range(n):
            xi = x[i]
            e0 = -0.25 * xi * xi - QUARTER_LOG_2PI
            shift = lround(e0 / LN2)
            h0 = exp(e0 - shift * LN2)
            ex = shift
            t[0, i] = ldexp(h0, ex)
            if kmax == 0:
                continue
            h1 = xi * h0
            t[1, i] = ldexp(h1, ex)
            for j in range(1, kmax):
                h2 = (xi * h1 / sqrt(j + 1.0)) - h0 * sqrt(j / (j + 1.0))
                h0 = h1
                h1 = h2
                if fabs(h1) > BIG:
                    h1 = ldexp(h1, -RESCALE_EXP)
                    h0 = ldexp(h0, -RESCALE_EXP)
                    ex += RESCALE_EXP
                t[j + 1, i] = ldexp(h1, ex)
    return table


cdef inline double _chunk_sum(double* v) noexcept nogil:
    cdef double acc[LANES]
    cdef int l, i
    for l in range(LANES):
        acc[l] = 0.0
    for i in range(CHUNK // LANES):
        for l in range(LANES):
            acc[l] += v[i * LANES + l]
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))


cdef void _advance_chunk(double* x, double* g0, double* g1, double* ca, double* cb,
                         Py_ssize_t nk, double* buf, double* out, Py_ssize_t stride) noexcept nogil:
    # nk recurrence steps; out[t * stride] receives the chunk sum after step t.
    # GROUP lane blocks are advanced together so their state stays in registers;
    # buf[t * LANES + l] still accumulates lane l in ascending node order.
    cdef Py_ssize_t t, i, j
    cdef double v, a, b
    cdef double xl[GROUP * LANES]
    cdef double p0[GROUP * LANES]
    cdef double p1[GROUP * LANES]
    cdef double* row
    cdef int l, g
    for t in range(nk * LANES):
        buf[t] = 0.0
    for i in range(CHUNK // (GROUP * LANES)):
        for l in range(GROUP * LANES):
            j = i * GROUP * LANES + l
            xl[l] = x[j]
            p0[l] = g0[j]
            p1[l] = g1[j]
        for t in range(nk):
            row = buf + t * LANES
            a = ca[t]
            b = cb[t]
            for g in range(GROUP):
                for l in range(LANES):
                    j = g * LANES + l
                    v = xl[j] * p1[j] * a - p0[j] * b
                    p0[j] = p1[j]
                    p1[j] = v
                    row[l] += v
        for l in range(GROUP * LANES):
            j = i * GROUP * LANES + l
            g0[j] = p0[l]
            g1[j] = p1[l]
    for t in range(nk):
        row = buf + t * LANES
        out[t * stride] = ((row[0] + row[1]) + (row[2] + row[3])) + ((row[4] + row[5]) + (row[6] + row[7]))


cdef inline double _merge(double* p, Py_ssize_t count, Py_ssize_t stride) noexcept nogil:
    # Neumaier summation in fixed order
    cdef double s = 0.0, c = 0.0, t, v
    cdef Py_ssize_t j
    for j in range(count):
        v = p[j * stride]
        t = s + v
        if fabs(s) >= fabs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


cdef inline double _r_alpha(long k, int alpha) noexcept nogil:
    cdef double total = 1.0, p = 1.0
    cdef int tau
    for tau in range(1, alpha + 1):
        if tau > k:
            break
        p *= (k - tau + 1)
        total += p
    return 1.0 / total


cdef class _Stream:
    cdef double[::1] x
    cdef double[::1] g0
    cdef double[::1] g1
    cdef double[:, ::1] partial
    cdef double[::1] ca
    cdef double[::1] cb
    cdef double[:, ::1] buf
    cdef Py_ssize_t nchunks
    cdef long k

    def __init__(self, const double[::1] x, const double[::1] c):
        cdef Py_ssize_t n = x.shape[0]
        self.nchunks = max(1, (n + CHUNK - 1) // CHUNK)
        cdef Py_ssize_t npad = self.nchunks * CHUNK
        xp = np.zeros(npad)
        cp = np.zeros(npad)
        xp[:n] = x
        cp[:n] = c
        self.x = xp
        self.g0 = cp
        self.g1 = cp * xp
        self.partial = np.empty((KBLOCK, self.nchunks))
        self.ca = np.empty(KBLOCK)
        self.cb = np.empty(KBLOCK)
        self.buf = np.empty((self.nchunks, KBLOCK * LANES))
        self.k = 1

    cdef double head(self, int which) noexcept nogil:
        cdef Py_ssize_t j
        cdef double* src = &self.g0[0] if which == 0 else &self.g1[0]
        for j in range(self.nchunks):
            self.partial[0, j] = _chunk_sum(src + j * CHUNK)
        return _merge(&self.partial[0, 0], self.nchunks, 1)

    cdef void advance(self, Py_ssize_t nk, int nthreads) noexcept nogil:
        cdef Py_ssize_t j
        cdef long k0 = self.k
        for j in range(nk):
            self.ca[j] = 1.0 / sqrt(k0 + j + 1.0)
            self.cb[j] = sqrt((k0 + j) / (k0 + j + 1.0))
        for j in prange(self.nchunks, num_threads=nthreads, schedule="static"):
            _advance_chunk(&self.x[j * CHUNK], &self.g0[j * CHUNK], &self.g1[j * CHUNK],
                           &self.ca[0], &self.cb[0], nk, &self.buf[j, 0],
                           &self.partial[0, j], self.nchunks)
        self.k = k0 + nk


def hermite_moments(const double[::1] x, const double[::1] c, long m, int nthreads=1):
    """``S[k] = sum_i c_i H_k(x_i)`` for ``0 <= k <= m``."""
    out = np.empty(m + 1)
    cdef double[::1] s = out
    cdef _Stream st = _Stream(x, c)
    cdef Py_ssize_t nk, t
    cdef long k
    with nogil:
        s[0] = st.head(0)
        if m >= 1:
            s[1] = st.head(1)
        k = 1
        while k < m:
            nk = KBLOCK if m - k > KBLOCK else m - k
            st.advance(nk, nthreads)
            for t in range(nk):
                s[k + 1 + t] = _merge(&st.partial[t, 0], st.nchunks, 1)
            k += nk
    return out


def hermite_series(const double[::1] x, const double[::1] c, int alpha, long m, int nthreads=1):
    """Return ``(S_0, sum_{k=1}^m r_alpha(k) S_k^2)`` without storing ``S``."""
    cdef _Stream st = _Stream(x, c)
    cdef Py_ssize_t nk, t
    cdef long k
    cdef double s0, sk, term, acc = 0.0, comp = 0.0, tmp
    with nogil:
        s0 = st.head(0)
        if m >= 1:
            sk = st.head(1)
            acc = _r_alpha(1, alpha) * sk * sk
        k = 1
        while k < m:
            nk = KBLOCK if m - k > KBLOCK else m - k
            st.advance(nk, nthreads)
            for t in range(nk):
                sk = _merge(&st.partial[t, 0], st.nchunks, 1)
                term = _r_alpha(k + 1 + t, alpha) * sk * sk
                tmp = acc + term
                if fabs(acc) >= fabs(term):
                    comp += (acc - tmp) + term
                else:
                    comp += (term - tmp) + acc
                acc = tmp
            k += nk
    return s0, acc + comp
