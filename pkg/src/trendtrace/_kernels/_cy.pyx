# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; bit-identical twin of ``_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, ceil
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GOLDEN_GAMMA = 0x9E3779B97F4A7C15ULL
cdef double POISSON_CHUNK = 32.0
cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    state[0] += GOLDEN_GAMMA
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int64_t _uniform_int(uint64_t* state, int64_t lo, int64_t hi) noexcept nogil:
    cdef uint64_t span = <uint64_t>(hi - lo) + 1
    # 2**64 mod span, computed without 128-bit arithmetic
    cdef uint64_t limit = 0 - ((0 - span) % span)
    cdef uint64_t x
    while True:
        x = _next(state)
        if limit == 0 or x < limit:
            return lo + <int64_t>(x % span)


def splitmix64(state):
    cdef uint64_t s = state
    cdef uint64_t out = _next(&s)
    return int(s), int(out)


def uniform_int(state, int64_t lo, int64_t hi):
    if hi < lo:
        raise ValueError("empty range")
    cdef uint64_t s = state
    cdef int64_t v = _uniform_int(&s, lo, hi)
    return int(v), int(s)


def poisson(state, double mean):
    cdef uint64_t s = state
    if mean <= 0:
        return 0, int(s)
    cdef int64_t chunks = <int64_t>ceil(mean / POISSON_CHUNK)
    if chunks < 1:
        chunks = 1
    cdef double limit = exp(-(mean / chunks))
    cdef int64_t total = 0
    cdef int64_t c
    cdef double p
    with nogil:
        for c in range(chunks):
            p = (_next(&s) >> 11) * TWO_POW_M53
            while p > limit:
                total += 1
                p *= (_next(&s) >> 11) * TWO_POW_M53
    return int(total), int(s)


def place_events(state, int64_t n, const double[::1] cum_weights):
    cdef uint64_t s = state
    cdef Py_ssize_t last = cum_weights.shape[0] - 1
    cdef double total = cum_weights[last]
    seconds_arr = np.empty(n, dtype=np.int64)
    ranks_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] seconds = seconds_arr
    cdef int64_t[::1] ranks = ranks_arr
    cdef Py_ssize_t i, lo, hi, mid
    cdef double x
    with nogil:
        for i in range(n):
            seconds[i] = _uniform_int(&s, 0, 86399)
            x = (_next(&s) >> 11) * TWO_POW_M53 * total
            # bisect_right: first index whose cumulative weight exceeds x
            lo = 0
            hi = last + 1
            while lo < hi:
                mid = (lo + hi) >> 1
                if x < cum_weights[mid]:
                    hi = mid
                else:
                    lo = mid + 1
            ranks[i] = lo if lo <= last else last
    return seconds_arr, ranks_arr, int(s)


def accumulate_keywords(
    const int64_t[::1] record_idx,
    const double[::1] event_weights,
    const int64_t[::1] indptr,
    const int64_t[::1] indices,
    Py_ssize_t n_keywords,
):
    out_arr = np.zeros(n_keywords, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t e, j
    cdef int64_t r
    cdef double w
    with nogil:
        for e in range(record_idx.shape[0]):
            r = record_idx[e]
            if r < 0:
                continue
            w = event_weights[e]
            for j in range(indptr[r], indptr[r + 1]):
                out[indices[j]] += w
    return out_arr


def bincount(const int64_t[::1] idx, Py_ssize_t n):
    out_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int64_t v
    with nogil:
        for i in range(idx.shape[0]):
            v = idx[i]
            if 0 <= v < n:
                out[v] += 1
    return out_arr
