# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: factor extraction, projection counting, window oscillation.

Contracts match ``_fallback.py`` exactly; the test suite cross-checks the two.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport calloc, free

cnp.import_array()

BACKEND = "speedups"


def extract_factors(word, int length):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] w = np.ascontiguousarray(word, dtype=np.int64)
    cdef Py_ssize_t n = w.shape[0]
    if length < 1 or length > 62:
        raise ValueError("length must be in 1..62")
    if n < length:
        return np.empty(0, dtype=np.int64)
    cdef Py_ssize_t count = n - length + 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] masks = np.empty(count, dtype=np.int64)
    cdef long long m = 0
    cdef long long top = length - 1
    cdef Py_ssize_t i
    for i in range(length):
        m |= w[i] << i
    masks[0] = m
    for i in range(1, count):
        m = (m >> 1) | (w[i + length - 1] << top)
        masks[i] = m
    return np.unique(masks)


def project_masks(factors, positions):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] f = np.ascontiguousarray(factors, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pos = np.ascontiguousarray(positions, dtype=np.int64)
    cdef Py_ssize_t n = f.shape[0], k = pos.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef long long acc
    for i in range(n):
        acc = 0
        for j in range(k):
            acc |= ((f[i] >> pos[j]) & 1) << j
        out[i] = acc
    return out


def distinct_projection_count(factors, positions):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] f = np.ascontiguousarray(factors, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pos = np.ascontiguousarray(positions, dtype=np.int64)
    cdef Py_ssize_t n = f.shape[0], k = pos.shape[0]
    if k == 0:
        return 1 if n else 0
    if k > 30:
        raise ValueError("too many positions for the table")
    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    cdef char* seen = <char*>calloc(size, 1)
    if seen == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, found = 0
    cdef long long acc
    try:
        for i in range(n):
            acc = 0
            for j in range(k):
                acc |= ((f[i] >> pos[j]) & 1) << j
            if not seen[acc]:
                seen[acc] = 1
                found += 1
                if found == size:
                    break
    finally:
        free(seen)
    return found


def window_oscillation(values, double radius, images, weights):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] img = np.ascontiguousarray(images, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], m = img.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j, col, lo, hi
    cdef double best, spread, x, mn, mx
    lo = 0
    hi = 0
    for i in range(n):
        while lo < n and v[lo] < v[i] - radius:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < n and v[hi] <= v[i] + radius:
            hi += 1
        best = 0.0
        for col in range(m):
            mn = img[lo, col]
            mx = mn
            for j in range(lo + 1, hi):
                x = img[j, col]
                if x < mn:
                    mn = x
                elif x > mx:
                    mx = x
            spread = (mx - mn) * w[col]
            if spread > best:
                best = spread
        out[i] = best
    return out
