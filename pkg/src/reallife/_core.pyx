# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. ``_fallback`` mirrors every function here with the
same floating-point operation order, so both produce bit-identical output."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def gather_correlate(const double[::1] padded, const cnp.int64_t[::1] base,
                     const cnp.int64_t[::1] offsets, const double[::1] weights):
    """out[i] = sum_j weights[j] * padded[base[i] + offsets[j]], j ascending."""
    cdef Py_ssize_t n = base.shape[0]
    cdef Py_ssize_t k = offsets.shape[0]
    cdef Py_ssize_t i, j
    cdef cnp.int64_t b
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            b = base[i]
            acc = 0.0
            for j in range(k):
                acc = acc + weights[j] * padded[b + offsets[j]]
            o[i] = acc
    return out


def directed_hausdorff_sq(const cnp.int64_t[:, ::1] X, const cnp.int64_t[:, ::1] Y):
    """max over x in X of min over y in Y of |x - y|^2 (integer coordinates)."""
    cdef Py_ssize_t nx = X.shape[0], ny = Y.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, c
    cdef cnp.int64_t best, cmax = 0, dist, t
    with nogil:
        for i in range(nx):
            best = -1
            for j in range(ny):
                dist = 0
                for c in range(d):
                    t = X[i, c] - Y[j, c]
                    dist = dist + t * t
                if best < 0 or dist < best:
                    best = dist
                    # this x cannot raise the running maximum any further
                    if best <= cmax:
                        break
            if best > cmax:
                cmax = best
    return int(cmax)
