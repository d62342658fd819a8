# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the synchronizers.

Signatures mirror ``_kernels_py`` exactly; see that module for semantics.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()


def ml_scan(const long long[:] r, const double[:] lnfact, const double[:] base,
            const double[:] pulse, Py_ssize_t h_lo, Py_ssize_t h_hi):
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t w = pulse.shape[0]
    cdef Py_ssize_t h, m, j, stop
    cdef double acc, lam
    cdef double best = -INFINITY
    cdef Py_ssize_t best_h = -1
    metrics = np.empty(h_hi - h_lo + 1, dtype=np.float64)
    cdef double[:] mv = metrics
    for h in range(h_lo, h_hi + 1):
        acc = 0.0
        stop = w if h + w <= n else n - h
        for m in range(stop):
            j = h + m
            lam = base[j] + pulse[m]
            if lam > 0.0:
                acc += r[j] * log(lam) - lam - lnfact[j]
            elif r[j] > 0:
                acc = -INFINITY
                break
        mv[h - h_lo] = acc
        if acc > best:
            best = acc
            best_h = h
    return best_h, metrics


def tt_scan(const long long[:] r, double xi, Py_ssize_t n_dw):
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t pos = 0, start, end, j
    out = []
    while pos < n:
        start = -1
        for j in range(pos, n):
            if r[j] >= xi:
                start = j
                break
        if start < 0:
            break
        end = n - 1  # never drops back: zone runs to the trace end
        for j in range(start + 1, n):
            if r[j] <= xi:
                end = j
                break
        if end < start + n_dw:
            end = start + n_dw
        if end > n - 1:
            end = n - 1
        out.append((start, end))
        pos = end + 1
    return np.array(out, dtype=np.int64).reshape(-1, 2)
