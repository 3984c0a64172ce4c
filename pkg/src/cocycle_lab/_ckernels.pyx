# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Cayley-table kernels.

Every function mirrors one in ``_pykernels`` and returns the same values.
A ``-1`` entry in a multiplication table marks an undefined product
(partial carriers such as word balls).
"""
import numpy as np

cimport cython
from libc.string cimport memset


def convolve(const long long[:, ::1] mul, const double complex[::1] a,
             const double complex[::1] b):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t g, h
    cdef long long k
    cdef double complex ag
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef int escaped = 0
    for g in range(n):
        ag = a[g]
        if ag == 0:
            continue
        for h in range(n):
            if b[h] == 0:
                continue
            k = mul[g, h]
            if k < 0:
                escaped = 1
                continue
            o[k] = o[k] + ag * b[h]
    return out, escaped


def gram_convolve(const long long[:, ::1] mul, const long long[::1] inv,
                  const double complex[::1] a, const double complex[::1] b,
                  const double[:, ::1] weight):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t g, h
    cdef long long k, gi
    cdef double complex ca
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef int escaped = 0
    for g in range(n):
        ca = a[g].conjugate()
        if ca == 0:
            continue
        gi = inv[g]
        for h in range(n):
            if b[h] == 0 or weight[g, h] == 0:
                continue
            k = mul[gi, h]
            if k < 0:
                escaped = 1
                continue
            o[k] = o[k] + ca * b[h] * weight[g, h]
    return out, escaped


def regular_matrix(const long long[:, ::1] mul, const double complex[::1] a):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t g, h
    out = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] m = out
    for g in range(n):
        if a[g] == 0:
            continue
        for h in range(n):
            m[mul[g, h], h] = m[mul[g, h], h] + a[g]
    return out


def is_latin(const long long[:, ::1] mul):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t i, j
    cdef long long v
    seen_np = np.zeros(n, dtype=np.int64)
    cdef long long[::1] seen = seen_np
    cdef long long stamp = 0
    for i in range(n):
        stamp += 1
        for j in range(n):
            v = mul[i, j]
            if v < 0 or v >= n or seen[v] == stamp:
                return False
            seen[v] = stamp
    for j in range(n):
        stamp += 1
        for i in range(n):
            v = mul[i, j]
            if seen[v] == stamp:
                return False
            seen[v] = stamp
    return True


def associativity_exhaustive(const long long[:, ::1] mul):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t g, h, k
    cdef long long gh
    for g in range(n):
        for h in range(n):
            gh = mul[g, h]
            for k in range(n):
                if mul[gh, k] != mul[g, mul[h, k]]:
                    return (g, h, k)
    return None


def associativity_sampled(const long long[:, ::1] mul, const long long[:, ::1] triples):
    cdef Py_ssize_t t
    cdef long long g, h, k
    for t in range(triples.shape[0]):
        g = triples[t, 0]
        h = triples[t, 1]
        k = triples[t, 2]
        if mul[mul[g, h], k] != mul[g, mul[h, k]]:
            return (int(g), int(h), int(k))
    return None
