# cython: language_level=3
"""Compiled kernels: LU determinants and exact permanents.

Mirrors the API of :mod:`symdet._pykernels`; see that module for the
reference semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil

cdef double PIVOT_FLOOR = 1e-300


cdef double _det_inplace(double* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k, p
    cdef double best, t, piv, f
    cdef double det = 1.0
    for k in range(n):
        p = k
        best = fabs(a[k * n + k])
        for i in range(k + 1, n):
            t = fabs(a[i * n + k])
            if t > best:
                best = t
                p = i
        if best < PIVOT_FLOOR:
            return 0.0
        if p != k:
            for j in range(n):
                t = a[k * n + j]
                a[k * n + j] = a[p * n + j]
                a[p * n + j] = t
            det = -det
        piv = a[k * n + k]
        det *= piv
        for i in range(k + 1, n):
            f = a[i * n + k] / piv
            if f != 0.0:
                for j in range(k + 1, n):
                    a[i * n + j] -= f * a[k * n + j]
    return det


def det(M):
    cdef cnp.ndarray[double, ndim=2, mode="c"] a = np.array(M, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1.0
    return _det_inplace(&a[0, 0], n)


def det_batch(stack):
    cdef cnp.ndarray[double, ndim=3, mode="c"] a = np.array(stack, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t s, S = a.shape[0], n = a.shape[1]
    if a.shape[2] != n:
        raise ValueError("det_batch needs a stack of square matrices")
    cdef cnp.ndarray[double, ndim=1] out = np.empty(S, dtype=np.float64)
    if n == 0:
        out[:] = 1.0
        return out
    cdef double* base = &a[0, 0, 0] if S > 0 else NULL
    with nogil:
        for s in range(S):
            out[s] = _det_inplace(base + s * n * n, n)
    return out


def permanent_ryser(M):
    cdef cnp.ndarray[double, ndim=2, mode="c"] a = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long k, g, total_sets
    cdef long double acc = 0.0
    cdef long double prod
    cdef int size = 0
    if n == 0:
        return 1.0
    # row sums are updated incrementally 2^n times; extended precision keeps the drift down
    cdef long double* rs = <long double*> malloc(n * sizeof(long double))
    if rs == NULL:
        raise MemoryError()
    for i in range(n):
        rs[i] = 0.0
    total_sets = (<unsigned long long> 1) << n
    g = 0
    with nogil:
        for k in range(1, total_sets):
            j = __builtin_ctzll(k)
            g ^= (<unsigned long long> 1) << j
            if (g >> j) & 1:
                size += 1
                for i in range(n):
                    rs[i] += a[i, j]
            else:
                size -= 1
                for i in range(n):
                    rs[i] -= a[i, j]
            prod = 1.0
            for i in range(n):
                prod *= rs[i]
            if size & 1:
                acc -= prod
            else:
                acc += prod
    free(rs)
    if n & 1:
        acc = -acc
    return <double> acc


def permanent_naive(M):
    cdef cnp.ndarray[double, ndim=2, mode="c"] a = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, t
    cdef long double acc = 0.0
    cdef double prod
    if n == 0:
        return 1.0
    cdef Py_ssize_t* perm = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* c = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    if perm == NULL or c == NULL:
        free(perm)
        free(c)
        raise MemoryError()
    for i in range(n):
        perm[i] = i
        c[i] = 0
    with nogil:
        # Heap's algorithm, iterative form
        prod = 1.0
        for t in range(n):
            prod *= a[t, perm[t]]
        acc += prod
        i = 0
        while i < n:
            if c[i] < i:
                if i % 2 == 0:
                    t = perm[0]; perm[0] = perm[i]; perm[i] = t
                else:
                    t = perm[c[i]]; perm[c[i]] = perm[i]; perm[i] = t
                prod = 1.0
                for t in range(n):
                    prod *= a[t, perm[t]]
                acc += prod
                c[i] += 1
                i = 0
            else:
                c[i] = 0
                i += 1
    free(perm)
    free(c)
    return <double> acc
