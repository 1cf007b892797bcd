# cython: language_level=3
"""Compiled hot kernels; mirrors ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def regular_mask_table(adj_masks, int n, int r):
    cdef Py_ssize_t total = (<Py_ssize_t>1) << n
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(total, dtype=np.uint8)
    cdef u64[64] adj
    cdef int i
    cdef u64 m, bits
    cdef bint ok
    for i in range(n):
        adj[i] = <u64>adj_masks[i]
    with nogil:
        for m in range(1, <u64>total):
            ok = True
            bits = m
            while bits:
                i = __builtin_popcountll((bits & (~bits + 1)) - 1)
                if __builtin_popcountll(adj[i] & m) != r:
                    ok = False
                    break
                bits &= bits - 1
            out[m] = ok
    return out


def neighbor_union_table(adj_masks, int n):
    cdef Py_ssize_t total = (<Py_ssize_t>1) << n
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.zeros(total, dtype=np.uint64)
    cdef u64[64] adj
    cdef int i
    cdef Py_ssize_t lo, k
    for i in range(n):
        adj[i] = <u64>adj_masks[i]
    with nogil:
        for i in range(n):
            lo = (<Py_ssize_t>1) << i
            for k in range(lo):
                out[lo + k] = out[k] | adj[i]
    return out


def subset_closure(table, int n):
    out_arr = np.array(table, dtype=np.uint8, copy=True)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef Py_ssize_t total = out.shape[0]
    cdef Py_ssize_t lo, base, j
    cdef int i
    with nogil:
        for i in range(n):
            lo = (<Py_ssize_t>1) << i
            # members with bit i set sit in the upper half of each 2*lo block
            base = 0
            while base < total:
                for j in range(base, base + lo):
                    out[j + lo] |= out[j]
                base += 2 * lo
    return out_arr


def replicator_run(double[:, ::1] A, x0, double dt, Py_ssize_t max_steps,
                   double conv_tol, double[:, ::1] states, double[::1] payoffs):
    cdef Py_ssize_t n = A.shape[0]
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] xn = np.empty(n)
    cdef double[::1] p = np.empty(n)
    cdef Py_ssize_t i, j, step = 0
    cdef double pi, c, s, diff, v
    cdef bint converged = False

    with nogil:
        pi = 0.0
        for i in range(n):
            s = 0.0
            for j in range(n):
                s = s + A[i, j] * x[j]
            p[i] = s
            pi = pi + x[i] * s
        for i in range(n):
            states[0, i] = x[i]
        payoffs[0] = pi

        while step < max_steps:
            c = p[0]
            for i in range(1, n):
                if p[i] > c:
                    c = p[i]
            c = c + 1.0
            s = 0.0
            for i in range(n):
                v = x[i] * (c - p[i]) / (c - pi)
                v = x[i] + dt * (v - x[i])
                xn[i] = v
                s = s + v
            diff = 0.0
            for i in range(n):
                v = xn[i] / s
                if v - x[i] > diff:
                    diff = v - x[i]
                elif x[i] - v > diff:
                    diff = x[i] - v
                x[i] = v
            step = step + 1
            pi = 0.0
            for i in range(n):
                s = 0.0
                for j in range(n):
                    s = s + A[i, j] * x[j]
                p[i] = s
                pi = pi + x[i] * s
            for i in range(n):
                states[step, i] = x[i]
            payoffs[step] = pi
            if diff < conv_tol:
                converged = True
                break
    return step, converged
