# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels over (Z/2^64)[w]/(P(w)); callers mask down to 2^M."""
import numpy as np
from libc.stdint cimport uint64_t


def polymul(const uint64_t[:, ::1] a, const uint64_t[:, ::1] b,
            const uint64_t[::1] wd, uint64_t mask, Py_ssize_t out_len):
    """Product of two coefficient arrays of shape (d, L), truncated to out_len columns."""
    cdef Py_ssize_t d = a.shape[0], la = a.shape[1], lb = b.shape[1]
    cdef Py_ssize_t i, j, s, t, k, tmax, row
    cdef uint64_t x, c
    full = np.zeros((2 * d - 1, out_len), dtype=np.uint64)
    cdef uint64_t[:, ::1] f = full
    cdef const uint64_t* bj
    cdef uint64_t* fr
    if la > out_len:
        la = out_len
    for i in range(d):
        for j in range(d):
            bj = &b[j, 0]
            fr = &f[i + j, 0]
            for s in range(la):
                x = a[i, s]
                if x == 0:
                    continue
                tmax = out_len - s
                if tmax > lb:
                    tmax = lb
                for t in range(tmax):
                    fr[s + t] += x * bj[t]
    # w^k = w^(k-d) * sum_j wd[j] w^j, highest rows first
    for k in range(2 * d - 2, d - 1, -1):
        for j in range(d):
            c = wd[j]
            if c == 0:
                continue
            row = k - d + j
            for s in range(out_len):
                f[row, s] += c * f[k, s]
    out = np.empty((d, out_len), dtype=np.uint64)
    cdef uint64_t[:, ::1] o = out
    for i in range(d):
        for s in range(out_len):
            o[i, s] = f[i, s] & mask
    return out


def matvec(const uint64_t[:, ::1] mat, const uint64_t[:, ::1] vec, uint64_t mask):
    """out[i, k] = sum_j mat[k, j] * vec[i, j] for vec of shape (d, J)."""
    cdef Py_ssize_t d = vec.shape[0], rows = mat.shape[0], cols = vec.shape[1]
    cdef Py_ssize_t i, k, j
    cdef uint64_t acc
    if mat.shape[1] < cols:
        cols = mat.shape[1]
    out = np.empty((d, rows), dtype=np.uint64)
    cdef uint64_t[:, ::1] o = out
    for i in range(d):
        for k in range(rows):
            acc = 0
            for j in range(cols):
                acc += mat[k, j] * vec[i, j]
            o[i, k] = acc & mask
    return out
