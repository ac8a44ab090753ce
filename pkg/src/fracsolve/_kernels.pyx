# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled history convolution kernels (see _kernels_py for the contract)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def hist_dot(double[::1] w, double[:, ::1] F, Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t base):
    cdef Py_ssize_t d = F.shape[1]
    out_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double wi
    if hi <= lo:
        return out_arr
    for i in range(lo, hi):
        wi = w[base - i]
        for k in range(d):
            out[k] += wi * F[i, k]
    return out_arr


def hist_dot_multi(double[:, ::1] W, double[:, ::1] F, Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t base):
    cdef Py_ssize_t d = F.shape[1]
    out_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    if hi <= lo:
        return out_arr
    for k in range(d):
        for i in range(lo, hi):
            out[k] += W[k, base - i] * F[i, k]
    return out_arr
