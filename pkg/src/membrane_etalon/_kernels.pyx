# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled delay-recursion kernel.

Same contract as _kernels_py.delay_recursion; the sequential loop runs in C
so long records (millions of samples) stay cheap.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def delay_recursion(
    cnp.complex128_t[::1] drive,
    cnp.complex128_t[::1] phase,
    double complex t1,
    double complex mu,
    Py_ssize_t delay,
):
    cdef Py_ssize_t n = drive.shape[0]
    if phase.shape[0] != n:
        raise ValueError("drive and phase must have equal length")
    if delay < 1:
        raise ValueError("delay must be >= 1 sample")
    out_arr = np.empty(n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double complex prev
    for i in range(n):
        if i >= delay:
            prev = out[i - delay]
            out[i] = t1 * drive[i] + (mu * phase[i]) * prev
        else:
            out[i] = t1 * drive[i]
    return out_arr
