# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex eta-file kernels (hot inner loops of the LP solver).

Contracts match _kernels_py; selected at import in covreplan.lpsolve.
"""

import numpy as np
cimport numpy as cnp

IS_COMPILED = True


def ftran_etas(cnp.float64_t[:, ::1] eta_d, cnp.int64_t[::1] eta_r, int k,
               cnp.float64_t[::1] w):
    cdef Py_ssize_t j, i, r, m = w.shape[0]
    cdef double t
    for j in range(k):
        r = eta_r[j]
        t = w[r] / eta_d[j, r]
        if t != 0.0:
            for i in range(m):
                w[i] -= eta_d[j, i] * t
        w[r] = t


def btran_etas(cnp.float64_t[:, ::1] eta_d, cnp.int64_t[::1] eta_r, int k,
               cnp.float64_t[::1] c):
    cdef Py_ssize_t j, i, r, m = c.shape[0]
    cdef double acc, cr
    for j in range(k - 1, -1, -1):
        r = eta_r[j]
        acc = 0.0
        for i in range(m):
            acc += eta_d[j, i] * c[i]
        cr = c[r]
        c[r] = cr - (acc - cr) / eta_d[j, r]
