# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex kernel. Same contract as ``_simplex_py.run_simplex``."""
from libc.math cimport fabs

import numpy as np

cdef int OPTIMAL = 0
cdef int UNBOUNDED = 1
cdef int ITERATION_CAP = 2


def run_simplex(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t n_enter,
                double tol, Py_ssize_t max_iter, Py_ssize_t bland_after):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncol = T.shape[1]
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t i, k, j, r, iters = 0, streak = 0
    cdef bint bland = False
    cdef double dmin, ratio, best, piv, f, scale, bestpiv
    cdef double[::1] prow
    cdef Py_ssize_t[::1] nzidx = np.empty(ncol, dtype=np.intp)
    cdef Py_ssize_t nnz, q

    while True:
        j = -1
        if bland:
            for k in range(n_enter):
                if T[m, k] < -tol:
                    j = k
                    break
        else:
            dmin = -tol
            for k in range(n_enter):
                if T[m, k] < dmin:
                    dmin = T[m, k]
                    j = k
        if j < 0:
            return OPTIMAL, iters
        if iters >= max_iter:
            return ITERATION_CAP, iters

        # ratio test
        r = -1
        best = 0.0
        bestpiv = 0.0
        for i in range(m):
            piv = T[i, j]
            if piv > tol:
                ratio = T[i, rhs] / piv
                if r < 0:
                    r, best, bestpiv = i, ratio, piv
                    continue
                scale = 1e-12 * (fabs(best) if fabs(best) > 1.0 else 1.0)
                if ratio < best - scale:
                    r, best, bestpiv = i, ratio, piv
                elif ratio <= best + scale:
                    if bland:
                        if basis[i] < basis[r]:
                            r, best, bestpiv = i, ratio, piv
                    elif piv > bestpiv:
                        r, best, bestpiv = i, ratio, piv
        if r < 0:
            return UNBOUNDED, iters

        if best <= tol:
            streak += 1
            if streak >= bland_after:
                bland = True
        else:
            streak = 0
            bland = False

        # pivot
        piv = T[r, j]
        prow = T[r]
        nnz = 0
        for k in range(ncol):
            if prow[k] != 0.0:
                prow[k] = prow[k] / piv
                nzidx[nnz] = k
                nnz += 1
        for i in range(m + 1):
            if i == r:
                continue
            f = T[i, j]
            if f == 0.0:
                continue
            for q in range(nnz):
                k = nzidx[q]
                T[i, k] -= f * prow[k]
            T[i, j] = 0.0
        T[r, j] = 1.0
        basis[r] = j
        iters += 1
