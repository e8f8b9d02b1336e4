# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded-variable primal simplex iterations.

Same pivoting rules as ``_simplex_py.iterate``; see that module for the
argument contract.
"""

from libc.math cimport fabs, INFINITY

cdef int DEGENERATE_SWITCH = 50

cdef int OPTIMAL = 0
cdef int UNBOUNDED = 1
cdef int ITERATION_LIMIT = 2


def iterate(double[:, ::1] T, double[::1] beta, long long[::1] basis,
            double[::1] d, unsigned char[::1] at_upper, double[::1] ub,
            double tol, double pivot_tol, long max_iter):
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t n = T.shape[1]
    cdef Py_ssize_t i, k, j, r
    cdef long it = 0
    cdef int degenerate = 0
    cdef bint bland, found, to_upper
    cdef double best, val, sgn, di, t, best_t, flip, piv, f, step, ubi
    cdef long long leaving
    cdef unsigned char[::1] is_basic
    cdef double[::1] delta
    cdef double[::1] ratios

    import numpy as np
    is_basic_arr = np.zeros(n, dtype=np.uint8)
    is_basic = is_basic_arr
    delta_arr = np.empty(m, dtype=np.float64)
    delta = delta_arr
    ratios_arr = np.empty(m, dtype=np.float64)
    ratios = ratios_arr
    for i in range(m):
        is_basic[basis[i]] = 1

    while it < max_iter:
        bland = degenerate >= DEGENERATE_SWITCH

        # pricing
        j = -1
        best = -1.0
        for k in range(n):
            if is_basic[k] or ub[k] <= 0.0:
                continue
            val = d[k]
            if (at_upper[k] == 0 and val < -tol) or (at_upper[k] == 1 and val > tol):
                if bland:
                    j = k
                    break
                if fabs(val) > best:
                    best = fabs(val)
                    j = k
        if j < 0:
            return OPTIMAL, it
        sgn = 1.0 if at_upper[j] == 0 else -1.0

        # ratio test
        best_t = INFINITY
        found = False
        for i in range(m):
            di = -sgn * T[i, j]
            delta[i] = di
            ratios[i] = INFINITY
            ubi = ub[basis[i]]
            if di < -pivot_tol:
                t = beta[i] / -di
            elif di > pivot_tol and ubi < INFINITY:
                t = (ubi - beta[i]) / di
            else:
                continue
            if t < 0.0:
                t = 0.0
            ratios[i] = t
            if t < best_t:
                best_t = t
            found = True

        r = -1
        to_upper = False
        if found:
            for i in range(m):
                if ratios[i] <= best_t + 1e-12:
                    if r < 0:
                        r = i
                    elif bland:
                        if basis[i] < basis[r]:
                            r = i
                    elif fabs(delta[i]) > fabs(delta[r]):
                        r = i
            to_upper = delta[r] > pivot_tol

        flip = ub[j]
        if r < 0 and flip == INFINITY:
            return UNBOUNDED, it

        if r < 0 or flip <= best_t:
            for i in range(m):
                beta[i] += delta[i] * flip
            at_upper[j] = 1 - at_upper[j]
            step = flip
        else:
            t = best_t
            for i in range(m):
                beta[i] += delta[i] * t
            leaving = basis[r]
            beta[r] = t if sgn > 0 else ub[j] - t
            at_upper[leaving] = 1 if to_upper else 0
            at_upper[j] = 0
            is_basic[leaving] = 0
            is_basic[j] = 1
            basis[r] = j
            piv = T[r, j]
            for k in range(n):
                T[r, k] /= piv
            for i in range(m):
                if i == r:
                    continue
                f = T[i, j]
                if f != 0.0:
                    for k in range(n):
                        T[i, k] -= f * T[r, k]
            f = d[j]
            if f != 0.0:
                for k in range(n):
                    d[k] -= f * T[r, k]
            d[j] = 0.0
            step = t
        if step <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0
        it += 1
    return ITERATION_LIMIT, it
