# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evolution kernels; semantics mirror ikemo._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, pow

cnp.import_array()

BACKEND = "compiled"

cdef double _EPS = 1e-14


def nondominated_ranks(f, cv):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] fa = np.ascontiguousarray(f, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cva = np.ascontiguousarray(cv, dtype=np.float64)
    cdef Py_ssize_t n = fa.shape[0]
    cdef Py_ssize_t m = fa.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ranks = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return ranks
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] dom = np.zeros((n, n), dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t p, q, k
    cdef bint p_dom, any_less, all_leq

    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            p_dom = False
            if cva[p] < cva[q]:
                p_dom = True
            elif cva[p] == 0.0 and cva[q] == 0.0:
                all_leq = True
                any_less = False
                for k in range(m):
                    if fa[p, k] > fa[q, k]:
                        all_leq = False
                        break
                    if fa[p, k] < fa[q, k]:
                        any_less = True
                p_dom = all_leq and any_less
            if p_dom:
                dom[p, q] = 1
                counts[q] += 1

    cdef Py_ssize_t assigned = 0
    cdef cnp.int64_t current = 0
    cdef bint found
    while assigned < n:
        found = False
        for p in range(n):
            if ranks[p] == -1 and counts[p] == 0:
                ranks[p] = current
                found = True
        assert found, "dominance relation must be acyclic"
        for p in range(n):
            if ranks[p] == current:
                assigned += 1
                for q in range(n):
                    if dom[p, q]:
                        counts[q] -= 1
        current += 1
    return ranks


def crowding_from_orders(f, orders):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] fa = np.ascontiguousarray(f, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] oa = np.ascontiguousarray(orders, dtype=np.int64)
    cdef Py_ssize_t k = fa.shape[0]
    cdef Py_ssize_t m = fa.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.zeros(k, dtype=np.float64)
    cdef Py_ssize_t obj, t
    cdef double lo, hi, span
    for obj in range(m):
        lo = fa[oa[0, obj], obj]
        hi = fa[oa[k - 1, obj], obj]
        d[oa[0, obj]] = INFINITY
        d[oa[k - 1, obj]] = INFINITY
        span = hi - lo
        if span <= 0.0 or k <= 2:
            continue
        for t in range(1, k - 1):
            d[oa[t, obj]] += (fa[oa[t + 1, obj], obj] - fa[oa[t - 1, obj], obj]) / span
    return d


def sbx_pairs(p1, p2, lower, upper, double eta, double p_c,
              pair_u, u_gene, u_beta, u_swap):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(p1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b = np.ascontiguousarray(p2, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yl = np.ascontiguousarray(lower, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yu = np.ascontiguousarray(upper, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pu = np.ascontiguousarray(pair_u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ug = np.ascontiguousarray(u_gene, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ub = np.ascontiguousarray(u_beta, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] us = np.ascontiguousarray(u_swap, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c1 = a.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c2 = b.copy()
    cdef Py_ssize_t q = a.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    cdef Py_ssize_t s, i
    cdef double y1, y2, dy, r, beta, alpha, betaq, lo_child, hi_child, ex
    ex = 1.0 / (eta + 1.0)
    for s in range(q):
        if pu[s] > p_c:
            continue
        for i in range(d):
            if ug[s, i] > 0.5 or fabs(a[s, i] - b[s, i]) <= _EPS:
                continue
            if a[s, i] < b[s, i]:
                y1 = a[s, i]; y2 = b[s, i]
            else:
                y1 = b[s, i]; y2 = a[s, i]
            dy = y2 - y1
            r = ub[s, i]
            beta = 1.0 + 2.0 * (y1 - yl[i]) / dy
            alpha = 2.0 - pow(beta, -(eta + 1.0))
            if r <= 1.0 / alpha:
                betaq = pow(r * alpha, ex)
            else:
                betaq = pow(1.0 / (2.0 - r * alpha), ex)
            lo_child = 0.5 * ((y1 + y2) - betaq * dy)
            beta = 1.0 + 2.0 * (yu[i] - y2) / dy
            alpha = 2.0 - pow(beta, -(eta + 1.0))
            if r <= 1.0 / alpha:
                betaq = pow(r * alpha, ex)
            else:
                betaq = pow(1.0 / (2.0 - r * alpha), ex)
            hi_child = 0.5 * ((y1 + y2) + betaq * dy)
            if lo_child < yl[i]: lo_child = yl[i]
            if lo_child > yu[i]: lo_child = yu[i]
            if hi_child < yl[i]: hi_child = yl[i]
            if hi_child > yu[i]: hi_child = yu[i]
            if us[s, i] <= 0.5:
                c1[s, i] = hi_child; c2[s, i] = lo_child
            else:
                c1[s, i] = lo_child; c2[s, i] = hi_child
    return c1, c2


def polynomial_mutation(x, lower, upper, double eta, double p_m, u_apply, u_delta):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yl = np.ascontiguousarray(lower, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yu = np.ascontiguousarray(upper, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ua = np.ascontiguousarray(u_apply, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ud = np.ascontiguousarray(u_delta, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = xa.copy()
    cdef Py_ssize_t q = xa.shape[0]
    cdef Py_ssize_t d = xa.shape[1]
    cdef Py_ssize_t s, i
    cdef double y, span, d1, d2, r, mp, xy, val, deltaq
    mp = 1.0 / (eta + 1.0)
    for s in range(q):
        for i in range(d):
            if ua[s, i] > p_m:
                continue
            y = xa[s, i]
            span = yu[i] - yl[i]
            d1 = (y - yl[i]) / span
            d2 = (yu[i] - y) / span
            r = ud[s, i]
            if r <= 0.5:
                xy = 1.0 - d1
                val = 2.0 * r + (1.0 - 2.0 * r) * pow(xy, eta + 1.0)
                deltaq = pow(val, mp) - 1.0
            else:
                xy = 1.0 - d2
                val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * pow(xy, eta + 1.0)
                deltaq = 1.0 - pow(val, mp)
            y = y + deltaq * span
            if y < yl[i]: y = yl[i]
            if y > yu[i]: y = yu[i]
            out[s, i] = y
    return out
