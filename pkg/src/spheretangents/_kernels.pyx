# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched kernels; mirrors ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, INFINITY

cnp.import_array()


def quadratic_forms(P, W):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], r, i, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc, row
    for r in range(n):
        acc = 0.0
        for i in range(6):
            row = 0.0
            for j in range(6):
                row += w[i, j] * p[r, j]
            acc += p[r, i] * row
        o[r] = acc
    return out


def meet_forms(P, q):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], r
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for r in range(n):
        o[r] = (p[r, 0] * b[5] - p[r, 1] * b[4] + p[r, 2] * b[3]
                + p[r, 3] * b[2] - p[r, 4] * b[1] + p[r, 5] * b[0])
    return out


def clip_lines(points, dirs, lo, hi):
    cdef const double[:, ::1] a = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef const double[::1] blo = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] bhi = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], r, k
    smin_arr = np.empty(n, dtype=np.float64)
    smax_arr = np.empty(n, dtype=np.float64)
    hit_arr = np.empty(n, dtype=np.bool_)
    cdef double[::1] smin = smin_arr
    cdef double[::1] smax = smax_arr
    cdef cnp.npy_bool[::1] hit = hit_arr
    cdef double s1, s2, t0, t1
    cdef bint ok
    for r in range(n):
        t0 = -INFINITY
        t1 = INFINITY
        ok = True
        for k in range(3):
            if fabs(d[r, k]) < 1e-300:
                if a[r, k] < blo[k] or a[r, k] > bhi[k]:
                    ok = False
                continue
            s1 = (blo[k] - a[r, k]) / d[r, k]
            s2 = (bhi[k] - a[r, k]) / d[r, k]
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 > t0:
                t0 = s1
            if s2 < t1:
                t1 = s2
        smin[r] = t0
        smax[r] = t1
        hit[r] = ok and t1 > t0
    return smin_arr, smax_arr, hit_arr


def match_nearest(prev, cur, double threshold):
    cdef const double[:, ::1] a = np.ascontiguousarray(np.asarray(prev, dtype=np.float64).reshape(-1, 6))
    cdef const double[:, ::1] b = np.ascontiguousarray(np.asarray(cur, dtype=np.float64).reshape(-1, 6))
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, j, k
    out = np.full(nb, -1, dtype=np.int64)
    if na == 0 or nb == 0:
        return out
    dist_arr = np.empty((nb, na), dtype=np.float64)
    cdef double[:, ::1] dist = dist_arr
    cdef double sm, sp, x
    for i in range(nb):
        for j in range(na):
            sm = 0.0
            sp = 0.0
            for k in range(6):
                x = b[i, k] - a[j, k]
                sm += x * x
                x = b[i, k] + a[j, k]
                sp += x * x
            dist[i, j] = sqrt(sm if sm < sp else sp)
    order = np.argsort(dist_arr, axis=None, kind="stable")
    cdef long long[::1] o = out
    used_prev = np.zeros(na, dtype=np.bool_)
    used_cur = np.zeros(nb, dtype=np.bool_)
    cdef cnp.npy_bool[::1] up = used_prev
    cdef cnp.npy_bool[::1] uc = used_cur
    cdef Py_ssize_t flat
    for flat in order:
        i = flat // na
        j = flat % na
        if dist[i, j] > threshold:
            break
        if uc[i] or up[j]:
            continue
        o[i] = j
        uc[i] = True
        up[j] = True
    return out
