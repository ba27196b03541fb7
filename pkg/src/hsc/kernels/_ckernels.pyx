# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, M_PI
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef struct FkmState:
    int L
    int n_max
    int depth
    double limit
    double *table
    int *a
    double *lin


cdef double _cyclic(FkmState *st, int n) nogil:
    cdef double s = st.lin[n]
    cdef int i, q, c, lo
    lo = n - st.depth + 2
    if lo < 1:
        lo = 1
    for i in range(lo, n + 1):
        c = 0
        for q in range(st.depth):
            c = c * st.L + st.a[(i - 1 + q) % n + 1]
        s += st.table[c]
    return s


cdef void _gen(FkmState *st, int t, int p, list out_syms, list out_off, list out_per):
    cdef int n = t - 1
    cdef int j, q, c, start
    cdef double per
    if n >= 1 and n % p == 0:
        per = _cyclic(st, n)
        if per <= st.limit:
            for q in range(1, n + 1):
                out_syms.append(st.a[q])
            out_off.append(len(out_syms))
            out_per.append(per)
    if t > st.n_max:
        return
    start = st.a[t - p]
    for j in range(start, st.L):
        st.a[t] = j
        if t >= st.depth:
            c = 0
            for q in range(t - st.depth + 1, t + 1):
                c = c * st.L + st.a[q]
            st.lin[t] = st.lin[t - 1] + st.table[c]
        else:
            st.lin[t] = st.lin[t - 1]
        if st.lin[t] > st.limit:
            continue
        _gen(st, t + 1, p if j == start else t, out_syms, out_off, out_per)


def fkm_necklaces(int L, int n_max, table, int depth, double T, double tol=1e-12):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tab = np.ascontiguousarray(table, dtype=np.float64)
    cdef FkmState st
    cdef int i
    st.L = L
    st.n_max = n_max
    st.depth = depth
    st.limit = T + tol * max(1.0, abs(T))
    st.table = <double *> tab.data
    st.a = <int *> malloc((n_max + 2) * sizeof(int))
    st.lin = <double *> malloc((n_max + 2) * sizeof(double))
    for i in range(n_max + 2):
        st.a[i] = 0
        st.lin[i] = 0.0
    syms, offs, pers = [], [0], []
    try:
        _gen(&st, 1, 1, syms, offs, pers)
    finally:
        free(st.a)
        free(st.lin)
    return (np.array(syms, dtype=np.int8), np.array(offs, dtype=np.int64),
            np.array(pers, dtype=np.float64))


def greedy_cover(traj, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] X = np.ascontiguousarray(traj, dtype=np.float64)
    cdef Py_ssize_t N = X.shape[0], K = X.shape[1], D = X.shape[2]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] covered = np.zeros(N, dtype=np.uint8)
    cdef double[:, :, :] x = X
    cdef Py_ssize_t i, j, k, m
    cdef double eps2 = eps * eps, d2, diff
    cdef bint inside
    centers = []
    for i in range(N):
        if covered[i]:
            continue
        centers.append(i)
        covered[i] = 1
        for j in range(i + 1, N):
            if covered[j]:
                continue
            inside = True
            for k in range(K):
                d2 = 0.0
                for m in range(D):
                    diff = x[i, k, m] - x[j, k, m]
                    d2 += diff * diff
                if d2 > eps2:
                    inside = False
                    break
            if inside:
                covered[j] = 1
    return np.array(centers, dtype=np.int64)


cdef inline double _dot(double *u, double *v) nogil:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


cdef inline double _triple(double *a, double *b, double *c) nogil:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def gauss_linking(P, Q):
    cdef double[:, :] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[:, :] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], m = q.shape[0], i, j, i1, j1, t
    cdef double a[3]
    cdef double b[3]
    cdef double c[3]
    cdef double d[3]
    cdef double tp, an, bn, cn, dn, d1, d2, total = 0.0
    with nogil:
        for i in range(n):
            i1 = (i + 1) % n
            for j in range(m):
                j1 = (j + 1) % m
                for t in range(3):
                    a[t] = q[j, t] - p[i, t]
                    b[t] = q[j, t] - p[i1, t]
                    c[t] = q[j1, t] - p[i1, t]
                    d[t] = q[j1, t] - p[i, t]
                tp = _triple(a, b, c)
                an = sqrt(_dot(a, a))
                bn = sqrt(_dot(b, b))
                cn = sqrt(_dot(c, c))
                dn = sqrt(_dot(d, d))
                d1 = an * bn * cn + _dot(a, b) * cn + _dot(b, c) * an + _dot(c, a) * bn
                d2 = an * dn * cn + _dot(a, d) * cn + _dot(d, c) * an + _dot(c, a) * dn
                total += atan2(tp, d1) + atan2(tp, d2)
    return total / (2 * M_PI)


def bounded_scan(x):
    cdef cnp.int64_t[:] v = np.ascontiguousarray(x, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i, j, k, bi = 0, bj = 0
    cdef long best = 0, size, lo, hi, w
    if n == 1:
        return 0, 0, 1
    for i in range(n):
        for j in range(i + 1, n):
            lo = v[i] if v[i] < v[j] else v[j]
            hi = v[i] + v[j] - lo
            size = 2
            for k in range(i + 1, j):
                w = v[k]
                if lo < w < hi:
                    size += 1
            if size > best:
                best, bi, bj = size, i, j
    return int(bi), int(bj), int(best)
