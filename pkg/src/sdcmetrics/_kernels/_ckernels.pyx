# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_fallback``."""
import numpy as np

from libc.stdlib cimport qsort, malloc, free


cdef struct KeyIdx:
    double key
    Py_ssize_t idx


cdef int _cmp_keyidx(const void* a, const void* b) noexcept nogil:
    cdef const KeyIdx* x = <const KeyIdx*>a
    cdef const KeyIdx* y = <const KeyIdx*>b
    if x.key < y.key:
        return -1
    if x.key > y.key:
        return 1
    if x.idx < y.idx:
        return -1
    if x.idx > y.idx:
        return 1
    return 0


cdef inline bint _less(const KeyIdx* a, const KeyIdx* b) noexcept nogil:
    return a.key < b.key or (a.key == b.key and a.idx < b.idx)


cdef void _select_smallest(KeyIdx* buf, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    # quickselect: afterwards buf[:k] holds the k smallest entries, unordered
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j
    cdef KeyIdx pivot, tmp
    while lo < hi:
        pivot = buf[(lo + hi) // 2]
        i = lo
        j = hi
        while i <= j:
            while _less(&buf[i], &pivot):
                i += 1
            while _less(&pivot, &buf[j]):
                j -= 1
            if i <= j:
                tmp = buf[i]; buf[i] = buf[j]; buf[j] = tmp
                i += 1
                j -= 1
        if k - 1 <= j:
            hi = j
        elif k - 1 >= i:
            lo = i
        else:
            return


def average_ranks(values):
    cdef const double[:, :] v = np.asarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], m = v.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef KeyIdx* buf = <KeyIdx*>malloc(max(n, 1) * sizeof(KeyIdx))
    cdef Py_ssize_t i, j, start, end, t
    cdef double avg
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for j in range(m):
                for i in range(n):
                    buf[i].key = v[i, j]
                    buf[i].idx = i
                qsort(buf, n, sizeof(KeyIdx), _cmp_keyidx)
                start = 0
                while start < n:
                    end = start + 1
                    while end < n and buf[end].key == buf[start].key:
                        end += 1
                    avg = (start + 1 + end) / 2.0
                    for t in range(start, end):
                        out[buf[t].idx, j] = avg
                    start = end
    finally:
        free(buf)
    return out_arr


cdef void _centroid(const double[:, ::1] pts, const Py_ssize_t* rem, Py_ssize_t nrem,
                    double* c) noexcept nogil:
    cdef Py_ssize_t m = pts.shape[1], i, d
    for d in range(m):
        c[d] = 0.0
    for i in range(nrem):
        for d in range(m):
            c[d] += pts[rem[i], d]
    for d in range(m):
        c[d] /= nrem


cdef double _sq(const double[:, ::1] pts, Py_ssize_t row, const double* ref) noexcept nogil:
    cdef Py_ssize_t d
    cdef double acc = 0.0, diff
    for d in range(pts.shape[1]):
        diff = pts[row, d] - ref[d]
        acc += diff * diff
    return acc


cdef Py_ssize_t _farthest(const double[:, ::1] pts, const Py_ssize_t* rem, Py_ssize_t nrem,
                          const double* ref) noexcept nogil:
    cdef Py_ssize_t i, best = 0
    cdef double dist, best_d = -1.0
    for i in range(nrem):
        dist = _sq(pts, rem[i], ref)
        if dist > best_d:
            best_d = dist
            best = i
    return best


cdef Py_ssize_t _take(const double[:, ::1] pts, Py_ssize_t* rem, Py_ssize_t nrem,
                      Py_ssize_t pos, Py_ssize_t k, KeyIdx* buf, double* ref,
                      long long* labels, long long cid) noexcept nogil:
    # assigns the k nearest remaining rows to cid and compacts rem; returns new size
    cdef Py_ssize_t i, d, out = 0
    for d in range(pts.shape[1]):
        ref[d] = pts[rem[pos], d]
    for i in range(nrem):
        buf[i].key = _sq(pts, rem[i], ref)
        buf[i].idx = i
    buf[pos].key = -1.0
    _select_smallest(buf, nrem, k)
    for i in range(k):
        labels[rem[buf[i].idx]] = cid
    for i in range(nrem):
        if labels[rem[i]] != cid:
            rem[out] = rem[i]
            out += 1
    return out


def mdav_labels(points, k):
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], m = pts.shape[1]
    cdef Py_ssize_t kk = k
    labels_arr = np.full(n, -1, dtype=np.longlong)
    cdef long long[::1] labels = labels_arr
    cdef Py_ssize_t* rem = <Py_ssize_t*>malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef KeyIdx* buf = <KeyIdx*>malloc(max(n, 1) * sizeof(KeyIdx))
    cdef double* c = <double*>malloc(max(m, 1) * sizeof(double))
    cdef double* ref = <double*>malloc(max(m, 1) * sizeof(double))
    cdef double* r_point = <double*>malloc(max(m, 1) * sizeof(double))
    cdef Py_ssize_t i, d, r, s, nrem = n
    cdef long long cid = 0
    if rem == NULL or buf == NULL or c == NULL or ref == NULL or r_point == NULL:
        free(rem); free(buf); free(c); free(ref); free(r_point)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                rem[i] = i
            while nrem >= 3 * kk:
                _centroid(pts, rem, nrem, c)
                r = _farthest(pts, rem, nrem, c)
                for d in range(m):
                    r_point[d] = pts[rem[r], d]
                nrem = _take(pts, rem, nrem, r, kk, buf, ref, &labels[0], cid)
                cid += 1
                s = _farthest(pts, rem, nrem, r_point)
                nrem = _take(pts, rem, nrem, s, kk, buf, ref, &labels[0], cid)
                cid += 1
            if nrem >= 2 * kk:
                _centroid(pts, rem, nrem, c)
                r = _farthest(pts, rem, nrem, c)
                nrem = _take(pts, rem, nrem, r, kk, buf, ref, &labels[0], cid)
                cid += 1
            for i in range(nrem):
                labels[rem[i]] = cid
    finally:
        free(rem); free(buf); free(c); free(ref); free(r_point)
    return labels_arr.astype(np.int64, copy=False)
