# cython: language_level=3, boundscheck=False, wraparound=False
"""int64 counting kernels; return None on overflow so the caller can fall back."""
from libc.stdlib cimport malloc, free, calloc
from libc.stdint cimport int64_t


cdef extern from *:
    """
    static int vpf_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int vpf_add_ovf(long long a, long long b, long long *r) nogil


def series_coeffs(parts, long n):
    if n < 0:
        return []
    cdef long long *c = <long long *> calloc(n + 1, sizeof(long long))
    cdef long k, a
    cdef long long r
    cdef bint bad = False
    c[0] = 1
    try:
        for a in parts:
            for k in range(a, n + 1):
                if vpf_add_ovf(c[k], c[k - a], &r):
                    bad = True
                    break
                c[k] = r
            if bad:
                break
        if bad:
            return None
        return [c[k] for k in range(n + 1)]
    finally:
        free(c)


def count_solutions(columns, rhs):
    cdef int m = len(rhs)
    cdef long i, j, f, off, size, total
    cdef long long r
    cdef int d
    for b in rhs:
        if b < 0:
            return 0
    cdef long *strides = <long *> malloc(m * sizeof(long))
    cdef long *hi = <long *> malloc(m * sizeof(long))
    cdef long *lo = <long *> malloc(m * sizeof(long))
    cdef long *idx = <long *> malloc(m * sizeof(long))
    cdef long long *cnt = NULL
    try:
        size = 1
        for i in range(m - 1, -1, -1):
            strides[i] = size
            hi[i] = rhs[i]
            size *= rhs[i] + 1
        cnt = <long long *> calloc(size, sizeof(long long))
        cnt[0] = 1
        for col in columns:
            skip = False
            off = 0
            for i in range(m):
                lo[i] = col[i]
                if lo[i] > hi[i]:
                    skip = True
                off += lo[i] * strides[i]
            if skip:
                continue
            for i in range(m):
                idx[i] = lo[i]
            while True:
                f = 0
                for i in range(m):
                    f += idx[i] * strides[i]
                if vpf_add_ovf(cnt[f], cnt[f - off], &r):
                    return None
                cnt[f] = r
                # odometer increment, last coordinate fastest
                j = m - 1
                while j >= 0:
                    idx[j] += 1
                    if idx[j] <= hi[j]:
                        break
                    idx[j] = lo[j]
                    j -= 1
                if j < 0:
                    break
        return cnt[size - 1]
    finally:
        free(strides); free(hi); free(lo); free(idx)
        if cnt != NULL:
            free(cnt)
