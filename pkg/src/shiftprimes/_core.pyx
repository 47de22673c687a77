# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same signatures and results as ``_fallback``."""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.int64_t i64
ctypedef cnp.uint32_t u32


cdef i64 _isqrt(i64 n) nogil:
    cdef i64 r = <i64>sqrt(<double>n)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


def sieve_spf(i64 limit, i64 segment_size):
    cdef cnp.ndarray[u32, ndim=1] out = np.zeros(limit + 1, dtype=np.uint32)
    cdef u32[::1] spf = out
    cdef i64 root = _isqrt(limit)
    cdef i64 i, j, p, lo, hi, start, nbase = 0
    cdef cnp.ndarray[i64, ndim=1] base_arr = np.zeros(root + 1, dtype=np.int64)
    cdef i64[::1] base = base_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] small_arr = np.ones(root + 1, dtype=np.uint8)
    cdef cnp.uint8_t[::1] small = small_arr

    for i in range(2, root + 1):
        if small[i]:
            base[nbase] = i
            nbase += 1
            j = i * i
            while j <= root:
                small[j] = 0
                j += i

    with nogil:
        lo = 2
        while lo <= limit:
            hi = lo + segment_size
            if hi > limit + 1:
                hi = limit + 1
            for i in range(nbase):
                p = base[i]
                if p * p >= hi:
                    break
                start = ((lo + p - 1) // p) * p
                if start < p * p:
                    start = p * p
                j = start
                while j < hi:
                    if spf[j] == 0:
                        spf[j] = <u32>p
                    j += p
            for j in range(lo, hi):
                if spf[j] == 0:
                    spf[j] = <u32>j
            lo = hi
    return out


def smooth_parts(values, i64 y, const u32[::1] spf):
    cdef const i64[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = vals.shape[0], k
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef i64[::1] part = out
    cdef i64 r, m, p
    with nogil:
        for k in range(n):
            r = vals[k]
            m = 1
            while r > 1:
                p = spf[r]
                if p > y:
                    break
                m *= p
                r //= p
            part[k] = m
    return out


def prime_set_counts(values, const u32[::1] spf, labels, int nsets, big):
    cdef const i64[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef const cnp.int32_t[::1] lab = np.ascontiguousarray(labels, dtype=np.int32)
    cdef const cnp.uint8_t[::1] isbig = np.ascontiguousarray(big, dtype=np.uint8)
    cdef Py_ssize_t n = vals.shape[0], k
    cdef i64 nlab = lab.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out = np.zeros((n, nsets), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] cnt = out
    cdef i64 r, p, last
    cdef int s
    with nogil:
        for k in range(n):
            r = vals[k]
            last = 0
            while r > 1:
                p = spf[r]
                if p >= nlab:
                    break
                s = lab[p]
                if s > 0 and (isbig[s - 1] or p != last):
                    cnt[k, s - 1] += 1
                last = p
                r //= p
    return out


def omega_upto(values, const u32[::1] spf, i64 t):
    cdef const i64[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = vals.shape[0], k
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out = np.zeros(n, dtype=np.int32)
    cdef cnp.int32_t[::1] cnt = out
    cdef i64 r, p, last
    with nogil:
        for k in range(n):
            r = vals[k]
            last = 0
            while r > 1:
                p = spf[r]
                if p > t:
                    break
                if p != last:
                    cnt[k] += 1
                last = p
                r //= p
    return out


def distinct_prime_product(values, const u32[::1] spf, factor):
    cdef const i64[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef const double[::1] fac = np.ascontiguousarray(factor, dtype=np.float64)
    cdef Py_ssize_t n = vals.shape[0], k
    cdef cnp.ndarray[double, ndim=1] out = np.ones(n, dtype=np.float64)
    cdef double[::1] prod = out
    cdef i64 r, p, last
    with nogil:
        for k in range(n):
            r = vals[k]
            last = 0
            while r > 1:
                p = spf[r]
                if p != last:
                    prod[k] *= fac[p]
                last = p
                r //= p
    return out


def smooth_numbers(primes, i64 bound, i64 max_count):
    """Depth-first generation of smooth numbers, sorted on return."""
    cdef const i64[::1] ps = np.ascontiguousarray(sorted(int(q) for q in primes), dtype=np.int64)
    cdef Py_ssize_t nps = ps.shape[0]
    cdef i64 cap = 1024, scap = 1024, count = 0, top = 1
    cdef cnp.ndarray[i64, ndim=1] buf = np.empty(cap, dtype=np.int64)
    # explicit stack of (value, smallest allowed prime index)
    cdef cnp.ndarray[i64, ndim=1] sval = np.empty(scap, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] sidx = np.empty(scap, dtype=np.int64)
    cdef i64[::1] out_v = buf, sv = sval, si = sidx
    cdef i64 v, w, i, j
    sv[0] = 1
    si[0] = 0
    while top > 0:
        top -= 1
        v = sv[top]
        i = si[top]
        if count == max_count:
            return np.zeros(0, dtype=np.int64), True
        if count == cap:
            cap *= 2
            buf = np.resize(buf, cap)
            out_v = buf
        out_v[count] = v
        count += 1
        for j in range(i, nps):
            w = v * ps[j]
            if w > bound:
                break
            if top == scap:
                scap *= 2
                sval = np.resize(sval, scap)
                sidx = np.resize(sidx, scap)
                sv = sval
                si = sidx
            sv[top] = w
            si[top] = j
            top += 1
    out = buf[:count].copy()
    out.sort()
    return out, False
