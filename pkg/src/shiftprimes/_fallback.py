"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_core.pyx``.
The loops are vectorised across the input array: each pass strips one
prime factor (the smallest one, read from the SPF table) from every
element that still has one, so the number of passes is bounded by
``log2(limit)``.
"""
import heapq
import math

import numpy as np

BACKEND = "python"


def _base_primes(limit):
    """Primes <= limit by a plain boolean sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_spf(limit, segment_size):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    base = _base_primes(math.isqrt(limit))
    for lo in range(2, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        seg = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            sub = seg[start - lo :: p]
            sub[sub == 0] = p
        zero = seg == 0
        seg[zero] = np.arange(lo, hi, dtype=np.uint32)[zero]
    return spf


def smooth_parts(values, y, spf):
    rest = np.array(values, dtype=np.int64)
    part = np.ones_like(rest)
    idx = np.flatnonzero(rest > 1)
    while idx.size:
        p = spf[rest[idx]].astype(np.int64)
        keep = p <= y
        idx, p = idx[keep], p[keep]
        part[idx] *= p
        rest[idx] //= p
        idx = idx[rest[idx] > 1]
    return part


def prime_set_counts(values, spf, labels, nsets, big):
    rest = np.array(values, dtype=np.int64)
    out = np.zeros((rest.size, nsets), dtype=np.int32)
    last = np.zeros(rest.size, dtype=np.int64)
    nlab = labels.size
    big = np.asarray(big, dtype=bool)
    idx = np.flatnonzero(rest > 1)
    while idx.size:
        p = spf[rest[idx]].astype(np.int64)
        lab = np.where(p < nlab, labels[np.minimum(p, nlab - 1)], 0)
        hit = lab > 0
        if hit.any():
            hidx, hlab, hp = idx[hit], lab[hit] - 1, p[hit]
            inc = big[hlab] | (hp != last[hidx])
            out[hidx, hlab] += inc.astype(np.int32)
        last[idx] = p
        rest[idx] //= p
        # primes come out in increasing order, so past the largest labelled
        # prime nothing more can be counted
        idx = idx[(rest[idx] > 1) & (p < nlab)]
    return out


def omega_upto(values, spf, t):
    rest = np.array(values, dtype=np.int64)
    out = np.zeros(rest.size, dtype=np.int32)
    last = np.zeros(rest.size, dtype=np.int64)
    idx = np.flatnonzero(rest > 1)
    while idx.size:
        p = spf[rest[idx]].astype(np.int64)
        within = p <= t
        idx, p = idx[within], p[within]
        out[idx] += (p != last[idx]).astype(np.int32)
        last[idx] = p
        rest[idx] //= p
        idx = idx[rest[idx] > 1]
    return out


def distinct_prime_product(values, spf, factor):
    rest = np.array(values, dtype=np.int64)
    out = np.ones(rest.size, dtype=np.float64)
    last = np.zeros(rest.size, dtype=np.int64)
    idx = np.flatnonzero(rest > 1)
    while idx.size:
        p = spf[rest[idx]].astype(np.int64)
        new = p != last[idx]
        out[idx[new]] *= factor[p[new]]
        last[idx] = p
        rest[idx] //= p
        idx = idx[rest[idx] > 1]
    return out


def iter_smooth(primes, bound):
    """Yield every integer in [1, bound] whose prime factors lie in ``primes``,
    in increasing order.

    Each value v is generated once, from v / P^+(v), so the heap holds at
    most one entry per pending value.
    """
    primes = [int(p) for p in sorted(primes)]
    heap = [(1, 0)]
    while heap:
        v, i = heapq.heappop(heap)
        yield v
        for j in range(i, len(primes)):
            w = v * primes[j]
            if w > bound:
                break
            heapq.heappush(heap, (w, j))


def smooth_numbers(primes, bound, max_count):
    """Sorted array of smooth numbers <= bound, and an overflow flag.

    On overflow (more than ``max_count`` values) the array is empty.
    """
    out = []
    for v in iter_smooth(primes, bound):
        if len(out) == max_count:
            return np.zeros(0, dtype=np.int64), True
        out.append(v)
    return np.array(out, dtype=np.int64), False
