"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when it imports; otherwise the
numpy implementations in ``_fallback`` take over. Setting the environment
variable ``SHIFTPRIMES_PURE_PYTHON=1`` forces the fallback.

Per-element kernels accept a ``threads`` argument: the input is split into
contiguous shards, each shard is processed independently and the outputs
are concatenated in order, so results never depend on the thread count.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

_impl = _fallback
if not os.environ.get("SHIFTPRIMES_PURE_PYTHON"):
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
_MIN_SHARD = 1 << 16


def backends():
    """Map of available backend name -> module (used by the benchmark)."""
    found = {"python": _fallback}
    try:
        from . import _core
        found["cython"] = _core
    except ImportError:
        pass
    return found


def default_threads():
    return os.cpu_count() or 1


def _sharded(fn, values, threads, *args):
    values = np.ascontiguousarray(values, dtype=np.int64)
    threads = max(1, int(threads or 1))
    if threads == 1 or values.size < 2 * _MIN_SHARD:
        return fn(values, *args)
    shards = np.array_split(values, min(threads, values.size // _MIN_SHARD))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda s: fn(s, *args), shards))
    return np.concatenate(parts)


def sieve_spf(limit, segment_size=1 << 20):
    return _impl.sieve_spf(int(limit), int(segment_size))


def smooth_parts(values, y, spf, threads=1):
    return _sharded(lambda v, y_, s: _impl.smooth_parts(v, y_, s), values, threads, int(y), spf)


def prime_set_counts(values, spf, labels, nsets, big, threads=1):
    labels = np.ascontiguousarray(labels, dtype=np.int32)
    big = np.ascontiguousarray(big, dtype=np.uint8)
    fn = lambda v: _impl.prime_set_counts(v, spf, labels, int(nsets), big)
    return _sharded(fn, values, threads)


def omega_upto(values, spf, t, threads=1):
    return _sharded(lambda v: _impl.omega_upto(v, spf, int(t)), values, threads)


def distinct_prime_product(values, spf, factor, threads=1):
    factor = np.ascontiguousarray(factor, dtype=np.float64)
    return _sharded(lambda v: _impl.distinct_prime_product(v, spf, factor), values, threads)


def smooth_numbers(primes, bound, max_count):
    return _impl.smooth_numbers(primes, int(bound), int(max_count))


iter_smooth = _fallback.iter_smooth
