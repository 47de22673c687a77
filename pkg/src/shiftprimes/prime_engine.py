"""Sieve infrastructure: smallest-prime-factor tables, factorisation,
smooth parts, smooth-number enumeration, Psi(x, y) and prime counts in
arithmetic progressions.

Everything here is exact integer arithmetic.
"""
from __future__ import annotations

import math
import operator
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator

import numpy as np

from . import kernels
from .errors import BudgetExceeded, CacheFormatError, DomainError, ResourceError

#: P^-(1) by convention; compares above every integer.
INFINITY = math.inf

DEFAULT_SEGMENT = 1 << 20
#: bytes of SPF storage allowed by default (4 bytes per entry)
DEFAULT_MEMORY_BUDGET = 1 << 32

CACHE_MAGIC = b"SPFC"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHQ")


@dataclass(frozen=True, eq=False)
class SieveTable:
    """Smallest prime factor of every n in [2, limit].

    ``spf`` is indexed directly by n; entries 0 and 1 are 0 and unused.
    The array is marked read-only so tables can be shared freely.
    """

    limit: int
    spf: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.spf.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, SieveTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.spf, other.spf)

    def __hash__(self):
        return hash((self.limit, self.spf[-1].item()))

    def check(self, n, lo=1):
        n = operator.index(n)
        if not lo <= n <= self.limit:
            raise DomainError(f"n={n} outside [{lo}, {self.limit}] covered by the sieve")
        return n

    def require(self, bound, what="value"):
        if bound > self.limit:
            raise ResourceError(
                f"sieve limit {self.limit} too small: {what} needs a table up to {bound}"
            )

    @cached_property
    def prime_array(self):
        idx = np.arange(self.limit + 1, dtype=np.int64)
        arr = np.flatnonzero(self.spf == idx)
        arr = arr[arr >= 2].astype(np.int64)
        arr.setflags(write=False)
        return arr

    def primes(self, hi=None, lo=1):
        """Primes p with lo < p <= hi (hi defaults to the limit)."""
        hi = self.limit if hi is None else hi
        self.require(hi, "prime range")
        arr = self.prime_array
        return arr[np.searchsorted(arr, lo, side="right") : np.searchsorted(arr, hi, side="right")]

    def is_prime(self, n):
        n = self.check(n)
        return n >= 2 and int(self.spf[n]) == n

    def smallest_prime_factor(self, n):
        n = self.check(n)
        return INFINITY if n == 1 else int(self.spf[n])

    def largest_prime_factor(self, n):
        n = self.check(n)
        big = 0
        while n > 1:
            big = int(self.spf[n])
            n //= big
        return big


@dataclass(frozen=True)
class Factorization:
    entries: tuple[tuple[int, int], ...] = ()

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def value(self):
        return math.prod(p**e for p, e in self.entries)

    def exponent(self, p):
        return dict(self.entries).get(p, 0)


@dataclass(frozen=True)
class SmoothEnumConfig:
    y: int
    max_value: int
    max_count: int = 10**7

    def __post_init__(self):
        if self.y < 2:
            raise DomainError(f"smoothness bound y must be >= 2, got {self.y}")
        if self.max_value < 1:
            raise DomainError(f"max_value must be >= 1, got {self.max_value}")
        if self.max_count <= 0:
            raise DomainError(f"max_count must be positive, got {self.max_count}")


def build_sieve(limit, segment_size=DEFAULT_SEGMENT, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Build the SPF table for [2, limit] with a segmented sieve."""
    limit = operator.index(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if 4 * (limit + 1) > memory_budget:
        raise ResourceError(
            f"sieve limit {limit} needs {4 * (limit + 1)} bytes, budget is {memory_budget}"
        )
    if limit >= 2**32:
        raise ResourceError("SPF entries are 32-bit; limit must be < 2**32")
    return SieveTable(limit, kernels.sieve_spf(limit, segment_size))


def primes_upto(n):
    """Primes <= n without a table (small n only)."""
    return kernels._fallback._base_primes(int(n))


def factorize(n, table):
    n = table.check(n)
    out = []
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return Factorization(tuple(out))


def euler_phi(n, table):
    phi = table.check(n)
    for p, _ in factorize(n, table):
        phi -= phi // p
    return phi


def smooth_part(n, y, table):
    """Split n = m * cofactor with P^+(m) <= y < P^-(cofactor)."""
    n = table.check(n)
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    m, rest = 1, n
    while rest > 1:
        p = int(table.spf[rest])
        if p > y:
            break
        m *= p
        rest //= p
    return m, rest


def enumerate_smooth(cfg: SmoothEnumConfig) -> Iterator[int]:
    """Yield every y-smooth m <= max_value in increasing order, starting at 1.

    Raises BudgetExceeded instead of emitting value number ``max_count + 1``.
    """
    count, last = 0, None
    for v in kernels.iter_smooth(primes_upto(cfg.y), cfg.max_value):
        if count == cfg.max_count:
            raise BudgetExceeded(
                f"more than {cfg.max_count} {cfg.y}-smooth values <= {cfg.max_value}",
                emitted=count,
                last=last,
            )
        count += 1
        last = v
        yield v


def psi(x, y, table, chunk=1 << 20):
    """Psi(x, y): the number of n <= x with P^+(n) <= y."""
    x = operator.index(x)
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if x < 1:
        return 0
    table.check(x)
    if y >= x:
        return x
    total = 0
    for lo in range(1, x + 1, chunk):
        n = np.arange(lo, min(lo + chunk, x + 1), dtype=np.int64)
        total += int(np.count_nonzero(kernels.smooth_parts(n, y, table.spf) == n))
    return total


def prime_pi(x, table):
    if x < 2:
        return 0
    table.require(x, "pi(x)")
    return int(np.searchsorted(table.prime_array, x, side="right"))


def prime_count_ap(x, m, b, table):
    """pi(x; m, b): primes p <= x with p = b (mod m)."""
    if m < 1:
        raise DomainError(f"modulus must be >= 1, got {m}")
    if x < 2:
        return 0
    ps = table.primes(x)
    if m == 1:
        return int(ps.size)
    return int(np.count_nonzero(ps % m == b % m))


def save_sieve(table, path):
    """Write the SPFC cache file: header then uint32 LE entries for 2..limit."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit))
        fh.write(np.ascontiguousarray(table.spf[2:], dtype="<u4").tobytes())
    return path


def load_sieve(path):
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, version, limit = _HEADER.unpack(head)
        if magic != CACHE_MAGIC:
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise CacheFormatError(f"{path}: unsupported version {version}")
        if limit < 2:
            raise CacheFormatError(f"{path}: invalid limit {limit}")
        body = fh.read()
    if len(body) != 4 * (limit - 1):
        raise CacheFormatError(
            f"{path}: expected {4 * (limit - 1)} bytes of entries, found {len(body)}"
        )
    spf = np.zeros(limit + 1, dtype=np.uint32)
    spf[2:] = np.frombuffer(body, dtype="<u4")
    return SieveTable(int(limit), spf)


def verify_sieve(table):
    """Check the SPF invariants over the whole table; return a list of problems."""
    n = np.arange(2, table.limit + 1, dtype=np.int64)
    s = table.spf[2:].astype(np.int64)
    problems = []
    if np.any(s < 2) or np.any(n % s != 0):
        problems.append("spf[n] does not divide n")
    if np.any(table.spf[s].astype(np.int64) != s):
        problems.append("spf[n] is not prime")
    if np.any((s != n) & (s * s > n)):
        problems.append("composite n with spf[n] > sqrt(n)")
    return problems
