"""Transference between integers and shifted primes, the Lambda(n, t)
fluctuation statistic, omega moments, and the smooth-moduli deviation scan
for primes in progressions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError
from .model import h1, h2
from .poisson_lab import PrimePartition, empirical_joint_integers, empirical_joint_shifted
from .tv_lab import bound_curves, dtv_finite, shifted_values, u_of

#: Lambda(n, t) needs log_4 t > 0, i.e. t > e^(e^e)
LAMBDA_T_MIN = math.exp(math.e**math.e)


class SmallScaleWarning(UserWarning):
    """log_4 t < 1: the statistic is defined but far from its asymptotic regime."""


# -- regions -------------------------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    """A subset of N_0^m given by one of four forms.

    kind "rectangle": ``bounds`` holds one (lo, hi) per coordinate, inclusive,
    None meaning unbounded. kind "threshold": ``coord``, ``op`` ("<=" or
    ">="), ``bound``. kind "tuples": ``tuples`` is an explicit finite set.
    kind "predicate": ``test`` is any callable on tuples.
    """

    dim: int
    kind: str
    bounds: tuple = ()
    coord: int = 0
    op: str = ">="
    bound: int = 0
    tuples: frozenset = frozenset()
    test: Optional[Callable] = field(default=None, compare=False)
    negate: bool = False

    def __post_init__(self):
        if self.kind not in ("rectangle", "threshold", "tuples", "predicate"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind == "rectangle" and len(self.bounds) != self.dim:
            raise DomainError("rectangle needs one interval per coordinate")
        if self.kind == "threshold" and (self.op not in ("<=", ">=") or not 0 <= self.coord < self.dim):
            raise DomainError("bad threshold region")
        if self.kind == "predicate" and self.test is None:
            raise DomainError("predicate region needs a test")

    def _inside(self, t):
        if self.kind == "rectangle":
            return all((lo is None or v >= lo) and (hi is None or v <= hi)
                       for v, (lo, hi) in zip(t, self.bounds))
        if self.kind == "threshold":
            v = t[self.coord]
            return v >= self.bound if self.op == ">=" else v <= self.bound
        if self.kind == "tuples":
            return tuple(t) in self.tuples
        return bool(self.test(tuple(t)))

    def contains(self, t):
        if len(t) != self.dim:
            raise DomainError(f"tuple {t} has wrong dimension for a {self.dim}-dim region")
        return self._inside(t) != self.negate

    def complement(self):
        return RegionSpec(self.dim, self.kind, self.bounds, self.coord, self.op, self.bound,
                          self.tuples, self.test, not self.negate)


def rectangle(*bounds):
    return RegionSpec(len(bounds), "rectangle", bounds=tuple(bounds))


def threshold(dim, coord, op, bound):
    return RegionSpec(dim, "threshold", coord=coord, op=op, bound=bound)


def tuple_set(dim, tuples):
    return RegionSpec(dim, "tuples", tuples=frozenset(tuple(t) for t in tuples))


def predicate(dim, test):
    return RegionSpec(dim, "predicate", test=test)


def everything(dim):
    return rectangle(*[(None, None)] * dim)


def nothing(dim):
    return everything(dim).complement()


def random_rectangles(dim, count, rng, top=6):
    """Rectangles with random integer corners in [0, top]; some sides open."""
    out = []
    for _ in range(count):
        bounds = []
        for _ in range(dim):
            lo, hi = sorted(int(v) for v in rng.integers(0, top + 1, size=2))
            if rng.random() < 0.25:
                hi = None
            bounds.append((lo, hi))
        out.append(rectangle(*bounds))
    return out


# -- transference ---------------------------------------------------------------

@dataclass
class TransferenceReport:
    p_int: Fraction
    p_shift: Fraction
    diff: float
    bound: float
    region_id: str = ""

    def __iter__(self):
        return iter((self.p_int, self.p_shift, self.diff, self.bound))

    def csv_row(self):
        return {"region_id": self.region_id, "p_int": float(self.p_int),
                "p_shift": float(self.p_shift), "diff": self.diff, "bound": self.bound}


TRANSFERENCE_COLUMNS = ("region_id", "p_int", "p_shift", "diff", "bound")


def transference_bound(x, y, partition, alpha, A):
    u = u_of(x, y)
    b_alpha, _, b_log = bound_curves(u, alpha, x, A)
    h_terms = math.fsum(float(h2(T)) / (1 + math.sqrt(float(h1(T)))) for T in partition)
    return h_terms + b_alpha + b_log


def transference_report(x, y, a, partition: PrimePartition, region: RegionSpec, table,
                        alpha=0.5, A=1.0, joints=None, threads=1, region_id=""):
    """Gap between P(F(n) in R) over n <= x and P(F(p+a) in R) over primes.

    ``joints`` may carry precomputed (integer, shifted) joint laws so that
    many regions can be scored against one pass over the data.
    """
    if partition.max_prime > y:
        raise DomainError(f"partition primes must be <= y={y}")
    if region.dim != len(partition):
        raise DomainError("region dimension must match the partition size")
    if joints is None:
        joints = (empirical_joint_integers(x, partition, table, threads),
                  empirical_joint_shifted(x, a, partition, table, threads))
    p_int, p_shift = joints[0].probability(region), joints[1].probability(region)
    diff = abs(p_int - p_shift)
    return TransferenceReport(p_int, p_shift, float(diff),
                              transference_bound(x, y, partition, alpha, A), region_id)


def joint_gap(joints):
    """d_TV between the integer and shifted-prime joint laws: the largest
    region gap any region can show."""
    return dtv_finite(joints[0], joints[1]).value


# -- Lambda(n, t) -----------------------------------------------------------------

def iterated_log(t, k):
    v = float(t)
    for _ in range(k):
        if v <= 0:
            return -math.inf
        v = math.log(v)
    return v


def lambda_from_omega(omega, t):
    l2, l4 = iterated_log(t, 2), iterated_log(t, 4)
    if not l4 > 0:
        err = DomainError(f"Lambda needs log_4 t > 0, i.e. t > {LAMBDA_T_MIN:.6g}; got t={t}")
        err.t_min = LAMBDA_T_MIN
        raise err
    if l4 < 1:
        warnings.warn(f"log_4 t = {l4:.4g} < 1 at t={t:.6g}", SmallScaleWarning, stacklevel=3)
    return (np.asarray(omega, dtype=np.float64) - l2) / math.sqrt(2 * l2 * l4)


def lambda_statistic(n, t, table):
    """(omega(n, [2, t]) - log_2 t) / sqrt(2 log_2 t log_4 t)."""
    n = table.check(n)
    om = int(kernels.omega_upto(np.array([n]), table.spf, int(math.floor(t)))[0])
    return float(lambda_from_omega(om, t))


@dataclass(frozen=True)
class LilConfig:
    x: int
    a: int = 1
    xi: Callable = math.log
    ratio: float = 2.0
    grid: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("the shift a must be nonzero")
        if not self.ratio > 1:
            raise DomainError("grid ratio must exceed 1")
        if self.xi(self.x) > math.log(self.x) + 1e-12:
            raise DomainError("xi(x) must not exceed log x")

    def t_grid(self):
        """Grid points in (max(xi(x), t_min), x], ascending.

        The default grid is geometric downward from x with the given ratio.
        """
        lower = max(self.xi(self.x), LAMBDA_T_MIN)
        if self.grid is not None:
            pts = sorted(float(t) for t in self.grid if lower < t <= self.x)
        else:
            pts, t = [], float(self.x)
            while t > lower:
                pts.append(t)
                t /= self.ratio
            pts.reverse()
        if not pts:
            raise DomainError(f"empty t-grid in ({lower:.6g}, {self.x}]")
        return pts


def lil_profile(n, cfg: LilConfig, table):
    """(inf, sup, argmin t, argmax t) of Lambda(n, t) over the t-grid."""
    n = table.check(n)
    ts = cfg.t_grid()
    vals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallScaleWarning)
        for t in ts:
            vals.append(lambda_statistic(n, t, table))
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return vals[i], vals[j], ts[i], ts[j]


def lil_profiles(cfg: LilConfig, table, threads=1):
    """Profiles of Lambda(p + a, t) for every prime p in (|a|+1, x].

    Returns (primes, inf, sup) arrays.
    """
    vals = shifted_values(cfg.x, cfg.a, table)
    ts = cfg.t_grid()
    lo = np.full(vals.size, np.inf)
    hi = np.full(vals.size, -np.inf)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallScaleWarning)
        for t in ts:
            lam = lambda_from_omega(kernels.omega_upto(vals, table.spf, int(t), threads=threads), t)
            np.minimum(lo, lam, out=lo)
            np.maximum(hi, lam, out=hi)
    return vals - cfg.a, lo, hi


# -- omega moments -----------------------------------------------------------------

def omega_moments_shifted(x, a, table, threads=1):
    """Exact (mean, variance) of omega(p + a) over primes p in (|a|+1, x]."""
    vals = shifted_values(x, a, table)
    if vals.size == 0:
        raise DomainError(f"no primes in ({abs(a) + 1}, {x}]")
    om = kernels.omega_upto(vals, table.spf, table.limit, threads=threads).astype(np.int64)
    n = int(vals.size)
    s1, s2 = int(om.sum()), int((om * om).sum())
    mean = Fraction(s1, n)
    return mean, Fraction(s2, n) - mean * mean


# -- smooth-moduli deviation scan --------------------------------------------------

@dataclass(frozen=True)
class ZScanConfig:
    x: int
    M: int
    delta: float = 1.0
    a: int = 1
    theta: float = 0.51
    A: float = 1.0

    def __post_init__(self):
        if self.M < 1:
            raise DomainError("modulus bound M must be >= 1")
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")
        if self.a == 0:
            raise DomainError("the shift a must be nonzero")
        if self.M > self.x:
            raise DomainError("need M <= x")

    @property
    def y(self):
        """Smoothness bound x^delta for the moduli."""
        return int(math.floor(self.x**self.delta + 1e-9))


def _ap_counts(primes, a, smax):
    """pi(x; s, -a) for s = 1..smax, indexed by s (entry 0 unused)."""
    out = np.zeros(smax + 1, dtype=np.int64)
    shifted = primes + a
    for s in range(1, smax + 1):
        out[s] = np.count_nonzero(shifted % s == 0)
    return out


def _phi_upto(n):
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def _largest_prime_factor_upto(n, table):
    vals = np.arange(n + 1, dtype=np.int64)
    lpf = np.zeros(n + 1, dtype=np.int64)
    rest = vals.copy()
    idx = np.flatnonzero(rest > 1)
    while idx.size:
        p = table.spf[rest[idx]].astype(np.int64)
        lpf[idx] = p
        rest[idx] //= p
        idx = idx[rest[idx] > 1]
    return lpf


def hypothesis_z_scan(cfg: ZScanConfig, table):
    """Deviation of pi(x; m, -a) from pi(x)/phi(m) over smooth moduli.

    Returns (deviation_sum, per_m, members_of_E). ``per_m`` lists (m,
    deviation) for every x^delta-smooth m <= M coprime to a. ``members_of_E``
    lists the scanned m <= x^theta whose sum over smooth d <= x^theta/m with
    (dm, a) = 1 of |pi(x; dm, -a) - pi(x)/phi(dm)| reaches
    pi(x) / (phi(m) (log x)^A).
    """
    x, a, y = cfg.x, cfg.a, cfg.y
    table.require(max(x, cfg.M), "z-scan")
    primes = table.primes(x)
    pix = int(primes.size)
    s_max = max(cfg.M, int(math.floor(x**cfg.theta + 1e-9)))
    table.require(s_max, "moduli")
    counts = _ap_counts(primes, a, s_max)
    phi = _phi_upto(s_max)
    lpf = _largest_prime_factor_upto(s_max, table)
    s = np.arange(s_max + 1)
    ok = (s >= 1) & (lpf <= y) & (np.gcd(s, abs(a)) == 1)
    dev = np.zeros(s_max + 1)
    dev[1:] = np.abs(counts[1:] - pix / phi[1:])
    per_m = [(int(m), float(dev[m])) for m in range(1, cfg.M + 1) if ok[m]]
    total = math.fsum(d for _, d in per_m)

    members = []
    xt = x**cfg.theta
    thresh = pix / math.log(x) ** cfg.A
    for m, _ in per_m:
        if m > xt:
            break
        dmax = int(math.floor(xt / m + 1e-9))
        ds = np.arange(1, dmax + 1)
        sel = ds[ok[ds * m]]
        inner = math.fsum(dev[sel * m].tolist())
        if inner >= thresh / phi[m]:
            members.append(m)
    return total, per_m, members
