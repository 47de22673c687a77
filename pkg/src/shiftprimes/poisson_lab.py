"""Poisson approximation of prime-divisor counts in disjoint prime sets."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import kernels
from .errors import DomainError
from .model import (BIG_OMEGA, OMEGA, Pmf, PrimeSet, exact_dist_R, h1, h2,
                    poisson_cap, poisson_parameter, poisson_tail, poisson_vector)
from .tv_lab import DistanceReport, bound_curves, dtv_finite, shifted_values, u_of

POISSON_TOL = 1e-12


@dataclass(frozen=True)
class PrimePartition:
    sets: tuple[PrimeSet, ...]

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise DomainError("a partition needs at least one set")
        seen = set()
        for T in sets:
            if not len(T):
                raise DomainError("partition sets must be nonempty")
            if seen & set(T.primes):
                raise DomainError("partition sets must be disjoint")
            seen |= set(T.primes)
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    @property
    def max_prime(self):
        return max(T.primes[-1] for T in self.sets)

    @property
    def lambdas(self):
        """Poisson parameters: H_1 for omega sets, H_1' for bigomega sets."""
        return [poisson_parameter(T) for T in self.sets]

    def labels(self):
        lab = np.zeros(self.max_prime + 1, dtype=np.int32)
        for i, T in enumerate(self.sets):
            lab[list(T.primes)] = i + 1
        big = np.array([T.mode == BIG_OMEGA for T in self.sets], dtype=np.uint8)
        return lab, big


class JointDist(Pmf):
    """Sparse law of an m-tuple of nonnegative integers."""

    def __init__(self, dim, weights, mass_deficit=0, tolerance=None, check=True):
        self.dim = dim
        if any(len(t) != dim for t in weights):
            raise DomainError(f"all tuples must have length {dim}")
        super().__init__(weights, mass_deficit, tolerance, check)

    def marginal(self, i):
        out = {}
        for t, w in self.items():
            out[t[i]] = out.get(t[i], 0) + w
        return Pmf(out, self.mass_deficit, self.tolerance, check=False)

    def probability(self, region):
        """P(tuple in region), summed over the listed support."""
        hits = [w for t, w in self.items() if region.contains(t)]
        if self.exact:
            return sum(hits, Fraction(0))
        return math.fsum(float(w) for w in hits)

    def to_jsonl(self):
        """One {"t": [...], "w": ...} record per tuple; exact weights as "n/d"."""
        def enc(w):
            return str(w) if isinstance(w, (int, Fraction)) else float(w)
        return "".join(json.dumps({"t": list(t), "w": enc(w)}) + "\n" for t, w in self.items())

    @classmethod
    def from_jsonl(cls, text, mass_deficit=0):
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not recs:
            raise DomainError("empty JointDist record stream")
        dec = lambda w: Fraction(w) if isinstance(w, str) else float(w)
        return cls(len(recs[0]["t"]), {tuple(r["t"]): dec(r["w"]) for r in recs}, mass_deficit)


def _joint_from_counts(mat, denom, dim):
    if mat.shape[0] == 0:
        raise DomainError("empty sample: no values to count")
    rows, counts = np.unique(mat, axis=0, return_counts=True)
    weights = {tuple(int(v) for v in r): Fraction(int(c), denom) for r, c in zip(rows, counts)}
    return JointDist(dim, weights)


def _tuples(values, partition, table, threads):
    lab, big = partition.labels()
    return kernels.prime_set_counts(values, table.spf, lab, len(partition), big, threads=threads)


def empirical_joint_shifted(x, a, partition: PrimePartition, table, threads=1) -> JointDist:
    """Law of (f_1(p+a), ..., f_m(p+a)) over primes p in (|a|+1, x]."""
    vals = shifted_values(x, a, table)
    return _joint_from_counts(_tuples(vals, partition, table, threads), vals.size, len(partition))


def empirical_joint_integers(x, partition: PrimePartition, table, threads=1) -> JointDist:
    """Law of (f_1(n), ..., f_m(n)) over n in [1, x]."""
    table.require(x, "n <= x")
    vals = np.arange(1, x + 1, dtype=np.int64)
    return _joint_from_counts(_tuples(vals, partition, table, threads), x, len(partition))


def poisson_joint(lambdas, cap) -> JointDist:
    """Independent Poisson(lambda_i) on {0..cap}^m, the rest as mass deficit."""
    lambdas = [float(l) for l in lambdas]
    if any(not l > 0 for l in lambdas):
        raise DomainError("Poisson parameters must be positive")
    caps = [int(c) for c in cap] if np.ndim(cap) else [int(cap)] * len(lambdas)
    if len(caps) != len(lambdas) or min(caps) < 1:
        raise DomainError("need one cap >= 1 per coordinate")
    vecs = [poisson_vector(l, c) for l, c in zip(lambdas, caps)]
    weights = {}
    for t in product(*(range(c + 1) for c in caps)):
        w = math.prod(v[k] for v, k in zip(vecs, t))
        if w > 0:
            weights[t] = w
    log_kept = math.fsum(math.log1p(-poisson_tail(l, c)) for l, c in zip(lambdas, caps))
    return JointDist(len(lambdas), weights, -math.expm1(log_kept), tolerance=1e-10)


def poisson_law(lam, cap):
    """Poisson(lam) on {0..cap}, the tail beyond cap as mass deficit."""
    vec = poisson_vector(lam, cap)
    return Pmf(dict(enumerate(vec.tolist())), poisson_tail(lam, cap), tolerance=1e-12)


def theorem2_report(x, y, a, partition: PrimePartition, table, alpha=0.5, A=1.0,
                    threads=1, joint=None) -> DistanceReport:
    """d_TV between the empirical (f_1..f_m) over shifted primes and independent
    Poisson variables with parameters H_1 (omega) or H_1' (bigomega)."""
    if partition.max_prime > y:
        raise DomainError(f"partition primes must be <= y={y}")
    if y > x:
        raise DomainError("need y <= x")
    emp = joint if joint is not None else empirical_joint_shifted(x, a, partition, table, threads)
    lambdas = [float(l) for l in partition.lambdas]
    observed = [max(t[i] for t in emp.support) for i in range(len(lambdas))]
    caps = [max(poisson_cap(l, POISSON_TOL / len(lambdas)), o) for l, o in zip(lambdas, observed)]
    pois = poisson_joint(lambdas, caps)
    dist = dtv_finite(emp, pois)
    u = u_of(x, y)
    b_alpha, b_uu, b_log = bound_curves(u, alpha, x, A)
    pterm = math.fsum(float(h2(T) / (1 + h1(T))) for T in partition)
    return DistanceReport(
        "theorem2", x, y, u, float(dist.value), b_alpha, b_uu, b_log, alpha, A, a=a,
        poisson_term=pterm,
        details={"lambdas": lambdas, "modes": [T.mode for T in partition],
                 "dtv_interval": [float(dist.lower), float(dist.upper)],
                 "support_size": len(emp), "caps": caps},
    )


def dtv_poisson_pair(lam, lam_prime):
    """(exact d_TV, (lam'-lam)/(1+sqrt(lam)), KL(Poisson(lam) || Poisson(lam')))."""
    lam, lam_prime = float(lam), float(lam_prime)
    if not 0 < lam <= lam_prime:
        raise DomainError(f"need 0 < lambda <= lambda', got {lam}, {lam_prime}")
    cap = max(poisson_cap(lam, POISSON_TOL / 2), poisson_cap(lam_prime, POISSON_TOL / 2))
    P, Q = poisson_law(lam, cap), poisson_law(lam_prime, cap)
    exact = float(dtv_finite(P, Q).value)
    kl = (lam_prime - lam) - lam * math.log(lam_prime / lam)
    bound = (lam_prime - lam) / (1 + math.sqrt(lam))
    return exact, bound, kl


def pgf_closed_form(T: PrimeSet, a, z):
    """Product formula for E z^R (omega mode) or E z^R~ (bigomega mode)."""
    out = complex(1)
    for q in T:
        if a % q == 0:
            continue
        if T.mode == OMEGA:
            out *= 1 + (z - 1) / (q - 1)
        else:
            out *= 1 + q * (z - 1) / ((q - 1) * (q - z))
    return out


def _auto_truncation(T, a, z, tol=1e-15):
    r = max((abs(z) / q for q in T if a % q), default=0.0)
    if r == 0:
        return 1
    # per-prime tail of E z^W beyond V is at most r^{V+1} / (1 - r)
    return max(1, math.ceil(math.log(tol * (1 - r)) / math.log(r)))


def pgf_check(T: PrimeSet, a, z, truncation=None):
    """(lhs, rhs, |lhs - rhs|): the pgf of the exact law of R_T / R~_T at z
    against the closed product formula."""
    z = complex(z)
    if abs(z) > 1.9 + 1e-12:
        raise DomainError(f"|z| must be <= 1.9, got {abs(z)}")
    if T.mode == BIG_OMEGA and any(abs(z - q) == 0 for q in T):
        raise DomainError("z coincides with a pole q in T")
    if truncation is None:
        truncation = _auto_truncation(T, a, z) if T.mode == BIG_OMEGA else 1
    law = exact_dist_R(T, a, truncation=truncation, exact=False)
    coeffs = np.zeros(max(law.support) + 1)
    for k, w in law.items():
        coeffs[k] = w
    # Horner keeps |partial sums| bounded even when |z|^k alone would overflow
    lhs = complex(np.polyval(coeffs[::-1], z))
    rhs = pgf_closed_form(T, a, z)
    return lhs, rhs, abs(lhs - rhs)


def standardized_moments(pmf: Pmf):
    """(mean, variance, skewness) of an integer law."""
    mean = pmf.moment(1)
    var = pmf.moment(2, mean)
    skew = pmf.moment(3, mean) / var**1.5 if var > 0 else 0.0
    return mean, var, skew
