"""Exact total variation distances between the models and the empirical
prime-factor vectors of shifted primes and of integers.

Both experiments reduce to a histogram of smooth parts. A prime p
contributes to exactly one bin, the y-smooth part m of p + a, so

    d_TV = 1/2 * sum_m |Phi_m / pi* - g_y(m)|

over all y-smooth m. Off the histogram's support Phi_m = 0 and the term is
g_y(m); since the g_y(m) sum to 1, those terms total 1 - sum_S g_y(m) for
any set S containing the support. No smooth number beyond S needs listing.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from ._io import to_json
from .errors import DomainError
from .model import Pmf, ShiftConfig, g_factor_table, g_y, h_y, x_constant
from .prime_engine import SmoothEnumConfig, primes_upto

EXACT_X_LIMIT = 10**4
CSV_COLUMNS = ("x", "y", "u", "a", "dtv", "bound_alpha", "bound_uu", "bound_log", "ratio")


class TVDistance(NamedTuple):
    """A distance with the interval that must contain the true value once
    the two pmfs' missing masses are accounted for."""

    value: object
    lower: object
    upper: object

    def __float__(self):
        return float(self.value)


def dtv_finite(P: Pmf, Q: Pmf) -> TVDistance:
    """Half the L1 distance between two pmfs on a common outcome space.

    Each pmf's mass deficit is treated as one extra phantom outcome, which
    adds |deficit_P - deficit_Q| / 2; the interval widens the value by
    (deficit_P + deficit_Q) / 2 on either side.
    """
    for R in (P, Q):
        if any(w < 0 for w in R.weights) or R.mass_deficit < 0:
            raise DomainError("negative weight in pmf")
    keys = sorted(set(P.support) | set(Q.support))
    dP, dQ = P.mass_deficit, Q.mass_deficit
    if P.exact and Q.exact:
        core = sum((abs(Fraction(P[k]) - Fraction(Q[k])) for k in keys), Fraction(0))
        value = (core + abs(Fraction(dP) - Fraction(dQ))) / 2
        slack = Fraction(dP + dQ) / 2
        return TVDistance(value, max(Fraction(0), value - slack), min(Fraction(1), value + slack))
    core = math.fsum(abs(float(P[k]) - float(Q[k])) for k in keys)
    value = 0.5 * (core + abs(float(dP) - float(dQ)))
    slack = 0.5 * (float(dP) + float(dQ))
    return TVDistance(value, max(0.0, value - slack), min(1.0, value + slack))


@dataclass
class SmoothPartHistogram:
    """counts[m] = Phi_m(x, y): primes in (|a|+1, x] whose p + a has y-smooth part m."""

    x: int
    y: int
    a: int
    keys: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    prime_total: int = 0

    @property
    def counts(self):
        return dict(zip(self.keys.tolist(), self.values.tolist()))

    def __getitem__(self, m):
        i = np.searchsorted(self.keys, m)
        return int(self.values[i]) if i < self.keys.size and self.keys[i] == m else 0


@dataclass
class DistanceReport:
    kind: str
    x: int
    y: int
    u: float
    dtv: float
    bound_alpha: float
    bound_uu: float
    bound_log: float
    alpha: float
    A: float
    a: Optional[int] = None
    poisson_term: Optional[float] = None
    exact_dtv: Optional[Fraction] = None
    details: dict = field(default_factory=dict)

    @property
    def bound(self):
        """Sum of the bound terms that apply to this experiment."""
        if self.kind == "integers":
            return self.bound_uu
        total = self.bound_alpha + self.bound_log
        if self.poisson_term is not None:
            total += self.poisson_term
        return total

    @property
    def ratio(self):
        return self.dtv / self.bound if self.bound > 0 else math.inf

    def as_dict(self):
        d = asdict(self)
        d["bound"] = self.bound
        d["ratio"] = self.ratio
        return d

    def to_json(self):
        return to_json(self.as_dict())

    def csv_row(self):
        d = self.as_dict()
        return {c: d.get(c) for c in CSV_COLUMNS}


def bound_curves(u, alpha, x, A):
    """(e^{-alpha u log u}, u^{-u}, (log x)^{-A})"""
    if not u > 0:
        raise DomainError(f"u must be positive, got {u}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not x > 1:
        raise DomainError(f"x must exceed 1, got {x}")
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    return (math.exp(-alpha * u * math.log(u)), u ** (-u), math.log(x) ** (-A))


def u_of(x, y):
    return math.log(x) / math.log(y)


def _check_xy(x, y):
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if y > x:
        raise DomainError(f"need y <= x, got y={y}, x={x}")


def shifted_values(x, a, table):
    """Array of p + a over primes p in (|a|+1, x]."""
    if a == 0:
        raise DomainError("the shift a must be nonzero")
    table.require(x + max(a, 0), f"p + a for p <= {x}")
    return table.primes(x, abs(a) + 1) + a


def phi_histogram(x, y, a, table, threads=1) -> SmoothPartHistogram:
    _check_xy(x, y)
    vals = shifted_values(x, a, table)
    parts = kernels.smooth_parts(vals, y, table.spf, threads=threads)
    keys, counts = np.unique(parts, return_counts=True)
    return SmoothPartHistogram(x, y, a, keys, counts, int(vals.size))


def _enumerated(y, bound, enum_cfg):
    cfg = enum_cfg or SmoothEnumConfig(y, bound)
    if cfg.y != y:
        raise DomainError(f"enumeration smoothness {cfg.y} differs from y={y}")
    vals, overflow = kernels.smooth_numbers(primes_upto(y), cfg.max_value, cfg.max_count)
    return vals, overflow


def _tv_against_model(keys, counts, denom, model_fn, model_exact_fn, enum_vals, exact):
    """Shared d_TV pass. Returns (value, exact_value_or_None, covered_mass)."""
    S = np.union1d(enum_vals, keys) if enum_vals.size else keys
    idx = np.searchsorted(keys, S)
    idx_c = np.minimum(idx, keys.size - 1)
    phi = np.where((idx < keys.size) & (keys[idx_c] == S), counts[idx_c], 0)
    if exact:
        terms = Fraction(0)
        covered = Fraction(0)
        for m, c in zip(S.tolist(), phi.tolist()):
            g = model_exact_fn(m)
            terms += abs(Fraction(c, denom) - g)
            covered += g
        val = (terms + 1 - covered) / 2
        return float(val), val, float(covered)
    g = model_fn(S)
    core = math.fsum(np.abs(phi / denom - g).tolist())
    covered = math.fsum(g.tolist())
    return 0.5 * (core + 1.0 - covered), None, covered


def g_weights(ms, a, y, table, threads=1):
    """Vectorised float g_y over an array of y-smooth m."""
    const, factor = g_factor_table(a, y)
    ms = np.asarray(ms, dtype=np.int64)
    g = const / ms * kernels.distinct_prime_product(ms, table.spf, factor, threads=threads)
    if a % 2:
        g[ms % 2 == 1] = 0.0
    return g


def dtv_shifted(x, y, a, table, enum_cfg=None, alpha=0.5, A=1.0, exact=None,
                threads=1) -> DistanceReport:
    """Exact d_TV between (W_q)_{q<=y} and the exponent vector of p + a."""
    hist = phi_histogram(x, y, a, table, threads=threads)
    if hist.prime_total == 0:
        raise DomainError(f"no primes in ({abs(a) + 1}, {x}]")
    bound = x + abs(a)
    enum_vals, overflow = _enumerated(y, min(bound, table.limit), enum_cfg)
    if exact is None:
        exact = x <= EXACT_X_LIMIT
    cfg = ShiftConfig(a, y)
    value, exact_val, covered = _tv_against_model(
        hist.keys, hist.values, hist.prime_total,
        lambda S: g_weights(S, a, y, table, threads),
        lambda m: g_y(m, cfg, table),
        enum_vals, exact,
    )
    u = u_of(x, y)
    b_alpha, b_uu, b_log = bound_curves(u, alpha, x, A)
    return DistanceReport(
        "shifted", x, y, u, value, b_alpha, b_uu, b_log, alpha, A, a=a, exact_dtv=exact_val,
        details={"prime_total": hist.prime_total, "support_size": int(hist.keys.size),
                 "enumerated": int(enum_vals.size), "enumeration_truncated": bool(overflow),
                 "model_mass_covered": covered},
    )


def integer_histogram(x, y, table, threads=1, chunk=1 << 22):
    _check_xy(x, y)
    table.require(x, "n <= x")
    keys, counts = [], []
    for lo in range(1, x + 1, chunk):
        n = np.arange(lo, min(lo + chunk, x + 1), dtype=np.int64)
        k, c = np.unique(kernels.smooth_parts(n, y, table.spf, threads=threads),
                         return_counts=True)
        keys.append(k)
        counts.append(c)
    allk = np.concatenate(keys)
    allc = np.concatenate(counts)
    k, inv = np.unique(allk, return_inverse=True)
    return k, np.bincount(inv, weights=allc).astype(np.int64)


def dtv_integers(x, y, table, enum_cfg=None, alpha=0.5, A=1.0, exact=None,
                 threads=1) -> DistanceReport:
    """Exact d_TV between (X_p)_{p<=y} and the exponent vector of a random n <= x."""
    keys, counts = integer_histogram(x, y, table, threads=threads)
    enum_vals, overflow = _enumerated(y, x, enum_cfg)
    if exact is None:
        exact = x <= EXACT_X_LIMIT
    const = x_constant(y)
    value, exact_val, covered = _tv_against_model(
        keys, counts, x,
        lambda S: const / S.astype(np.float64),
        lambda m: h_y(m, y, table),
        enum_vals, exact,
    )
    u = u_of(x, y)
    b_alpha, b_uu, b_log = bound_curves(u, alpha, x, A)
    return DistanceReport(
        "integers", x, y, u, value, b_alpha, b_uu, b_log, alpha, A, exact_dtv=exact_val,
        details={"support_size": int(keys.size), "enumerated": int(enum_vals.size),
                 "enumeration_truncated": bool(overflow), "model_mass_covered": covered},
    )
