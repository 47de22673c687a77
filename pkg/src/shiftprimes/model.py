"""Probabilistic models for prime exponents.

``W_q`` models the exponent of q in a shifted prime p + a and ``X_p`` the
exponent of p in a random integer. Both families are independent across
primes. Weights are exact ``Fraction`` values wherever the support is small.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import DomainError
from .prime_engine import factorize, primes_upto

OMEGA = "omega"
BIG_OMEGA = "bigomega"
MODES = (OMEGA, BIG_OMEGA)

#: per-prime exponent cap for truncated W_q laws
DEFAULT_TRUNCATION = 64
#: largest |T| convolved in exact arithmetic, per mode
EXACT_LIMIT = {OMEGA: 64, BIG_OMEGA: 8}


def is_prime(n):
    """Deterministic trial division; meant for model arguments, not sieving."""
    n = int(n)
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def _need_prime(q, name="q"):
    if not is_prime(q):
        raise DomainError(f"{name}={q} is not prime")


@dataclass(frozen=True)
class ShiftConfig:
    a: int
    y: int

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("the shift a must be nonzero")
        if self.y < 2:
            raise DomainError(f"y must be >= 2, got {self.y}")


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]
    mode: str = OMEGA

    def __post_init__(self):
        ps = tuple(sorted({int(p) for p in self.primes}))
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        bad = [p for p in ps if not is_prime(p)]
        if bad:
            raise DomainError(f"not prime: {bad[:5]}")
        object.__setattr__(self, "primes", ps)

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, p):
        return p in self.primes

    @classmethod
    def interval(cls, lo, hi, mode=OMEGA):
        """All primes in (lo, hi]."""
        return cls(tuple(int(p) for p in primes_upto(hi) if p > lo), mode)


def _prime_list(T):
    return T.primes if isinstance(T, PrimeSet) else tuple(sorted(set(T)))


class Pmf:
    """Finite discrete law: outcome -> weight, plus tracked missing mass.

    Outcomes are integers or integer tuples. ``mass_deficit`` is the
    probability not represented by the listed weights (a truncated tail).
    Exact pmfs hold ``Fraction`` weights and normalise exactly; float pmfs
    normalise within ``tolerance``.
    """

    def __init__(self, weights: Mapping, mass_deficit=0, tolerance=None, check=True):
        self._w = dict(sorted((k, v) for k, v in weights.items() if v != 0))
        self.mass_deficit = mass_deficit
        if tolerance is None:
            tolerance = 0 if self.exact else 1e-9
        self.tolerance = tolerance
        if check:
            self.validate()

    def validate(self):
        if any(w < 0 for w in self._w.values()) or self.mass_deficit < 0:
            raise DomainError("negative weight in pmf")
        total = self.total() + self.mass_deficit
        if abs(total - 1) > self.tolerance:
            raise DomainError(f"weights + deficit sum to {float(total)!r}, not 1")

    @property
    def exact(self):
        return all(isinstance(w, (int, Fraction)) for w in self._w.values()) and isinstance(
            self.mass_deficit, (int, Fraction)
        )

    @property
    def support(self):
        return list(self._w)

    @property
    def weights(self):
        return list(self._w.values())

    def items(self):
        return self._w.items()

    def __getitem__(self, outcome):
        return self._w.get(outcome, 0)

    def __len__(self):
        return len(self._w)

    def total(self):
        if self.exact:
            return sum(self._w.values(), Fraction(0))
        return math.fsum(float(w) for w in self._w.values())

    def as_float(self):
        return Pmf({k: float(v) for k, v in self._w.items()}, float(self.mass_deficit),
                   tolerance=max(float(self.tolerance), 1e-9), check=False)

    def moment(self, k, center=0.0):
        return math.fsum(float(w) * (o - center) ** k for o, w in self._w.items())

    def to_json(self):
        """JSON object; exact weights are written as "num/den" strings."""
        def enc(w):
            return str(Fraction(w)) if isinstance(w, (int, Fraction)) else repr(float(w))
        support = [list(k) if isinstance(k, tuple) else k for k in self._w]
        return json.dumps({"support": support, "weights": [enc(w) for w in self._w.values()],
                           "mass_deficit": enc(self.mass_deficit)})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)

        def dec(s):
            return Fraction(s) if "/" in s or s.lstrip("-").isdigit() else float(s)
        support = [tuple(k) if isinstance(k, list) else k for k in obj["support"]]
        return cls(dict(zip(support, map(dec, obj["weights"]))), dec(obj["mass_deficit"]))

    def __eq__(self, other):
        if not isinstance(other, Pmf):
            return NotImplemented
        return self._w == other._w and self.mass_deficit == other.mass_deficit

    def __repr__(self):
        head = dict(list(self._w.items())[:6])
        more = ", ..." if len(self._w) > 6 else ""
        return f"Pmf({head}{more}, mass_deficit={self.mass_deficit!r})"


# -- single-prime laws -------------------------------------------------------

def w_pmf(q, v, a):
    """P(W_q = v): 1/q^v for v >= 1 and 1 - 1/(q-1) at 0; W_q = 0 surely when q | a."""
    _need_prime(q)
    if v < 0:
        return Fraction(0)
    if a % q == 0:
        return Fraction(int(v == 0))
    if v == 0:
        return 1 - Fraction(1, q - 1)
    return Fraction(1, q**v)


def x_pmf(p, k):
    """P(X_p = k) = p^-k (1 - 1/p)."""
    _need_prime(p, "p")
    if k < 0:
        return Fraction(0)
    return Fraction(p - 1, p ** (k + 1))


# -- joint weights of smooth m ------------------------------------------------

@lru_cache(maxsize=None)
def _primes_to(y):
    return tuple(int(p) for p in primes_upto(y))


def _smooth_factorization(m, y, table):
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    fac = factorize(m, table)
    if fac.entries and fac.entries[-1][0] > y:
        raise DomainError(f"m={m} is not {y}-smooth")
    return fac


@lru_cache(maxsize=256)
def _w_constant(a, y):
    """prod over odd q <= y with q not dividing a of (1 - 1/(q-1))."""
    out = Fraction(1)
    for q in _primes_to(y):
        if q != 2 and a % q:
            out *= Fraction(q - 2, q - 1)
    return out


def g_y(m, cfg: ShiftConfig, table, method="closed"):
    """P(W_q = v_q(m) for all q <= y) for y-smooth m.

    ``method="closed"`` uses (1/m) prod_{q <= y, q not | am} (1 - 1/(q-1));
    ``method="product"`` multiplies the single-prime weights.
    """
    fac = _smooth_factorization(m, cfg.y, table)
    a = cfg.a
    if method == "product":
        exps = dict(fac.entries)
        out = Fraction(1)
        for q in _primes_to(cfg.y):
            out *= w_pmf(q, exps.get(q, 0), a)
            if not out:
                break
        return out
    if method != "closed":
        raise DomainError(f"unknown method {method!r}")
    if math.gcd(a, m) > 1 or (a % 2 and m % 2):
        return Fraction(0)
    out = _w_constant(a, cfg.y) / m
    for q, _ in fac:
        if q != 2:
            out *= Fraction(q - 1, q - 2)
    return out


@lru_cache(maxsize=256)
def _x_constant(y):
    out = Fraction(1)
    for p in _primes_to(y):
        out *= Fraction(p - 1, p)
    return out


def h_y(m, y, table):
    """P(X_p = v_p(m) for all p <= y) = (1/m) prod_{p <= y} (1 - 1/p)."""
    _smooth_factorization(m, y, table)
    return _x_constant(y) / m


def g_factor_table(a, y):
    """Float data for vectorised g_y: (constant, per-prime factor array).

    g_y(m) = constant / m * prod_{q | m} factor[q] for admissible m, and the
    factor is 0 for q | a, which zeroes every m sharing a prime with a.
    """
    factor = np.ones(y + 1)
    for q in _primes_to(y):
        if a % q == 0:
            factor[q] = 0.0
        elif q != 2:
            factor[q] = (q - 1) / (q - 2)
    return float(_w_constant(a, y)), factor


def x_constant(y):
    return float(_x_constant(y))


# -- H functionals -------------------------------------------------------------

def h1(T):
    """sum 1/(q-1)"""
    return sum((Fraction(1, q - 1) for q in _prime_list(T)), Fraction(0))


def h1_prime(T):
    """sum q/(q-1)^2"""
    return sum((Fraction(q, (q - 1) ** 2) for q in _prime_list(T)), Fraction(0))


def h2(T):
    """sum 1/q^2"""
    return sum((Fraction(1, q * q) for q in _prime_list(T)), Fraction(0))


def h_plain(T):
    """sum 1/q"""
    return sum((Fraction(1, q) for q in _prime_list(T)), Fraction(0))


def poisson_parameter(T: PrimeSet):
    """H_1 for omega-mode sets, H_1' for bigomega-mode sets."""
    return h1(T) if T.mode == OMEGA else h1_prime(T)


# -- exact laws of R_T and R~_T -----------------------------------------------

def _convolve_exact(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, z in enumerate(b):
                out[i + j] += x * z
    return out


def _w_vector(q, a, truncation, exact):
    if a % q == 0:
        return ([Fraction(1)] if exact else np.ones(1)), 0
    ws = [w_pmf(q, v, a) for v in range(truncation + 1)]
    tail = Fraction(1, (q - 1) * q**truncation)
    if exact:
        return ws, tail
    return np.array([float(w) for w in ws]), float(tail)


def exact_dist_R(T: PrimeSet, a, truncation=DEFAULT_TRUNCATION, exact=None):
    """Law of R_T (omega mode) or R~_T (bigomega mode) under the W model.

    In bigomega mode each W_q is cut at ``truncation`` and the lost mass,
    P(some W_q > truncation), is carried as ``mass_deficit``.
    """
    ps = _prime_list(T)
    mode = T.mode if isinstance(T, PrimeSet) else OMEGA
    if not ps:
        raise DomainError("T must be nonempty")
    if a == 0:
        raise DomainError("the shift a must be nonzero")
    if truncation < 1:
        raise DomainError("truncation must be >= 1")
    if exact is None:
        exact = len(ps) <= EXACT_LIMIT[mode]

    if mode == OMEGA:
        if exact:
            law = [Fraction(1)]
            for q in ps:
                hit = Fraction(0) if a % q == 0 else Fraction(1, q - 1)
                law = _convolve_exact(law, [1 - hit, hit])
            return Pmf(dict(enumerate(law)))
        law = np.ones(1)
        for q in ps:
            hit = 0.0 if a % q == 0 else 1.0 / (q - 1)
            law = np.convolve(law, [1.0 - hit, hit])
        return Pmf(dict(enumerate(law.tolist())), 0.0, tolerance=1e-12 * len(ps))

    if exact:
        law, kept = [Fraction(1)], Fraction(1)
        for q in ps:
            vec, tail = _w_vector(q, a, truncation, True)
            law = _convolve_exact(law, vec)
            kept *= 1 - tail
        return Pmf(dict(enumerate(law)), 1 - kept)
    law, log_kept = np.ones(1), 0.0
    for q in ps:
        vec, tail = _w_vector(q, a, truncation, False)
        law = np.convolve(law, vec)
        log_kept += math.log1p(-tail)
    return Pmf(dict(enumerate(law.tolist())), -math.expm1(log_kept), tolerance=1e-12 * len(ps))


# -- Poisson -------------------------------------------------------------------

def poisson_pmf(lam, k):
    """e^-lam lam^k / k!"""
    if not lam > 0:
        raise DomainError(f"Poisson parameter must be positive, got {lam}")
    if k < 0:
        return 0.0
    lam = float(lam)
    if k <= 170:
        val = math.exp(-lam) * lam**k / math.factorial(k)
        if val > 0 and math.isfinite(val):
            return val
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def poisson_vector(lam, cap):
    """Array of poisson_pmf(lam, k) for k = 0..cap."""
    return np.array([poisson_pmf(lam, k) for k in range(cap + 1)])


def poisson_tail(lam, cap):
    """P(Z > cap), summed directly until the terms vanish."""
    terms, k = [], cap + 1
    while True:
        t = poisson_pmf(lam, k)
        terms.append(t)
        if k > lam and t < 1e-30 * max(terms[0], 1e-300):
            break
        k += 1
    return math.fsum(terms)


def poisson_cap(lam, tol=1e-12):
    """Smallest cap whose Chernoff tail bound P(Z > cap) is below tol."""
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"Poisson parameter must be positive, got {lam}")
    k = max(1, math.floor(lam) + 1)
    # P(Z >= k) <= e^-lam (e lam / k)^k for k > lam
    while -lam + k * (1 + math.log(lam / k)) >= math.log(tol):
        k += 1
    return k - 1


# -- sampling ------------------------------------------------------------------

def _prime_stream(seed, q):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(q)])))


def sample_w_vector(cfg: ShiftConfig, seed, size=None):
    """Draw (W_q : q <= y) from the model.

    Every prime q owns the Philox stream keyed by (seed, q), so enlarging y
    never changes the draws for smaller primes. With ``size`` given, each
    coordinate is an array of that many independent draws.
    """
    out = {}
    for q in _primes_to(cfg.y):
        n = 1 if size is None else int(size)
        if cfg.a % q == 0:
            draw = np.zeros(n, dtype=np.int64)
        else:
            rng = _prime_stream(seed, q)
            hit = rng.random(n) < 1.0 / (q - 1)
            # given W_q >= 1, W_q is geometric on {1, 2, ...} with ratio 1/q
            draw = np.where(hit, rng.geometric(1.0 - 1.0 / q, n), 0).astype(np.int64)
        out[q] = int(draw[0]) if size is None else draw
    return out


# -- Dickman rho -----------------------------------------------------------------

RHO_STEP = 1e-4
_rho_cache: dict[int, np.ndarray] = {}


def _rho_trapezoid(umax, per_unit, resync=1000):
    """rho on the grid k/per_unit by the trapezoid rule applied to
    u rho(u) = int_{u-1}^{u} rho(t) dt, solved for the implicit endpoint."""
    n, h = per_unit, 1.0 / per_unit
    total = int(math.ceil(umax * n))
    rho = np.ones(total + 1)
    window = 0.0
    for i in range(n + 1, total + 1):
        # the window sum is refreshed exactly now and then; rho spans ~30
        # orders of magnitude by u=20, so pure running updates drift
        if i == n + 1 or i % resync == 0:
            window = math.fsum(rho[i - n + 1 : i])
        rho[i] = h * (0.5 * rho[i - n] + window) / (i * h - 0.5 * h)
        window += rho[i] - rho[i - n + 1]
    return rho


def _rho_grid(umax):
    units = max(20, int(math.ceil(umax)))
    if units not in _rho_cache:
        fine = _rho_trapezoid(units, round(1 / RHO_STEP))
        coarse = _rho_trapezoid(units, round(1 / RHO_STEP) // 2)
        # one Richardson step on the shared grid points removes the h^2 term
        _rho_cache.clear()
        _rho_cache[units] = (4 * fine[::2] - coarse) / 3
    return _rho_cache[units]


def dickman_rho(u):
    """Dickman's rho(u), rho = 1 on [0, 1] and u rho'(u) = -rho(u - 1)."""
    u = float(u)
    if u < 0 or math.isnan(u):
        raise DomainError(f"u must be >= 0, got {u}")
    if u <= 1:
        return 1.0
    grid = _rho_grid(u)
    step = 2 * RHO_STEP
    pos = u / step
    i = int(pos)
    frac = pos - i
    if frac < 1e-9 or i + 1 >= grid.size:
        return float(grid[i])
    # geometric interpolation: rho is close to log-linear between nodes
    return float(grid[i] ** (1 - frac) * grid[i + 1] ** frac)
