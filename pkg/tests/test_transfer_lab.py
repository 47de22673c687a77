import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from shiftprimes import (DomainError, LilConfig, PrimePartition, PrimeSet, ZScanConfig,
                         empirical_joint_integers, empirical_joint_shifted, hypothesis_z_scan,
                         lambda_statistic, lil_profile, omega_moments_shifted, transference_report)
from shiftprimes.transfer_lab import (LAMBDA_T_MIN, SmallScaleWarning, everything, joint_gap,
                                      lambda_from_omega, lil_profiles, nothing, predicate,
                                      random_rectangles, rectangle, threshold, tuple_set)

from conftest import trial_is_prime


def part(*sets):
    return PrimePartition(tuple(sets))


@pytest.fixture(scope="module")
def joints_1e5(mid_table):
    P = part(PrimeSet.interval(2, 10), PrimeSet.interval(10, 100))
    return P, (empirical_joint_integers(10**5, P, mid_table),
               empirical_joint_shifted(10**5, 1, P, mid_table))


# -- regions ----------------------------------------------------------------------

def test_region_kinds():
    assert rectangle((0, 1), (2, None)).contains((1, 7))
    assert not rectangle((0, 1), (2, None)).contains((2, 7))
    assert threshold(2, 1, ">=", 3).contains((0, 3))
    assert threshold(2, 1, "<=", 3).complement().contains((0, 4))
    assert tuple_set(2, [(1, 1)]).contains((1, 1))
    assert predicate(2, lambda t: sum(t) % 2 == 0).contains((1, 1))
    assert everything(3).contains((9, 9, 9)) and not nothing(3).contains((0, 0, 0))
    with pytest.raises(DomainError):
        rectangle((0, 1)).contains((0, 0))
    with pytest.raises(DomainError):
        threshold(2, 5, ">=", 1)


def test_everything_and_nothing_give_zero(mid_table, joints_1e5):
    P, joints = joints_1e5
    for reg in (everything(2), nothing(2)):
        r = transference_report(10**5, 100, 1, P, reg, mid_table, joints=joints)
        assert r.diff == 0


def test_complement_symmetry_exact(mid_table, joints_1e5):
    P, joints = joints_1e5
    rng = np.random.default_rng(3)
    regions = random_rectangles(2, 50, rng) + [threshold(2, 0, ">=", 2), tuple_set(2, [(1, 0)])]
    for reg in regions:
        r = transference_report(10**5, 100, 1, P, reg, mid_table, joints=joints)
        rc = transference_report(10**5, 100, 1, P, reg.complement(), mid_table, joints=joints)
        assert isinstance(r.p_int, Fraction)
        assert abs(r.p_int - r.p_shift) == abs(rc.p_int - rc.p_shift)
        assert r.p_int + rc.p_int == 1 and r.p_shift + rc.p_shift == 1


def test_region_gap_below_joint_tv(mid_table, joints_1e5):
    P, joints = joints_1e5
    gap = joint_gap(joints)
    rng = np.random.default_rng(9)
    for reg in random_rectangles(2, 200, rng):
        r = transference_report(10**5, 100, 1, P, reg, mid_table, joints=joints)
        assert abs(r.p_int - r.p_shift) <= gap
    # the largest gap over all subsets is attained by {t : P(t) > Q(t)}
    I, S = joints
    best = tuple_set(2, [t for t in set(I.support) | set(S.support) if I[t] > S[t]])
    r = transference_report(10**5, 100, 1, P, best, mid_table, joints=joints)
    assert abs(r.p_int - r.p_shift) == gap


def test_transference_single_prime_two(small_table):
    P = part(PrimeSet((2,)))
    r = transference_report(100, 2, 1, P, tuple_set(1, [(1,)]), small_table)
    assert r.p_shift == 1 and r.p_int == Fraction(1, 2)
    assert r.diff == 0.5
    h_term = 0.25 / 2
    u = math.log(100) / math.log(2)
    assert r.bound == pytest.approx(h_term + math.exp(-0.5 * u * math.log(u)) + 1 / math.log(100))


def test_transference_requires_matching_dim(small_table):
    with pytest.raises(DomainError):
        transference_report(100, 5, 1, part(PrimeSet((2,))), everything(2), small_table)


# -- Lambda statistic --------------------------------------------------------------

def test_lambda_worked_example(big_table):
    with pytest.warns(SmallScaleWarning):
        v = lambda_statistic(30, 10**7, big_table)
    l2 = math.log(math.log(1e7))
    l4 = math.log(math.log(l2))
    assert v == pytest.approx((3 - l2) / math.sqrt(2 * l2 * l4), rel=1e-12)
    assert abs(v - 0.626) < 1e-3


def test_lambda_domain(small_table):
    with pytest.raises(DomainError) as exc:
        lambda_statistic(30, 10**6, small_table)
    assert exc.value.t_min == pytest.approx(3814279.1, rel=1e-6)
    assert LAMBDA_T_MIN == pytest.approx(math.exp(math.e**math.e))


def test_lambda_zero_and_monotone():
    t = 2e7
    l2 = math.log(math.log(t))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallScaleWarning)
        assert lambda_from_omega(l2, t) == pytest.approx(0, abs=1e-15)
        vals = lambda_from_omega(np.arange(0, 12), t)
    assert (np.diff(vals) > 0).all()


def test_lil_grid_and_profiles(big_table):
    cfg = LilConfig(10**7)
    ts = cfg.t_grid()
    assert ts[-1] == 1e7 and all(t > LAMBDA_T_MIN for t in ts)
    l2 = [math.log(math.log(t)) for t in ts]
    assert l2 == sorted(l2)
    with pytest.raises(DomainError):
        LilConfig(10**6).t_grid()
    with pytest.raises(DomainError):
        LilConfig(10**7, xi=lambda x: 2 * math.log(x))


def test_lil_profile_prime_above_x(big_table):
    n = 9999991
    assert trial_is_prime(n)
    cfg = LilConfig(9 * 10**6, grid=[4e6, 5e6, 7e6, 9e6])
    lo, hi, tlo, thi = lil_profile(n, cfg, big_table)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallScaleWarning)
        pure = [float(lambda_from_omega(0, t)) for t in cfg.t_grid()]
    assert lo == min(pure) and hi == max(pure)


def test_lil_profile_single_point(big_table):
    n = 2 * 3 * 5 * 7 * 11 * 13
    lo, hi, tlo, thi = lil_profile(n, LilConfig(10**7, grid=[10**7]), big_table)
    assert lo == hi and tlo == thi == 1e7


def test_lil_profiles_vectorised_matches_scalar(big_table):
    cfg = LilConfig(10**7, grid=[5e6, 10**7])
    ps, lo, hi = lil_profiles(cfg, big_table)
    for i in (0, 100, 5000, len(ps) - 1):
        a, b, _, _ = lil_profile(int(ps[i]) + 1, cfg, big_table)
        assert (lo[i], hi[i]) == (a, b)


# -- omega moments -------------------------------------------------------------------

def test_omega_moments_small(small_table):
    mean, var = omega_moments_shifted(20, 1, small_table)
    assert mean == Fraction(12, 7)
    om = [1, 2, 1, 2, 2, 2, 2]
    assert var == Fraction(sum(o * o for o in om), 7) - mean**2
    assert var >= 0


# -- z-scan ----------------------------------------------------------------------------

def _ap_oracle(x, m, b):
    return sum(1 for p in range(2, x + 1) if trial_is_prime(p) and (p - b) % m == 0)


def _phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_zscan_exact_small(small_table):
    total, per_m, members = hypothesis_z_scan(ZScanConfig(10**4, 10, 1.0, 1), small_table)
    pix = _ap_oracle(10**4, 1, 0)
    want = [(m, abs(_ap_oracle(10**4, m, -1) - Fraction(pix, _phi(m)))) for m in range(1, 11)]
    assert [m for m, _ in per_m] == list(range(1, 11))
    for (m, d), (_, w) in zip(per_m, want):
        assert d == pytest.approx(float(w), abs=1e-9)
    assert total == pytest.approx(float(sum(w for _, w in want)), abs=1e-9)
    assert total >= 0


def test_zscan_gcd_exclusion_and_m1(small_table):
    _, per_m, _ = hypothesis_z_scan(ZScanConfig(5000, 30, 1.0, 6), small_table)
    assert all(math.gcd(m, 6) == 1 for m, _ in per_m)
    total, per_m, _ = hypothesis_z_scan(ZScanConfig(5000, 1), small_table)
    assert total == 0 and per_m == [(1, 0.0)]


def test_zscan_smoothness_filter(small_table):
    _, per_m, _ = hypothesis_z_scan(ZScanConfig(10**4, 60, 0.25, 1), small_table)
    # x^0.25 = 10: moduli must be 10-smooth
    assert [m for m, _ in per_m] == [m for m in range(1, 61)
                                     if all(p <= 10 for p in range(2, m + 1)
                                            if m % p == 0 and trial_is_prime(p))]


def test_zscan_members_oracle(small_table):
    x, theta, A = 5000, 0.51, 1.0
    cfg = ZScanConfig(x, 20, 1.0, 1, theta, A)
    _, _, members = hypothesis_z_scan(cfg, small_table)
    pix = _ap_oracle(x, 1, 0)
    xt = x**theta
    want = []
    for m in range(1, 21):
        if m > xt:
            break
        inner = sum(abs(_ap_oracle(x, d * m, -1) - pix / _phi(d * m))
                    for d in range(1, int(xt / m) + 1))
        if inner >= pix / (_phi(m) * math.log(x) ** A):
            want.append(m)
    assert members == want


def test_zscan_config_validation():
    for kw in ({"M": 0}, {"delta": 0}, {"delta": 1.5}, {"a": 0}, {"M": 10**5}):
        args = {"x": 10**4, "M": 5, **kw}
        with pytest.raises(DomainError):
            ZScanConfig(**args)
