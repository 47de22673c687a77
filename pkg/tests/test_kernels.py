import os
import subprocess
import sys

import numpy as np
import pytest

from shiftprimes import kernels
from shiftprimes.prime_engine import primes_upto

BACKENDS = kernels.backends()
needs_two = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled core not built")


@pytest.fixture(scope="module")
def spf():
    return kernels.sieve_spf(300_000)


@needs_two
def test_sieve_parity():
    for limit in (2, 3, 100, 65_537, 300_000):
        for seg in (64, 1 << 20):
            a = BACKENDS["python"].sieve_spf(limit, seg)
            b = BACKENDS["cython"].sieve_spf(limit, seg)
            assert np.array_equal(a, b)


@needs_two
def test_elementwise_parity(spf):
    rng = np.random.default_rng(0)
    vals = rng.integers(1, 300_000, size=20_000).astype(np.int64)
    vals[:5] = [1, 2, 299_993, 65_536, 6]
    labels = np.zeros(1001, dtype=np.int32)
    labels[primes_upto(10)] = 1
    labels[[p for p in primes_upto(1000) if p > 10]] = 2
    big = np.array([0, 1], dtype=np.uint8)
    factor = rng.random(1001)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for y in (2, 3, 97, 1000):
        assert np.array_equal(py.smooth_parts(vals, y, spf), cy.smooth_parts(vals, y, spf))
    assert np.array_equal(py.prime_set_counts(vals, spf, labels, 2, big),
                          cy.prime_set_counts(vals, spf, labels, 2, big))
    for t in (2, 50, 10**6):
        assert np.array_equal(py.omega_upto(vals, spf, t), cy.omega_upto(vals, spf, t))
    smooth = py.smooth_parts(vals, 1000, spf)
    assert np.allclose(py.distinct_prime_product(smooth, spf, factor),
                       cy.distinct_prime_product(smooth, spf, factor), rtol=1e-14, atol=0)


@needs_two
@pytest.mark.parametrize("y,bound,cap", [(2, 10**6, 100), (7, 10**5, 10**6), (97, 10**6, 10**7),
                                         (97, 10**6, 50)])
def test_smooth_numbers_parity(y, bound, cap):
    ps = primes_upto(y)
    a, oa = BACKENDS["python"].smooth_numbers(ps, bound, cap)
    b, ob = BACKENDS["cython"].smooth_numbers(ps, bound, cap)
    assert oa == ob and np.array_equal(a, b)
    if not oa:
        assert a.tolist() == list(kernels.iter_smooth(ps, bound))


def test_threads_do_not_change_results(spf):
    vals = np.arange(1, 300_001, dtype=np.int64)
    for fn, args in ((kernels.smooth_parts, (50, spf)), (kernels.omega_upto, (spf, 1000))):
        assert np.array_equal(fn(vals, *args, threads=1), fn(vals, *args, threads=3))


def test_backend_switch_env():
    env = dict(os.environ, SHIFTPRIMES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import shiftprimes; print(shiftprimes.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
