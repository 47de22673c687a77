import math

import pytest

from shiftprimes import build_sieve


def trial_is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def trial_factor(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@pytest.fixture(scope="session")
def small_table():
    return build_sieve(10**4 + 20)


@pytest.fixture(scope="session")
def mid_table():
    return build_sieve(10**6 + 10)


@pytest.fixture(scope="session")
def big_table():
    return build_sieve(10**7 + 2)


@pytest.fixture(scope="session")
def log2():
    return lambda t: math.log(math.log(t))


# acceptance lines collected by test_acceptance.py and echoed in the summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
