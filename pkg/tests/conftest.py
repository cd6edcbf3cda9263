import pytest

from altsum.sieve import build_spf


@pytest.fixture(scope="session")
def table():
    # shared across the whole run; covers every fast test
    return build_spf(10**5)


@pytest.fixture(scope="session")
def big_table():
    # 2^20 > 10^6: one sieve serves the slow ratio and Dirichlet suites
    return build_spf(1 << 20)
