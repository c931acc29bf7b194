import pytest

from mertens_dissect import primes
from mertens_dissect.numerics import PrecisionContext


@pytest.fixture(scope="session")
def ctx50():
    return PrecisionContext(digits=50)


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext(digits=30)


@pytest.fixture(scope="session")
def table_1e4():
    return primes.sieve(10**4)


@pytest.fixture(scope="session")
def table_1e6():
    return primes.sieve(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return primes.sieve(10**7)


@pytest.fixture(scope="session")
def tables_1e5():
    return primes.factor_tables(10**5)


@pytest.fixture(scope="session")
def tables_1e7():
    return primes.factor_tables(10**7)
