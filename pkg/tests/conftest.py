import pytest

from murmur import arith


@pytest.fixture(scope="session")
def tables():
    return arith.sieve(10_000)


@pytest.fixture(scope="session")
def tables_big():
    return arith.sieve(200_000)
