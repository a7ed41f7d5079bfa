import pytest

from dforge.config import get_settings


def brute_mobius(n: int) -> int:
    """mu(n) by trial division"""
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test sees settings built from its own environment"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def mobius_oracle():
    return brute_mobius
