import numpy as np
import pytest

from mertens_dissect import primes
from mertens_dissect.errors import DomainError, ResourceError


def brute_factor(n):
    """Trial-division oracle: (Omega, omega, moebius)."""
    if n == 1:
        return 0, 0, 1
    bo, so, mu = 0, 0, 1
    m, d = n, 2
    while d * d <= m:
        if m % d == 0:
            so += 1
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            bo += e
            mu = -mu if e == 1 else 0
        d += 1
    if m > 1:
        so += 1
        bo += 1
        mu = -mu
    return bo, so, mu


def test_sieve_counts(table_1e6):
    assert table_1e6.count == 78498  # pi(10^6)
    assert int(table_1e6.primes[0]) == 2
    assert int(table_1e6.primes[-1]) == 999983


def test_sieve_small_edge_cases():
    with pytest.raises(DomainError):
        primes.sieve(1)
    assert primes.sieve(2).primes.tolist() == [2]
    assert primes.sieve(30).primes.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_segmented_matches_simple():
    # force the segmented path and compare against the simple sieve
    seg = primes._segmented_sieve(2 * 10**5)
    simple = primes._simple_sieve(2 * 10**5)
    assert np.array_equal(seg, simple)


def test_primes_up_to(table_1e6):
    assert table_1e6.primes_up_to(10).tolist() == [2, 3, 5, 7]
    assert len(table_1e6.primes_up_to(100)) == 25


def test_is_prime(table_1e6):
    assert table_1e6.is_prime(999983)
    assert not table_1e6.is_prime(999981)
    assert not table_1e6.is_prime(1)


def test_sieve_ceiling_guard():
    with pytest.raises(ResourceError):
        primes.sieve(10**9)


def test_factor_tables_against_oracle():
    t = primes.factor_tables(2000)
    for n in range(1, 2001):
        bo, so, mu = brute_factor(n)
        assert t.big_omega[n] == bo
        assert t.small_omega[n] == so
        assert t.moebius[n] == mu


def test_factor_tables_mertens_function(tables_1e5):
    # Mertens function M(10^5) = -48 is a classical checksum of moebius
    assert int(tables_1e5.moebius[1:].sum()) == -48


def test_factor_tables_spf(tables_1e5):
    assert tables_1e5.spf[2] == 2
    assert tables_1e5.spf[91] == 7
    assert tables_1e5.spf[97] == 97


def test_factor_tables_guards():
    with pytest.raises(DomainError):
        primes.factor_tables(0)
    with pytest.raises(ResourceError):
        primes.factor_tables(10**8)


def test_largest_prime_factor(tables_1e5):
    assert primes.largest_prime_factor(2, tables_1e5) == 2
    assert primes.largest_prime_factor(97 * 89, tables_1e5) == 97
    assert primes.largest_prime_factor(1024, tables_1e5) == 2
    with pytest.raises(DomainError):
        primes.largest_prime_factor(1, tables_1e5)


def test_prime_cache_roundtrip(tmp_path, table_1e4):
    path = str(tmp_path / "primes.bin")
    primes.save_prime_cache(table_1e4, path)
    loaded = primes.load_prime_cache(path)
    assert loaded.limit == table_1e4.limit
    assert np.array_equal(loaded.primes, table_1e4.primes)


def test_prime_cache_corruption(tmp_path, table_1e4):
    path = str(tmp_path / "primes.bin")
    primes.save_prime_cache(table_1e4, path)
    raw = bytearray(open(path, "rb").read())
    raw[0] ^= 0xFF
    open(path, "wb").write(bytes(raw))
    with pytest.raises(DomainError):
        primes.load_prime_cache(path)


def test_prime_cache_truncation(tmp_path, table_1e4):
    path = str(tmp_path / "primes.bin")
    primes.save_prime_cache(table_1e4, path)
    raw = open(path, "rb").read()
    open(path, "wb").write(raw[:-4])
    with pytest.raises(DomainError):
        primes.load_prime_cache(path)
