"""Prime generation and multiplicative bookkeeping.

PrimeTable is a plain Eratosthenes sieve (segmented above 10^7).
FactorTables carries smallest-prime-factor, Omega, omega and Moebius arrays
built with vectorized numpy passes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError

SIEVE_CEILING = 10**8
FACTOR_CEILING = 10**7
_SEGMENT = 1 << 22

_CACHE_MAGIC = b"MDPT1"


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray  # ascending int64

    @property
    def count(self) -> int:
        return len(self.primes)

    def primes_up_to(self, x: int) -> np.ndarray:
        """View of all primes <= x (requires x <= limit)."""
        if x > self.limit:
            raise DomainError(f"x={x} exceeds table limit {self.limit}")
        idx = np.searchsorted(self.primes, x, side="right")
        return self.primes[:idx]

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise DomainError(f"n={n} exceeds table limit {self.limit}")
        idx = np.searchsorted(self.primes, n)
        return idx < len(self.primes) and self.primes[idx] == n


@dataclass(frozen=True)
class FactorTables:
    limit: int
    spf: np.ndarray         # smallest prime factor, 0 below index 2
    big_omega: np.ndarray   # Omega(n)
    small_omega: np.ndarray  # omega(n)
    moebius: np.ndarray     # mu(n)
    primes: np.ndarray = field(repr=False, default=None)


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _simple_sieve(int(limit**0.5) + 1)
    chunks = [base[base <= limit]]
    lo = int(base[-1]) + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start < p * p:
                start = p * p
            if start < hi:
                flags[start - lo :: p] = False
        chunks.append(np.nonzero(flags)[0].astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def sieve(limit: int, ceiling: int = SIEVE_CEILING) -> PrimeTable:
    """All primes <= limit."""
    if limit < 2:
        raise DomainError(f"sieve requires limit >= 2, got {limit}")
    if limit > ceiling:
        raise ResourceError(
            f"sieve limit {limit} exceeds memory ceiling {ceiling} (guard: sieve_ceiling)"
        )
    if limit <= 10**7:
        primes = _simple_sieve(limit)
    else:
        primes = _segmented_sieve(limit)
    return PrimeTable(limit=limit, primes=primes)


def factor_tables(limit: int, ceiling: int = FACTOR_CEILING) -> FactorTables:
    """spf / Omega / omega / Moebius arrays for 0..limit."""
    if limit < 1:
        raise DomainError(f"factor_tables requires limit >= 1, got {limit}")
    if limit > ceiling:
        raise ResourceError(
            f"factor_tables limit {limit} exceeds ceiling {ceiling} (guard: factor_ceiling)"
        )
    n = limit + 1
    spf = np.zeros(n, dtype=np.uint32)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: p]
            block[block == 0] = p
    unmarked = np.nonzero(spf[2:] == 0)[0] + 2
    spf[unmarked] = unmarked

    primes = np.nonzero(spf[2:] == np.arange(2, n, dtype=np.uint32))[0] + 2
    primes = primes.astype(np.int64)

    big_omega = np.zeros(n, dtype=np.uint8)
    small_omega = np.zeros(n, dtype=np.uint8)
    moebius = np.zeros(n, dtype=np.int8)
    if limit >= 1:
        moebius[1:] = 1
    # Strided passes only for p <= sqrt(limit); anything left over in the
    # cofactor array is a single prime > sqrt(limit), handled in one shot.
    root = int(limit**0.5)
    cofactor = np.arange(n, dtype=np.int64)
    for p in primes[primes <= root].tolist():
        small_omega[p::p] += 1
        moebius[p::p] *= -1
        pe = p
        while pe <= limit:
            big_omega[pe::pe] += 1
            cofactor[pe::pe] //= p
            pe *= p
        moebius[p * p :: p * p] = 0
    large = cofactor > 1
    large[:2] = False
    big_omega[large] += 1
    small_omega[large] += 1
    np.negative(moebius, out=moebius, where=large)
    return FactorTables(
        limit=limit,
        spf=spf,
        big_omega=big_omega,
        small_omega=small_omega,
        moebius=moebius,
        primes=primes,
    )


def largest_prime_factor(n: int, tables: FactorTables) -> int:
    """P+(n) via repeated division by the smallest prime factor."""
    if n < 2 or n > tables.limit:
        raise DomainError(f"largest_prime_factor requires 2 <= n <= {tables.limit}, got {n}")
    largest = 0
    while n > 1:
        p = int(tables.spf[n])
        largest = max(largest, p)
        while n % p == 0:
            n //= p
    return largest


def save_prime_cache(table: PrimeTable, path: str) -> None:
    """Binary cache: magic 'MDPT1', LE u64 limit and count, u16 prime deltas."""
    deltas = np.diff(table.primes, prepend=np.int64(0))
    if deltas.max() >= 1 << 16:
        raise ResourceError("prime gap exceeds u16 delta encoding (guard: cache_delta)")
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<QQ", table.limit, table.count))
        fh.write(deltas.astype("<u2").tobytes())


def load_prime_cache(path: str) -> PrimeTable:
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != _CACHE_MAGIC:
            raise DomainError(f"bad prime-cache magic {magic!r} in {path}")
        limit, count = struct.unpack("<QQ", fh.read(16))
        deltas = np.frombuffer(fh.read(2 * count), dtype="<u2")
    if len(deltas) != count:
        raise DomainError(f"truncated prime cache {path}")
    primes = np.cumsum(deltas.astype(np.int64))
    if count and (primes[-1] > limit or np.any(np.diff(primes) <= 0)):
        raise DomainError(f"corrupt prime cache {path}")
    return PrimeTable(limit=int(limit), primes=primes)
