"""Prime zeta function Z(s), truncations Z(s,x), shifted tail sequences
A_{k,q}, and the Mertens constants/diagnostics.

Z(s) is evaluated by Moebius inversion of log zeta,
    Z(s) = sum_{n>=1} mu(n)/n * log zeta(n s),
with the tail controlled by log zeta(m) < 2*2^{-m}.  The direct prime sum
is kept as a test oracle only; it cannot reach 50 digits.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from mpmath import mp, mpf

from .errors import DomainError
from .numerics import BigReal, PrecisionContext
from .primes import PrimeTable, factor_tables, sieve


@dataclass(frozen=True)
class PrimeZetaValue:
    s: float
    value: BigReal
    tail_bound: BigReal
    converged: bool


@dataclass(frozen=True)
class MertensConstants:
    gamma: BigReal
    beta: BigReal
    beta_minus_gamma: BigReal


@dataclass(frozen=True)
class TailSequence:
    """A_{k,q}: A_{1,q} = -sum_{p<q} 1/p, A_{k,q} = sum_{r>=q prime} r^{-k} (k>=2)."""

    q: int
    values: tuple  # values[k-1] = A_{k,q}, k = 1..K

    @property
    def K(self) -> int:
        return len(self.values)

    def a(self, k: int) -> BigReal:
        if not 1 <= k <= self.K:
            raise DomainError(f"A_{{k,q}} computed only for 1 <= k <= {self.K}, got k={k}")
        return self.values[k - 1]


@dataclass(frozen=True)
class MertensDiagnostics:
    x: int
    first_error: BigReal    # sum (log p)/p - log x
    second_error: BigReal   # Z(1,x) - log log x - beta
    product_ratio: BigReal  # prod (1-1/p)^{-1} / (e^gamma log x)


@lru_cache(maxsize=None)
def _moebius_small(limit: int):
    return tuple(int(v) for v in factor_tables(limit).moebius)


_PZ_CACHE: dict = {}


def _prime_zeta_raw(s, dps: int):
    """Z(s) at dps working digits, unrounded, with a rigorous tail bound."""
    key = (s, dps) if isinstance(s, int) else None
    if key is not None and key in _PZ_CACHE:
        return _PZ_CACHE[key]
    s = mpf(s)
    with mp.workdps(dps + 5):
        if s >= 30:
            # direct prime sum; threshold relative to the leading 2^{-s} term
            # (Z(s) itself is tiny, but callers may scale it back up)
            eps = mpf(2) ** (-s) * mpf(10) ** (-(dps + 4))
            total = mpf(0)
            last = 2
            for p in _small_primes():
                term = mpf(p) ** (-s)
                if term < eps:
                    last = p
                    break
                total += term
            tail = mpf(last) ** (1 - s) / (s - 1)
            result = (+total, +tail)
            if key is not None:
                _PZ_CACHE[key] = result
            return result
        # truncate when 2*2^{-(n+1)s}/(n+1) < 10^{-(dps+2)}
        n_terms = max(2, int((dps + 3) / (float(s) * math.log10(2))) + 2)
        mu = _moebius_small(n_terms)
        total = mpf(0)
        for n in range(1, n_terms + 1):
            m = mu[n]
            if m == 0:
                continue
            total += mpf(m) / n * mp.log(mp.zeta(n * s))
        tail = 2 * mpf(2) ** (-(n_terms + 1) * s) / ((n_terms + 1) * (1 - mpf(2) ** (-s)))
        result = (+total, +tail)
        if key is not None:
            _PZ_CACHE[key] = result
        return result


def prime_zeta(s, ctx: PrecisionContext = PrecisionContext()) -> PrimeZetaValue:
    """Z(s) = sum_p p^{-s} for real s > 1."""
    s = mpf(s)
    if s <= 1:
        raise DomainError(f"prime_zeta requires s > 1, got {s}")
    value, tail = _prime_zeta_raw(s, ctx.work_dps)
    converged = tail < ctx.eps()
    return PrimeZetaValue(
        s=float(s), value=ctx.round(value), tail_bound=ctx.round(tail), converged=converged
    )


def make_zeta_provider(ctx: PrecisionContext, extra_dps: int = 0):
    """Memoized j -> Z(j) callable at ctx.work_dps + extra_dps digits."""
    cache = {}

    def provider(j: int) -> BigReal:
        if j not in cache:
            cache[j] = _prime_zeta_raw(j, ctx.work_dps + extra_dps)[0]
        return cache[j]

    return provider


def _fixed_point_sum(values, power: int, dps: int):
    """sum v^{-power} over integer values, via integer fixed-point arithmetic.

    Values must be ascending.  Error < len(values) * 10^{-(dps+12)}.
    """
    scale = 10 ** (dps + 12)
    total = 0
    for v in values:
        d = v**power if power != 1 else v
        if d > scale:
            break  # ascending: remaining terms each below one ulp of the scale
        total += scale // d
    with mp.workdps(dps + 14):
        return mpf(total) / scale


def truncated_prime_zeta(
    s, x: int, table: PrimeTable, ctx: PrecisionContext = PrecisionContext()
) -> BigReal:
    """Z(s,x) = sum_{p<=x} p^{-s}, an exact finite sum at working precision."""
    if x < 2:
        raise DomainError(f"truncated_prime_zeta requires x >= 2, got {x}")
    if x > table.limit:
        raise DomainError(f"x={x} exceeds table limit {table.limit}")
    s_f = float(s)
    if s_f <= 0:
        raise DomainError(f"truncated_prime_zeta requires s > 0, got {s}")
    primes = table.primes_up_to(x)
    if s_f == int(s_f):
        value = _fixed_point_sum(primes.tolist(), int(s_f), ctx.work_dps)
    else:
        s_m = mpf(s)
        with ctx.workprec(5):
            value = mp.fsum(mpf(int(p)) ** (-s_m) for p in primes)
    return ctx.round(value)


def truncated_prime_zeta_exact(s: int, x: int, table: PrimeTable) -> Fraction:
    """Exact rational Z(s,x) for integer s >= 1 (oracle / rational routes)."""
    if s < 1 or s != int(s):
        raise DomainError(f"exact truncation requires integer s >= 1, got {s}")
    if x < 2:
        raise DomainError(f"truncated_prime_zeta requires x >= 2, got {x}")
    if x > table.limit:
        raise DomainError(f"x={x} exceeds table limit {table.limit}")
    return sum(Fraction(1, int(p) ** s) for p in table.primes_up_to(x))


@lru_cache(maxsize=None)
def _small_primes(limit: int = 10**4):
    return tuple(int(p) for p in sieve(limit).primes)


def is_small_prime(q: int) -> bool:
    primes = _small_primes()
    if q > primes[-1]:
        raise DomainError(f"primality check supported only up to {primes[-1]}, got {q}")
    i = bisect.bisect_left(primes, q)
    return i < len(primes) and primes[i] == q


def tail_sequence(q: int, K: int, ctx: PrecisionContext = PrecisionContext()) -> TailSequence:
    """A_{k,q} for k = 1..K.

    For k >= 2 the cancellation in Z(k) - sum_{p<q} p^{-k} loses about
    k*log10(q/2) digits, so each k is computed at an elevated precision.
    """
    if not is_small_prime(q):
        raise DomainError(f"q={q} is not prime")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    below = [p for p in _small_primes() if p < q]
    values = []
    with ctx.workprec(5):
        a1 = -mp.fsum(mpf(1) / p for p in below)
    values.append(ctx.round(a1))
    for k in range(2, K + 1):
        extra = int(k * math.log10(q / 2.0)) + 8
        dps = ctx.work_dps + extra
        with mp.workdps(dps + 5):
            ak = _prime_zeta_raw(k, dps)[0] - mp.fsum(mpf(p) ** (-k) for p in below)
        values.append(ctx.round(ak))
    return TailSequence(q=q, values=tuple(values))


def mertens_beta(ctx: PrecisionContext = PrecisionContext()) -> MertensConstants:
    """beta - gamma = -sum_{j>=2} Z(j)/j, truncated by the Z(j) < 2^{-j+1} bound."""
    with ctx.workprec(5):
        gamma_val = +mp.euler
        target = mpf(10) ** (-(ctx.work_dps + 5))
        total = mpf(0)
        j = 2
        while True:
            total += _prime_zeta_raw(j, ctx.work_dps + 5)[0] / j
            if mpf(2) ** (-j) / j < target:
                break
            j += 1
        beta_minus_gamma = -total
        beta_val = gamma_val + beta_minus_gamma
    return MertensConstants(
        gamma=ctx.round(gamma_val),
        beta=ctx.round(beta_val),
        beta_minus_gamma=ctx.round(beta_minus_gamma),
    )


def log_mertens_product(
    x: int, table: PrimeTable, ctx: PrecisionContext = PrecisionContext()
) -> BigReal:
    """log prod_{p<=x} (1-1/p)^{-1} = sum_{j>=1} Z(j,x)/j."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    primes = table.primes_up_to(x).tolist()
    dps = ctx.work_dps
    with ctx.workprec(5):
        total = _fixed_point_sum(primes, 1, dps)
        j = 2
        while True:
            zj = _fixed_point_sum(primes, j, dps)
            if zj == 0:
                break
            total += zj / j
            j += 1
    return ctx.round(total)


def mertens_diagnostics(
    x: int,
    table: PrimeTable,
    consts: MertensConstants,
    ctx: PrecisionContext = PrecisionContext(),
) -> MertensDiagnostics:
    """Numerical residuals of Mertens' three theorems at cutoff x."""
    if x < 2:
        raise DomainError(f"mertens_diagnostics requires x >= 2, got {x}")
    primes = table.primes_up_to(x)
    with ctx.workprec(5):
        # O(1) diagnostic; double precision is ample for the first theorem.
        logp_over_p = float(np.sum(np.log(primes.astype(np.float64)) / primes))
        first = mpf(logp_over_p) - mp.log(x)
        z1x = _fixed_point_sum(primes.tolist(), 1, ctx.work_dps)
        second = z1x - mp.log(mp.log(x)) - consts.beta
        log_prod = log_mertens_product(x, table, ctx)
        ratio = mp.e ** (log_prod - mp.euler) / mp.log(x)
    return MertensDiagnostics(
        x=x,
        first_error=ctx.round(first),
        second_error=ctx.round(second),
        product_ratio=ctx.round(ratio),
    )
