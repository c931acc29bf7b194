"""Smooth dissected sums Z_k(s,x) by three routes, the main-term formula
with its error diagnostics, the resummation to Mertens' product, and the
bounded (n <= x) comparison sums.

Routes:
  newton    -- k Z_k(s,x) = sum_{j=1}^k Z(js,x) Z_{k-j}(s,x), seeded Z_0 = 1
  partition -- the partition sum over n_1 + 2 n_2 + ... = k
  brute     -- exact rational enumeration of prime multisets (the oracle)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from mpmath import mp, mpf

from .coefficients import CoefficientSeries, c_recursive, partitions
from .errors import DomainError, ResourceError
from .numerics import BigReal, PrecisionContext
from .prime_zeta import (
    MertensConstants,
    _fixed_point_sum,
    log_mertens_product,
    mertens_beta,
    truncated_prime_zeta,
    truncated_prime_zeta_exact,
)
from .primes import FactorTables, PrimeTable

PARTITION_ROUTE_K_CAP = 40
BRUTE_TERM_GUARD = 10**8


@dataclass(frozen=True)
class SmoothSumResult:
    k: int
    x: int
    s: float
    value: object  # BigReal, or Fraction in exact mode
    route: str     # "newton" | "partition" | "brute"
    term_count: Optional[int] = None
    exact: bool = False


@dataclass(frozen=True)
class DissectionEstimate:
    k: int
    x: int
    main_term: BigReal
    exact: BigReal
    scaled_error: BigReal  # (exact - main) * log x / (log log x)^{k-1}


@dataclass(frozen=True)
class ResumResult:
    x: int
    K: int
    partial_resum: BigReal
    mertens_product: BigReal
    eg_logx: BigReal
    resum_gap: BigReal     # |partial_resum - mertens_product|
    product_ratio: BigReal  # mertens_product / (e^gamma log x)


@dataclass(frozen=True)
class FriableRatio:
    k: int
    x: int
    r: BigReal
    smooth: BigReal
    bounded: BigReal
    ratio: BigReal
    limit_factor: BigReal  # e^{r gamma} Gamma(r+1)


def _zx_values(k: int, x: int, s, table: PrimeTable, ctx: PrecisionContext, exact: bool):
    """Z(j*s, x) for j = 1..k, exact Fractions or work-precision mpf."""
    if exact:
        s_i = int(s)
        if s_i != s or s_i < 1:
            raise DomainError(f"exact mode requires integer s >= 1, got {s}")
        return [truncated_prime_zeta_exact(j * s_i, x, table) for j in range(1, k + 1)]
    return [truncated_prime_zeta(j * mpf(s), x, table, ctx) for j in range(1, k + 1)]


def smooth_sum_newton(
    k: int,
    x: int,
    s=1,
    table: PrimeTable = None,
    ctx: PrecisionContext = PrecisionContext(),
    exact: bool = False,
) -> SmoothSumResult:
    """Z_k(s,x) via the power-sum recursion."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if table is None or x > table.limit:
        raise DomainError(f"x={x} exceeds table limit")
    if k == 0:
        one = Fraction(1) if exact else ctx.round(mpf(1))
        return SmoothSumResult(k=0, x=x, s=float(s), value=one, route="newton", exact=exact)
    zx = _zx_values(k, x, s, table, ctx, exact)
    if exact:
        zk = [Fraction(1)]
        for m in range(1, k + 1):
            zk.append(sum(zx[j - 1] * zk[m - j] for j in range(1, m + 1)) / m)
        value = zk[k]
    else:
        with ctx.workprec(5):
            zk = [mpf(1)]
            for m in range(1, k + 1):
                zk.append(mp.fsum(zx[j - 1] * zk[m - j] for j in range(1, m + 1)) / m)
            value = ctx.round(zk[k])
    return SmoothSumResult(k=k, x=x, s=float(s), value=value, route="newton", exact=exact)


def smooth_sum_partition(
    k: int,
    x: int,
    s=1,
    table: PrimeTable = None,
    ctx: PrecisionContext = PrecisionContext(),
    exact: bool = False,
) -> SmoothSumResult:
    """Z_k(s,x) via the partition sum."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > PARTITION_ROUTE_K_CAP:
        raise ResourceError(
            f"partition route capped at k <= {PARTITION_ROUTE_K_CAP}, got {k} "
            "(guard: partition_route_k_cap)"
        )
    if table is None or x > table.limit:
        raise DomainError(f"x={x} exceeds table limit")
    zx = _zx_values(k, x, s, table, ctx, exact) if k else []
    if exact:
        total = Fraction(0)
        for part in partitions(k):
            term = Fraction(1)
            for j, nj in part.multiplicities().items():
                term *= (zx[j - 1] / j) ** nj / math.factorial(nj)
            total += term
        value = total if k else Fraction(1)
    else:
        with ctx.workprec(5):
            total = mpf(0)
            for part in partitions(k):
                term = mpf(1)
                for j, nj in part.multiplicities().items():
                    term *= (zx[j - 1] / j) ** nj / mp.factorial(nj)
                total += term
            value = ctx.round(total if k else mpf(1))
    return SmoothSumResult(k=k, x=x, s=float(s), value=value, route="partition", exact=exact)


def smooth_sum_brute(k: int, x: int, table: PrimeTable) -> SmoothSumResult:
    """Exact rational Z_k(1,x) by DFS over non-decreasing prime multisets."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if x > table.limit:
        raise DomainError(f"x={x} exceeds table limit {table.limit}")
    primes = [int(p) for p in table.primes_up_to(x)]
    n_primes = len(primes)
    count = math.comb(n_primes + k - 1, k)
    if count > BRUTE_TERM_GUARD:
        raise ResourceError(
            f"brute enumeration would need {count} terms > {BRUTE_TERM_GUARD} "
            "(guard: brute_term_guard)"
        )
    total = Fraction(0)

    def dfs(idx: int, remaining: int, denom: int):
        nonlocal total
        if remaining == 0:
            total += Fraction(1, denom)
            return
        for i in range(idx, n_primes):
            dfs(i, remaining - 1, denom * primes[i])

    dfs(0, k, 1)
    return SmoothSumResult(
        k=k, x=x, s=1.0, value=total, route="brute", term_count=count, exact=True
    )


def theorem_main_term(
    k: int,
    x: int,
    c: Optional[CoefficientSeries] = None,
    consts: Optional[MertensConstants] = None,
    table: PrimeTable = None,
    ctx: PrecisionContext = PrecisionContext(),
) -> DissectionEstimate:
    """Main term sum_{j<=k} c_{k-j}/j! (log log x + beta)^j versus the exact
    smooth sum, with the scaled error of the stated O_k bound."""
    if x < 3:
        raise DomainError(f"theorem_main_term requires x >= 3, got {x}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if consts is None:
        consts = mertens_beta(ctx)
    if c is None or c.K < k:
        c = c_recursive(k, ctx=ctx)
    exact = smooth_sum_newton(k, x, 1, table, ctx).value
    with ctx.workprec(5):
        loglog = mp.log(mp.log(x))
        L = loglog + consts.beta
        main = mp.fsum(c[k - j] / mp.factorial(j) * L**j for j in range(k + 1))
        scaled = (mpf(exact) - main) * mp.log(x) / loglog ** (k - 1)
    return DissectionEstimate(
        k=k, x=x, main_term=ctx.round(main), exact=ctx.round(exact), scaled_error=ctx.round(scaled)
    )


def dissection_resum(
    x: int,
    K: Optional[int] = None,
    table: PrimeTable = None,
    ctx: PrecisionContext = PrecisionContext(),
) -> ResumResult:
    """Partial resummation sum_{k<=K} Z_k(1,x) against Mertens' product."""
    if x < 3:
        raise DomainError(f"dissection_resum requires x >= 3, got {x}")
    if table is None or x > table.limit:
        raise DomainError(f"x={x} exceeds table limit")
    with ctx.workprec(5):
        cut = mpf(10) ** (-(ctx.digits // 2))
        # power sums Z(j,x); j beyond ~ work/log10(2) vanish at working precision
        primes = table.primes_up_to(x).tolist()
        zx = {}

        def z(j: int):
            if j not in zx:
                zx[j] = _fixed_point_sum(primes, j, ctx.work_dps)
            return zx[j]

        zk = [mpf(1)]
        partial = mpf(1)
        k = 0
        while True:
            k += 1
            nxt = mp.fsum(z(j) * zk[k - j] for j in range(1, k + 1)) / k
            zk.append(nxt)
            partial += nxt
            if K is not None and k >= K:
                break
            if K is None and (nxt < cut or k >= 200):
                break
        product = mp.e ** log_mertens_product(x, table, ctx)
        eg_logx = mp.e**mp.euler * mp.log(x)
        gap = abs(partial - product)
        ratio = product / eg_logx
    return ResumResult(
        x=x,
        K=k,
        partial_resum=ctx.round(partial),
        mertens_product=ctx.round(product),
        eg_logx=ctx.round(eg_logx),
        resum_gap=ctx.round(gap),
        product_ratio=ctx.round(ratio),
    )


def bounded_sum(
    k: int,
    x: int,
    tables: FactorTables,
    mode: str = "big_omega",
    exact: bool = False,
    ctx: PrecisionContext = PrecisionContext(),
):
    """sum_{n<=x, Omega(n)=k} 1/n (or the omega variant)."""
    if x > tables.limit:
        raise DomainError(f"x={x} exceeds tables limit {tables.limit}")
    if x < 1 or k < 0:
        raise DomainError(f"need x >= 1 and k >= 0, got x={x}, k={k}")
    if mode not in ("big_omega", "small_omega"):
        raise DomainError(f"mode must be big_omega or small_omega, got {mode!r}")
    arr = tables.big_omega if mode == "big_omega" else tables.small_omega
    ns = np.nonzero(arr[1 : x + 1] == k)[0] + 1
    if exact:
        return sum(Fraction(1, int(n)) for n in ns)
    value = _fixed_point_sum(ns.tolist(), 1, ctx.work_dps)
    return ctx.round(value)


def friable_ratio(
    k: int,
    x: int,
    table: PrimeTable,
    tables: FactorTables,
    mode: str = "big_omega",
    ctx: PrecisionContext = PrecisionContext(),
) -> FriableRatio:
    """smooth_sum / bounded_sum compared with e^{r gamma} Gamma(r+1)."""
    smooth = smooth_sum_newton(k, x, 1, table, ctx).value
    bounded = bounded_sum(k, x, tables, mode=mode, ctx=ctx)
    if bounded == 0:
        raise DomainError(f"bounded_sum(k={k}, x={x}) is zero; ratio degenerate")
    with ctx.workprec(5):
        r = mpf(k) / mp.log(mp.log(x)) if x >= 3 else mpf(0)
        ratio = mpf(smooth) / mpf(bounded)
        limit_factor = mp.e ** (r * mp.euler) * mp.gamma(r + 1)
    return FriableRatio(
        k=k,
        x=x,
        r=ctx.round(r),
        smooth=ctx.round(smooth),
        bounded=ctx.round(bounded),
        ratio=ctx.round(ratio),
        limit_factor=ctx.round(limit_factor),
    )
