"""Analytic factor functions nu(z), lambda(z), eta(z), the uniform-range
estimates, and Cauchy coefficient extraction of Z_k(1,x) by trapezoidal
contour quadrature.

eta is the workhorse: log eta(z) = gamma*z + sum_{j>=2} (z^j - z) Z(j)/j,
geometrically convergent for |z| < 2 (the j = 1 terms cancel).  nu comes
from the identity eta(z) = e^{gamma z} Gamma(z+1) nu(z); lambda needs its
own finite product plus a tail series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpc, mpf

from .errors import DomainError, NearPoleError
from .numerics import BigReal, PrecisionContext
from .prime_zeta import _fixed_point_sum, _prime_zeta_raw, _small_primes
from .primes import PrimeTable

DEFAULT_EPSILON = 0.1
LAMBDA_PRIME_CUTOFF = 1000
NODE_CEILING = 1 << 16


@dataclass(frozen=True)
class AnalyticFactor:
    kind: str  # "nu" | "lambda" | "eta"
    z: float
    value: BigReal
    prime_cutoff: int
    tail_order: int


@dataclass(frozen=True)
class ContourSpec:
    k: int
    x: int
    radius: float
    nodes: int

    def __post_init__(self):
        if not 0 < self.radius < 2:
            raise DomainError(f"contour radius must lie in (0, 2), got {self.radius}")
        if self.nodes < max(4 * self.k, 4):
            raise DomainError(
                f"nodes={self.nodes} below anti-aliasing floor {max(4 * self.k, 4)}"
            )


@dataclass(frozen=True)
class ContourResult:
    k: int
    x: int
    radius: float
    nodes: int
    value: BigReal
    imag_residual: BigReal


def _check_z(z, kind: str):
    z = mpf(z)
    if not 0 <= z < 2:
        raise DomainError(f"{kind}(z) defined here for 0 <= z < 2, got {z}")
    return z


def _log_eta_raw(z, dps: int):
    """log eta(z) and the truncation order, unrounded at dps digits.

    Z(j) enters multiplied by z^j (large for z near 2), so it is computed
    with extra digits to keep the products accurate.
    """
    zdps = dps + 15
    with mp.workdps(zdps + 5):
        z = mpf(z)
        total = mp.euler * z
        eps = mpf(10) ** (-(dps + 2))
        j = 2
        while True:
            zj = _prime_zeta_raw(j, zdps)[0]
            total += (z**j - z) * zj / j
            # Z(j) < 2*2^{-j}
            if (z**j + z) * 2 * mpf(2) ** (-j) / j < eps:
                break
            j += 1
        return +total, j


def eta_fn(z, ctx: PrecisionContext = PrecisionContext()) -> AnalyticFactor:
    """eta(z) = e^{gamma z} prod_p (1-1/p)^z (1-z/p)^{-1}."""
    z = _check_z(z, "eta")
    log_eta, order = _log_eta_raw(z, ctx.work_dps)
    with ctx.workprec(5):
        value = mp.e**log_eta
    return AnalyticFactor(
        kind="eta", z=float(z), value=ctx.round(value), prime_cutoff=0, tail_order=order
    )


def nu(z, ctx: PrecisionContext = PrecisionContext()) -> AnalyticFactor:
    """nu(z) = (1/Gamma(z+1)) prod_p (1-z/p)^{-1} (1-1/p)^z = eta(z) e^{-gamma z}/Gamma(z+1)."""
    z = _check_z(z, "nu")
    log_eta, order = _log_eta_raw(z, ctx.work_dps)
    with ctx.workprec(5):
        value = mp.e ** (log_eta - mp.euler * z) / mp.gamma(z + 1)
    return AnalyticFactor(
        kind="nu", z=float(z), value=ctx.round(value), prime_cutoff=0, tail_order=order
    )


def _prime_tail_beyond(i: int, cutoff: int, dps: int, head) -> BigReal:
    extra = int(i * math.log10(cutoff / 2.0)) + 8
    dpse = dps + extra
    with mp.workdps(dpse + 5):
        return _prime_zeta_raw(i, dpse)[0] - _fixed_point_sum(list(head), i, dpse)


def lambda_fn(
    z,
    ctx: PrecisionContext = PrecisionContext(),
    prime_cutoff: int = LAMBDA_PRIME_CUTOFF,
) -> AnalyticFactor:
    """lambda(z) = (1/Gamma(z+1)) prod_p (1 + z/(p-1)) (1-1/p)^z.

    Finite product over p <= prime_cutoff; the remaining primes enter via
    the tail series sum_i w_i(z) T_i with T_i = sum_{p>cutoff} p^{-i} (the
    divergent i = 1 contributions cancel between the two log expansions).
    """
    z = _check_z(z, "lambda")
    head = [p for p in _small_primes() if p <= prime_cutoff]
    P = head[-1]
    W = ctx.work_dps
    with mp.workdps(W + 10):
        total = mpf(0)
        for p in head:
            total += mp.log1p(z / (p - 1)) + z * mp.log1p(mpf(-1) / p)
        eps = mpf(10) ** (-(W + 2))
        i = 2
        while True:
            # w_i = z - z/i + sum_{j=2}^i (-1)^{j+1} z^j/j * C(i-1, j-1)
            w = z - z / i
            for j in range(2, i + 1):
                w += (-1) ** (j + 1) * z**j / j * math.comb(i - 1, j - 1)
            t_i = _prime_tail_beyond(i, P, W, head)
            total += w * t_i
            if ((1 + z) ** i + 2 * z) * mpf(P) ** (1 - i) / (i - 1) < eps:
                break
            i += 1
        value = mp.e**total / mp.gamma(z + 1)
    return AnalyticFactor(
        kind="lambda", z=float(z), value=ctx.round(value), prime_cutoff=P, tail_order=i
    )


@dataclass(frozen=True)
class UniformComparison:
    k: int
    x: int
    r: BigReal
    estimate: BigReal
    exact: BigReal
    ratio: BigReal


def _r_of(k: int, x: int, epsilon: float, dps: int = 30):
    if x < 16:
        raise DomainError(f"uniform estimates need x >= 16 (log log x > 1), got {x}")
    with mp.workdps(dps + 5):
        r = mpf(k) / mp.log(mp.log(x))
        if r > 2 - epsilon:
            raise DomainError(f"r = k/log log x = {float(r):.4f} exceeds 2 - eps = {2 - epsilon}")
        return +r


def uniform_estimate(
    k: int, x: int, ctx: PrecisionContext = PrecisionContext(), epsilon: float = DEFAULT_EPSILON
) -> BigReal:
    """eta(r) (log log x)^k / k! with r = k/log log x."""
    r = _r_of(k, x, epsilon, ctx.work_dps)
    eta = eta_fn(r, ctx).value
    with ctx.workprec(5):
        value = eta * mp.log(mp.log(x)) ** k / mp.factorial(k)
    return ctx.round(value)


def sathe_selberg_estimate(
    k: int,
    x: int,
    tables,
    ctx: PrecisionContext = PrecisionContext(),
    epsilon: float = DEFAULT_EPSILON,
    mode: str = "big_omega",
) -> UniformComparison:
    """nu(r) (log log x)^k / k! against the sieved bounded sum."""
    from .dissection import bounded_sum

    r = _r_of(k, x, epsilon, ctx.work_dps)
    nu_val = nu(r, ctx).value
    exact = bounded_sum(k, x, tables, mode=mode, ctx=ctx)
    with ctx.workprec(5):
        estimate = nu_val * mp.log(mp.log(x)) ** k / mp.factorial(k)
        ratio = estimate / mpf(exact) if exact != 0 else mp.inf
    return UniformComparison(
        k=k,
        x=x,
        r=ctx.round(r),
        estimate=ctx.round(estimate),
        exact=ctx.round(exact),
        ratio=ctx.round(ratio),
    )


_FX_SERIES_CACHE: dict = {}


def _fx_series_weights(x: int, block: int, n_terms: int, table: PrimeTable, dps: int):
    """W_j = sum_{block < p <= x} p^{-j}, j = 1..n_terms (finite, exact sums)."""
    key = (x, block, n_terms, dps)
    if key not in _FX_SERIES_CACHE:
        primes = [int(p) for p in table.primes_up_to(x) if p > block]
        _FX_SERIES_CACHE[key] = [
            _fixed_point_sum(primes, j, dps) for j in range(1, n_terms + 1)
        ]
    return _FX_SERIES_CACHE[key]


def _f_x_raw(z, x: int, table: PrimeTable, ctx: PrecisionContext):
    """Unrounded f_x(z) at work precision (shared by f_x and the quadrature)."""
    if x < 2 or x > table.limit:
        raise DomainError(f"x={x} out of range for table limit {table.limit}")
    with ctx.workprec(10):
        z = mpc(z) if isinstance(z, (complex, mpc)) else mpf(z)
        az = abs(z)
        for p in table.primes_up_to(min(x, int(az) + 2)).tolist():
            if abs(z - p) < mpf("1e-8"):
                raise NearPoleError(f"z={z} within 1e-8 of the pole at prime p={p}")
        block = max(64, int(4 * az) + 4)
        log_f = mpf(0)
        for p in table.primes_up_to(min(x, block)).tolist():
            log_f = log_f - mp.log(1 - z / p)
        if x > block:
            n_terms = int((ctx.work_dps + 8) / math.log10(block / max(float(az), 0.5))) + 2
            weights = _fx_series_weights(x, block, n_terms, table, ctx.work_dps)
            zj = mpf(1) if isinstance(z, mpf) else mpc(1)
            for j in range(1, n_terms + 1):
                zj *= z
                log_f = log_f + zj * weights[j - 1] / j
        return mp.exp(log_f)


def f_x(z, x: int, table: PrimeTable, ctx: PrecisionContext = PrecisionContext()):
    """f_x(z) = prod_{p<=x} (1 - z/p)^{-1}, complex-capable, via log accumulation.

    Factors for small primes are taken directly; for p above a block bound
    the log expands as sum_j z^j p^{-j} / j, summed over primes in bulk.
    """
    value = _f_x_raw(z, x, table, ctx)
    if isinstance(value, mpc):
        return mpc(ctx.round(value.real), ctx.round(value.imag))
    return ctx.round(value)


def contour_extract(
    spec: ContourSpec, table: PrimeTable, ctx: PrecisionContext = PrecisionContext()
) -> ContourResult:
    """Trapezoidal Cauchy extraction: Z_k(1,x) = (1/2 pi i) oint f_x(z) dz/z^{k+1}."""
    k, x, r, M = spec.k, spec.x, spec.radius, spec.nodes
    with ctx.workprec(10):
        r = mpf(r)
        acc = mpc(0)
        for m in range(M):
            node = r * mp.expjpi(mpf(2 * m) / M)
            phase = mp.expjpi(mpf(-2 * k * m) / M)
            acc += _f_x_raw(node, x, table, ctx) * phase
        acc = acc / (M * r**k)
    return ContourResult(
        k=k,
        x=x,
        radius=float(spec.radius),
        nodes=M,
        value=ctx.round(acc.real),
        imag_residual=ctx.round(abs(acc.imag)),
    )


def contour_extract_auto(
    k: int,
    x: int,
    table: PrimeTable,
    ctx: PrecisionContext = PrecisionContext(),
    radius: Optional[float] = None,
) -> ContourResult:
    """Node-doubling wrapper: M from max(64, 8k), doubled until two successive
    results agree to the target precision or M exceeds the ceiling."""
    if radius is None:
        with mp.workdps(30):
            loglog = mp.log(mp.log(x)) if x >= 16 else mpf(1)
            radius = float(max(mpf(k) / loglog, mpf("0.25")))
        radius = min(radius, 1.9)
    M = max(64, 8 * k, 4 * k + 4)
    prev = None
    while True:
        result = contour_extract(ContourSpec(k=k, x=x, radius=radius, nodes=M), table, ctx)
        if prev is not None:
            with ctx.workprec():
                scale = max(abs(prev.value), mpf(1))
                if abs(result.value - prev.value) < scale * mpf(10) ** (-(ctx.digits - 2)):
                    return result
        if 2 * M > NODE_CEILING:
            return result
        prev = result
        M *= 2
