"""The coefficient sequence c_k and everything derived from it.

Two routes compute c_k: the recursion

    c_0 = 1,  c_k = (1/k) sum_{j=2}^k c_{k-j} Z(j)

and the explicit partition sum over partitions of k into parts >= 2,

    c_k = sum_{2n_2+3n_3+...=k} prod_{j>=2} (Z(j)/j)^{n_j} / n_j!.

The generic recursion <-> explicit transform (exp_transform) ties the two
together for arbitrary sequences.  On top of these sit the prime-induced
sequences c_{k,q}, the expansion constants eta_p / alpha_p, and the scaled
remainders of the multi-term 2^{-k}, 3^{-k}, ... expansion of c_k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from mpmath import mp, mpf

from .errors import DomainError, PrecisionError, ResourceError
from .numerics import BigReal, PrecisionContext, format_real
from .prime_zeta import (
    TailSequence,
    _fixed_point_sum,
    _prime_zeta_raw,
    _small_primes,
    is_small_prime,
    tail_sequence,
)

PARTITION_K_CAP = 60
INDUCED_EXPLICIT_K_CAP = 40


@dataclass(frozen=True)
class Partition:
    """A partition of k, stored as a non-increasing tuple of parts."""

    k: int
    parts: tuple

    def multiplicities(self) -> dict:
        mult: dict = {}
        for part in self.parts:
            mult[part] = mult.get(part, 0) + 1
        return mult


@dataclass(frozen=True)
class CoefficientSeries:
    K: int
    values: tuple  # values[k] = c_k
    source: str    # "recursion" | "partition"
    digits: int

    def __getitem__(self, k: int) -> BigReal:
        return self.values[k]

    def to_csv(self) -> str:
        lines = ["k,c_k"]
        for k, v in enumerate(self.values):
            lines.append(f"{k},{format_real(v, self.digits)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "schema": "mertens-dissect/1",
            "source": self.source,
            "digits": self.digits,
            "coefficients": [
                {"k": k, "c_k": format_real(v, self.digits)} for k, v in enumerate(self.values)
            ],
        }
        return json.dumps(payload, indent=2)


@dataclass(frozen=True)
class InducedSeries:
    q: int
    values: tuple  # values[k] = c_{k,q}
    tails: TailSequence
    digits: int

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> BigReal:
        return self.values[k]


def _partition_parts(k: int, max_part: int, min_part: int = 1) -> Iterator[tuple]:
    if k == 0:
        yield ()
        return
    for m in range(min(k, max_part), min_part - 1, -1):
        for rest in _partition_parts(k - m, m, min_part):
            yield (m,) + rest


def partitions(k: int, min_part: int = 1) -> Iterator[Partition]:
    """All partitions of k, in reverse-lexicographic order of part lists."""
    if k < 0:
        raise DomainError(f"partitions requires k >= 0, got {k}")
    for parts in _partition_parts(k, k, min_part):
        yield Partition(k=k, parts=parts)


def _default_zeta(dps: int) -> Callable[[int], BigReal]:
    cache: dict = {}

    def z(j: int) -> BigReal:
        if j not in cache:
            cache[j] = _prime_zeta_raw(j, dps)[0]
        return cache[j]

    return z


def _c_raw(K: int, dps: int, z: Optional[Callable[[int], BigReal]] = None) -> list:
    """Unrounded c_0..c_K at dps working digits, via the recursion."""
    if z is None:
        z = _default_zeta(dps)
    with mp.workdps(dps + 5):
        c = [mpf(1), mpf(0)]
        for k in range(2, K + 1):
            acc = mp.fsum(c[k - j] * z(j) for j in range(2, k + 1))
            c.append(acc / k)
    return c[: K + 1]


def c_recursive(
    K: int,
    z: Optional[Callable[[int], BigReal]] = None,
    ctx: PrecisionContext = PrecisionContext(),
) -> CoefficientSeries:
    """c_0..c_K via the defining recursion."""
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    raw = _c_raw(K, ctx.work_dps, z)
    return CoefficientSeries(
        K=K,
        values=tuple(ctx.round(v) for v in raw),
        source="recursion",
        digits=ctx.digits,
    )


def c_partition(
    k: int,
    z: Optional[Callable[[int], BigReal]] = None,
    ctx: PrecisionContext = PrecisionContext(),
) -> BigReal:
    """c_k as the explicit sum over partitions of k into parts >= 2."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > PARTITION_K_CAP:
        raise ResourceError(
            f"c_partition capped at k <= {PARTITION_K_CAP}, got {k} (guard: partition_k_cap)"
        )
    if z is None:
        z = _default_zeta(ctx.work_dps)
    with ctx.workprec(5):
        total = mpf(0)  # the empty partition of k=0 contributes its product, 1
        for part in partitions(k, min_part=2):
            term = mpf(1)
            for j, nj in part.multiplicities().items():
                term *= (z(j) / j) ** nj / mp.factorial(nj)
            total += term
    return ctx.round(total)


def _normalize_sequence(A: Sequence) -> list:
    from fractions import Fraction

    return [Fraction(a) if isinstance(a, int) else a for a in A]


def exp_transform(A: Sequence, K: int) -> list:
    """b_0 = 1, b_k = (1/k) sum_{j=1}^k b_{k-j} A_j (A[j-1] = A_j).

    Arithmetic follows the element type: exact with Fraction (or int)
    inputs, floating with mpf inputs.
    """
    if len(A) < K:
        raise DomainError(f"need at least {K} terms of A, got {len(A)}")
    A = _normalize_sequence(A)
    one = type(A[0])(1) if A else 1
    b = [one]
    for k in range(1, K + 1):
        acc = sum(b[k - j] * A[j - 1] for j in range(1, k + 1))
        b.append(acc / k)
    return b


def exp_transform_partition(A: Sequence, K: int) -> list:
    """Partition-explicit route of the same transform (the equivalence twin
    of exp_transform; both must agree)."""
    if len(A) < K:
        raise DomainError(f"need at least {K} terms of A, got {len(A)}")
    A = _normalize_sequence(A)
    one = type(A[0])(1) if A else 1
    out = [one]
    for k in range(1, K + 1):
        total = one - one
        for part in partitions(k):
            term = one
            for j, nj in part.multiplicities().items():
                term = term * (A[j - 1] / j) ** nj / math.factorial(nj)
            total = total + term
        out.append(total)
    return out


def induced_series(
    q: int,
    K: int,
    base: Optional[CoefficientSeries] = None,
    ctx: PrecisionContext = PrecisionContext(),
) -> InducedSeries:
    """c_{k,q} by iterating c_{k,q} = c_{k,p} - p^{-1} c_{k-1,p} from c_{k,2} = c_k.

    The difference chain cancels down to magnitude ~ q^{-k}, so the base
    sequence is recomputed at ctx.work_dps + K*log10(q/2) digits unless the
    supplied base already carries enough precision.
    """
    if not is_small_prime(q):
        raise DomainError(f"q={q} is not prime")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    extra = int(K * math.log10(max(q, 2) / 2.0)) + 10
    dps = ctx.work_dps + extra
    if base is not None and base.K >= K and base.digits >= dps:
        c = [mpf(v) for v in base.values[: K + 1]]
    else:
        c = _c_raw(K, dps)
    with mp.workdps(dps + 5):
        chain = [p for p in _small_primes() if p <= q]
        for i in range(len(chain) - 1):
            p = chain[i]
            inv_p = mpf(1) / p
            c = [c[0]] + [c[k] - inv_p * c[k - 1] for k in range(1, K + 1)]
    tails = tail_sequence(q, K, ctx)
    return InducedSeries(
        q=q, values=tuple(ctx.round(v) for v in c), tails=tails, digits=ctx.digits
    )


def induced_recursion_check(
    series: InducedSeries, ctx: PrecisionContext = PrecisionContext()
) -> BigReal:
    """max_k |k c_{k,q} - sum_j c_{k-j,q} A_{j,q}| over 1 <= k <= K."""
    K = series.K
    with ctx.workprec(5):
        worst = mpf(0)
        for k in range(1, K + 1):
            rhs = mp.fsum(series[k - j] * series.tails.a(j) for j in range(1, k + 1))
            worst = max(worst, abs(k * series[k] - rhs))
    return ctx.round(worst)


def induced_explicit(q: int, k: int, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """c_{k,q} as the full partition sum with the A_{j,q} tail values."""
    if not is_small_prime(q):
        raise DomainError(f"q={q} is not prime")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > INDUCED_EXPLICIT_K_CAP:
        raise ResourceError(
            f"induced_explicit capped at k <= {INDUCED_EXPLICIT_K_CAP}, got {k} "
            "(guard: induced_k_cap)"
        )
    if k == 0:
        return ctx.round(mpf(1))
    tails = tail_sequence(q, k, ctx)
    with ctx.workprec(5):
        total = mpf(0)
        for part in partitions(k):
            term = mpf(1)
            for j, nj in part.multiplicities().items():
                term *= (tails.a(j) / j) ** nj / mp.factorial(nj)
            total += term
    return ctx.round(total)


def _prime_tail(j: int, cutoff: int, dps: int, head: Sequence[int]) -> BigReal:
    """sum over primes r > cutoff of r^{-j}, to ~dps relative digits.

    Computed as Z(j) minus the head sum at elevated precision; the
    subtraction loses ~ j*log10(cutoff/2) digits, which the elevation absorbs.
    """
    extra = int(j * math.log10(cutoff / 2.0)) + 8
    dpse = dps + extra
    with mp.workdps(dpse + 5):
        return _prime_zeta_raw(j, dpse)[0] - _fixed_point_sum(list(head), j, dpse)


def eta_p(p: int, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """eta_p = exp(-p sum_{q<=p} 1/q) * prod_{q>p} (1 - p/q)^{-1} e^{-p/q}.

    Evaluated in log form: primes q <= Q explicitly, the q > Q tail through
    the series sum_{j>=2} p^j T_j / j with T_j the prime tail beyond Q.
    """
    if not is_small_prime(p):
        raise DomainError(f"p={p} is not prime")
    W = ctx.work_dps
    cutoff = max(50, 25 * p)
    head = [r for r in _small_primes() if r <= cutoff]
    cutoff = head[-1]
    with mp.workdps(W + 10):
        log_eta = -p * mp.fsum(mpf(1) / q for q in head if q <= p)
        for q in head:
            if q > p:
                log_eta += -mp.log1p(mpf(-p) / q) - mpf(p) / q
        J = int((W + 8) / math.log10(cutoff / p)) + 2
        for j in range(2, J + 1):
            log_eta += mpf(p) ** j * _prime_tail(j, cutoff, W, head) / j
        value = mp.e**log_eta
    return ctx.round(value)


def alpha_p(p: int, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """alpha_p = eta_p / prod_{q<p} (1 - p/q); alpha_2 = eta_2."""
    if not is_small_prime(p):
        raise DomainError(f"p={p} is not prime")
    eta = eta_p(p, ctx)
    with ctx.workprec(5):
        denom = mpf(1)
        for q in _small_primes():
            if q >= p:
                break
            denom *= 1 - mpf(p) / q
        value = mpf(eta) / denom
    return ctx.round(value)


def nth_prime(n: int) -> int:
    """p_n, 1-indexed (p_1 = 2)."""
    primes = _small_primes()
    if n < 1 or n > len(primes):
        raise DomainError(f"nth_prime supports 1 <= n <= {len(primes)}, got {n}")
    return primes[n - 1]


def eta_shifted(n: int, l: int, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """Shifted expansion coefficient eta_{p_{n+l}}^{(n)}
    = eta_{p_{n+l}} / prod_{i=0}^{l-1} (1 - p_{n+l}/p_{n+i})."""
    if n < 1 or l < 0:
        raise DomainError(f"need n >= 1 and l >= 0, got n={n}, l={l}")
    target = nth_prime(n + l)
    eta = eta_p(target, ctx)
    with ctx.workprec(5):
        denom = mpf(1)
        for i in range(l):
            denom *= 1 - mpf(target) / nth_prime(n + i)
        value = mpf(eta) / denom
    return ctx.round(value)


def expansion_remainder(
    kmax: int, q: int, ctx: PrecisionContext = PrecisionContext()
) -> list:
    """Scaled remainders r_k = (c_k - sum_{p<q} alpha_p p^{-k}) q^k, k = 1..kmax.

    Boundedness of r_k over k is the testable content of the multi-term
    expansion; the subtraction is catastrophically ill-conditioned, hence
    the precision precondition.
    """
    if not is_small_prime(q):
        raise DomainError(f"q={q} is not prime")
    if kmax > 80:
        raise DomainError(f"kmax capped at 80, got {kmax}")
    needed = int(kmax * math.log10(q)) + 20
    if ctx.digits < needed:
        raise PrecisionError(
            f"expansion_remainder(kmax={kmax}, q={q}) needs digits >= {needed}, "
            f"got {ctx.digits}; rerun with --digits {needed}"
        )
    below = [p for p in _small_primes() if p < q]
    alphas = [alpha_p(p, ctx) for p in below]
    c = _c_raw(kmax, ctx.work_dps)
    with ctx.workprec(5):
        out = []
        for k in range(1, kmax + 1):
            expansion = mp.fsum(a * mpf(p) ** (-k) for a, p in zip(alphas, below))
            out.append(ctx.round((c[k] - expansion) * mpf(q) ** k))
    return out
