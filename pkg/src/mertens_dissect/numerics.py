"""Arbitrary-precision arithmetic context plus the Riemann zeta and Gamma
functions consumed by the rest of the library.

All high-precision values are mpmath ``mpf`` instances ("BigReal").  Every
public operation computes at ``digits + guard_digits`` decimal digits and
rounds the result to ``digits``, so re-running at higher precision moves a
reported value by less than one unit in the last place.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import DomainError

BigReal = mpf

DEFAULT_DIGITS = int(os.environ.get("MERTENS_DIGITS", "50"))
DEFAULT_GUARD_DIGITS = 10

# Direct summation of zeta already converges geometrically here; below this
# threshold Euler-Maclaurin style evaluation (mpmath's zeta) is used.
_ZETA_DIRECT_THRESHOLD = 30


@dataclass(frozen=True)
class PrecisionContext:
    """Working-precision contract: compute at digits + guard, round to digits."""

    digits: int = DEFAULT_DIGITS
    guard_digits: int = DEFAULT_GUARD_DIGITS

    def __post_init__(self):
        if self.digits < 15:
            raise DomainError(f"digits must be >= 15, got {self.digits}")
        if self.guard_digits < 0:
            raise DomainError(f"guard_digits must be >= 0, got {self.guard_digits}")

    @property
    def work_dps(self) -> int:
        return self.digits + self.guard_digits

    @contextmanager
    def workprec(self, extra: int = 0):
        """mpmath precision scope at work_dps (+ extra) decimal digits."""
        with mp.workdps(self.work_dps + extra):
            yield

    def round(self, value) -> BigReal:
        """Round a work-precision value to the reported ``digits`` precision."""
        with mp.workdps(self.digits):
            return +mpf(value)

    def eps(self) -> BigReal:
        with mp.workdps(self.digits):
            return mpf(10) ** (-self.digits)


def riemann_zeta(s, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """zeta(s) for real s > 1, accurate to ctx.digits."""
    s = mpf(s)
    if s <= 1:
        raise DomainError(f"riemann_zeta requires s > 1, got {s}")
    with ctx.workprec(5):
        if s >= _ZETA_DIRECT_THRESHOLD:
            # 1 + 2^-s + 3^-s + ...; no cancellation, geometric decay.
            eps = mpf(10) ** (-(ctx.work_dps + 4))
            total = mpf(1)
            n = 2
            while True:
                term = mpf(n) ** (-s)
                total += term
                # integral tail bound: sum_{m>n} m^-s < n^{1-s}/(s-1)
                if term * n / (s - 1) < eps:
                    break
                n += 1
            value = total
        else:
            value = mp.zeta(s)
    return ctx.round(value)


def gamma(z, ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """Gamma(z) for real z > 0, accurate to ctx.digits."""
    z = mpf(z)
    if z <= 0:
        raise DomainError(f"gamma requires z > 0, got {z}")
    with ctx.workprec(5):
        value = mp.gamma(z)
    return ctx.round(value)


def euler_gamma(ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    """Euler-Mascheroni constant at ctx.digits."""
    with ctx.workprec():
        value = +mp.euler
    return ctx.round(value)


def pi_const(ctx: PrecisionContext = PrecisionContext()) -> BigReal:
    with ctx.workprec():
        value = +mp.pi
    return ctx.round(value)


def format_real(value, digits: int) -> str:
    """Decimal string at ``digits`` significant digits (for CSV/JSON output)."""
    with mp.workdps(digits):
        return mp.nstr(+mpf(value), digits)
