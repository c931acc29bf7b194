import random
import subprocess
import sys

import pytest
from mpmath import mp, mpf

from mertens_dissect.errors import DomainError
from mertens_dissect.numerics import (
    PrecisionContext,
    euler_gamma,
    format_real,
    gamma,
    riemann_zeta,
)


def test_precision_context_validation():
    with pytest.raises(DomainError):
        PrecisionContext(digits=14)
    with pytest.raises(DomainError):
        PrecisionContext(digits=50, guard_digits=-1)
    ctx = PrecisionContext(digits=50, guard_digits=10)
    assert ctx.work_dps == 60


def test_workprec_restores_precision():
    ctx = PrecisionContext(digits=40)
    before = mp.dps
    with ctx.workprec(5):
        assert mp.dps == 55
    assert mp.dps == before


def test_round_drops_guard_noise():
    ctx = PrecisionContext(digits=20)
    with ctx.workprec():
        noisy = mpf(1) + mpf(10) ** -25
    assert ctx.round(noisy) == 1


def test_riemann_zeta_known_values(ctx50):
    with ctx50.workprec():
        assert abs(riemann_zeta(2, ctx50) - mp.pi**2 / 6) < ctx50.eps() * 10
        assert abs(riemann_zeta(4, ctx50) - mp.pi**4 / 90) < ctx50.eps() * 10


def test_riemann_zeta_direct_path_matches_mpmath(ctx50):
    # s >= 30 switches to the direct series; both routes must agree
    with ctx50.workprec():
        for s in (30, 31, 45.5, 80):
            direct = mpf(riemann_zeta(s, ctx50))
            ref = mp.zeta(mpf(s))
            assert abs(direct - ref) < abs(ref) * ctx50.eps() * 100


def test_riemann_zeta_domain():
    with pytest.raises(DomainError):
        riemann_zeta(1)
    with pytest.raises(DomainError):
        riemann_zeta(0.5)


def test_gamma_functional_equation(ctx50):
    # Gamma(z+1) = z Gamma(z) at seeded random points
    rng = random.Random(20210)
    with ctx50.workprec():
        for _ in range(25):
            z = mpf(rng.uniform(0.05, 10.0))
            lhs = mpf(gamma(z + 1, ctx50))
            rhs = z * mpf(gamma(z, ctx50))
            assert abs(lhs - rhs) < abs(rhs) * ctx50.eps() * 100


def test_gamma_domain():
    with pytest.raises(DomainError):
        gamma(0)
    with pytest.raises(DomainError):
        gamma(-1.5)


def test_euler_gamma_value(ctx50):
    assert format_real(euler_gamma(ctx50), 10).startswith("0.5772156649")


def test_format_real_deterministic():
    ctx = PrecisionContext(digits=30)
    with ctx.workprec():
        v = mpf(1) / 7
    assert format_real(v, 30) == format_real(v, 30)
    assert format_real(mpf(0), 10) == "0.0"


def test_default_digits_env_var():
    code = (
        "import mertens_dissect.numerics as n; print(n.DEFAULT_DIGITS)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/usr/local/bin", "MERTENS_DIGITS": "33"},
        capture_output=True,
        text=True,
    )
    assert out.stdout.strip() == "33"
