from fractions import Fraction

import pytest
from mpmath import mp, mpf

from mertens_dissect import dissection as di
from mertens_dissect import uniform as un
from mertens_dissect.errors import DomainError, NearPoleError
from mertens_dissect.numerics import PrecisionContext


def test_eta_special_values(ctx50):
    with ctx50.workprec():
        assert mpf(un.eta_fn(0, ctx50).value) == 1
        # eta(1) = e^gamma
        dev = abs(mpf(un.eta_fn(1, ctx50).value) - mp.e**mp.euler)
        assert dev < ctx50.eps() * 10


def test_nu_special_values(ctx50):
    with ctx50.workprec():
        assert abs(mpf(un.nu(0, ctx50).value) - 1) < ctx50.eps() * 10
        assert abs(mpf(un.nu(1, ctx50).value) - 1) < ctx50.eps() * 10


def test_lambda_special_value(ctx50):
    with ctx50.workprec():
        assert abs(mpf(un.lambda_fn(1, ctx50).value) - 1) < ctx50.eps() * 10


def test_lambda_matches_direct_product(ctx30, table_1e6):
    # slow oracle: truncated direct product over many primes
    z = mpf("0.6")
    val = mpf(un.lambda_fn(z, ctx30).value)
    with ctx30.workprec(10):
        acc = mpf(1)
        for p in table_1e6.primes_up_to(200000).tolist():
            acc *= (1 + z / (p - 1)) * (1 - mpf(1) / p) ** z
        acc /= mp.gamma(z + 1)
        # the truncated product's log tail is O(1/(P log P))
        assert abs(val - acc) < mpf("1e-5")


def test_eta_gamma_nu_identity(ctx50):
    with ctx50.workprec():
        for i in range(8):
            r = mpf("0.27") * i  # spans [0, 1.89]
            lhs = mpf(un.eta_fn(r, ctx50).value)
            rhs = mp.e ** (r * mp.euler) * mp.gamma(r + 1) * mpf(un.nu(r, ctx50).value)
            assert abs(lhs - rhs) < mpf(10) ** -40


def test_analytic_factor_domain():
    with pytest.raises(DomainError):
        un.eta_fn(2.0)
    with pytest.raises(DomainError):
        un.nu(-0.1)


def test_f_x_matches_rational_product(table_1e4, ctx30):
    # f_x(z) = prod_{p<=x} (1 - z/p)^{-1} at rational z via Fractions
    z = Fraction(1, 3)
    x = 100
    ref = Fraction(1)
    for p in table_1e4.primes_up_to(x).tolist():
        ref /= 1 - Fraction(z, p)
    with ctx30.workprec():
        got = un.f_x(mpf(1) / 3, x, table_1e4, ctx30)
        refv = mpf(ref.numerator) / ref.denominator
        assert abs(mpf(got) - refv) < abs(refv) * ctx30.eps() * 100


def test_f_x_zero_and_pole(table_1e4, ctx30):
    with ctx30.workprec():
        assert mpf(un.f_x(0, 10, table_1e4, ctx30)) == 1
    with pytest.raises(NearPoleError):
        un.f_x(2, 100, table_1e4, ctx30)


def test_contour_spec_validation():
    with pytest.raises(DomainError):
        un.ContourSpec(k=2, x=10, radius=2.5, nodes=64)
    with pytest.raises(DomainError):
        un.ContourSpec(k=2, x=10, radius=0.5, nodes=4)


def test_contour_matches_brute(table_1e4, ctx30):
    res = un.contour_extract_auto(3, 30, table_1e4, ctx30, radius=0.5)
    brute = di.smooth_sum_brute(3, 30, table_1e4).value
    with ctx30.workprec():
        ref = mpf(brute.numerator) / brute.denominator
        assert abs(mpf(res.value) - ref) < mpf(10) ** (-(ctx30.digits - 3))
        assert mpf(res.imag_residual) < mpf(10) ** (-(ctx30.digits - 3))


def test_contour_radius_invariance(table_1e4, ctx30):
    vals = []
    for r in (0.5, 1.0, 1.5):
        vals.append(mpf(un.contour_extract_auto(2, 10, table_1e4, ctx30, radius=r).value))
    with ctx30.workprec():
        assert max(vals) - min(vals) < mpf(10) ** -10


def test_uniform_estimate_tracks_smooth_sum(table_1e6, ctx30):
    # ratio estimate/exact tends to 1; at x = 10^6 it should be within 25%
    est = un.uniform_estimate(2, 10**6, ctx30)
    exact = di.smooth_sum_newton(2, 10**6, 1, table_1e6, ctx30).value
    with ctx30.workprec():
        ratio = mpf(est) / mpf(exact)
        assert mpf("0.75") < ratio < mpf("1.25")


def test_sathe_selberg_estimate(tables_1e5, ctx30):
    res = un.sathe_selberg_estimate(2, 10**5, tables_1e5, ctx30)
    with ctx30.workprec():
        assert mpf("0.75") < mpf(res.ratio) < mpf("1.25")
        assert mpf(res.r) > 0


def test_uniform_domain():
    with pytest.raises(DomainError):
        un.uniform_estimate(2, 10)  # x too small for r < 2 - epsilon
