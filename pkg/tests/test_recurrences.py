import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentlab.core import PolynomialRates, SymmetricJacobi, polynomial_bn, rates_to_jacobi
from momentlab.recurrences import (
    DomainError,
    ZeroSequences,
    asymptotic_constants,
    _c2_direct,
    delta_n,
    eval_polys,
    residual_check,
    tau_rho_from_deltas,
    zero_values_polynomial,
    zero_values_power,
    zero_values_symmetric,
)
from momentlab.sequences import Rule

P3 = PolynomialRates(3, (1, 2, 2), (0, 0, 1))
P4 = PolynomialRates(4, (1, 2, 2, 3), (-1, 0, 0, 1))
TIGHT = mpmath.mpf(10) ** -70


def rel(a, b):
    return abs(a - b) / abs(b)


def test_constant_beta_polys():
    s = SymmetricJacobi(Rule(lambda k: 1))
    P, Q = eval_polys(s, 0, 20)
    assert all(P[2 * n] == (-1) ** n and P[2 * n + 1] == 0 for n in range(10))
    z = zero_values_symmetric(s, 10)
    assert all(z.v(n) == 1 and z.u(n) == 1 for n in range(1, 11))


@pytest.mark.parametrize("pr", [P3, P4, PolynomialRates.default_symmetric(5)])
def test_symmetric_zeros_and_products(pr):
    s = polynomial_bn(pr)
    P, Q = eval_polys(s, 0, 40)
    assert all(P[2 * n + 1] == 0 and Q[2 * n] == 0 for n in range(20))
    z = zero_values_symmetric(s, 20)
    for n in range(1, 21):
        assert rel(z.v(n), P[2 * n] ** 2) < TIGHT
        assert rel(z.u(n), Q[2 * n - 1] ** 2) < TIGHT


def test_eval_polys_jacobi_vs_symmetric():
    # P_n of the Stieltjes problem at z equals the even symmetric polynomial at sqrt(z)
    j = rates_to_jacobi(P3.rates(), 12)
    s = polynomial_bn(P3)
    x = mpmath.mpf("0.37")
    Pj, _ = eval_polys(j, x, 10)
    Ps, _ = eval_polys(s, mpmath.sqrt(x), 20)
    assert all(rel(Pj[n], Ps[2 * n]) < mpmath.mpf(10) ** -60 for n in range(1, 11))


def test_exact_products_telescope():
    z = zero_values_symmetric(polynomial_bn(P3), 30, exact=True)
    sq = polynomial_bn(P3).beta.square
    for n in range(1, 31):
        assert isinstance(z.v(n), Fraction)
        # v_n u_n = 1 / beta_{2n-1}^2
        assert z.v(n) * z.u(n) == 1 / Fraction(sq(2 * n - 1))


def test_power_case():
    z = zero_values_power(1, 5)
    assert abs(z.v(1) - mpmath.mpf(1) / 4) < TIGHT
    z = zero_values_power(mpmath.mpf("1.5"), 30)
    for n in (1, 7, 30):
        closed = (mpmath.factorial(2 * n) / (4**n * mpmath.factorial(n) ** 2)) ** 3
        assert rel(z.v(n), closed) < mpmath.mpf(10) ** -60
    # the closed forms take over beyond the table
    assert rel(z.v(400) * (mpmath.pi * 400) ** mpmath.mpf("1.5"), 1) < mpmath.mpf("1e-3")


def test_delta_examples():
    for n in (1, 5, 100):
        assert delta_n(0, n) == 0
        assert abs(delta_n(1, n) - 1) < TIGHT
    assert abs(delta_n("0.5", 1000) - mpmath.mpf("0.375")) < mpmath.mpf("2e-3")
    with pytest.raises(DomainError):
        delta_n(-1, 3)
    with pytest.raises(DomainError):
        delta_n(0.5, 0)


def test_delta_bounded_grid():
    xs = [mpmath.mpf(k) / 8 for k in range(-7, 9)]
    for n in (1, 2, 10, 100, 1000, 10000):
        # delta_n(1) = 1 exactly; allow working-precision rounding
        assert all(abs(delta_n(x, n)) <= 1 + mpmath.mpf(10) ** -60 for x in xs)


def test_delta_nonnegative_grid():
    for N in (1, 2, 4):
        xs = [mpmath.mpf(k) * N / 10 for k in range(11)]
        vals = [delta_n(x, n) for x in xs for n in (1, 3, 30, 300, 3000)]
        assert min(vals) >= 0
        # n = 1 gives Gamma(x+2) - 1, the largest value on the grid
        assert max(vals) <= mpmath.gamma(N + 2)


def test_product_asymptotic_grid():
    for x in ("0.3", "1", "1.7", "3"):
        x = mpmath.mpf(x)
        for n in (10, 100, 1000):
            prod = mpmath.fprod(1 + x / k for k in range(1, n + 1))
            assert abs(prod * mpmath.gamma(x + 1) / mpmath.mpf(n) ** x - 1) <= 10 / mpmath.mpf(n)


@pytest.mark.parametrize("pr", [P3, P4, PolynomialRates.default_symmetric(6), PolynomialRates(5, (1, 2, 3, 3, 4), (0, 0, 1, 1, 2))])
def test_asymptotic_constants(pr):
    k = asymptotic_constants(pr)
    assert rel(k["c1"] * k["c2"], mpmath.mpf(pr.p) ** -pr.p) < TIGHT
    assert rel(k["c2"], _c2_direct(pr)) < TIGHT
    assert rel(2 / (1 / k["alpha"] + 1 / k["beta"]), mpmath.mpf(2) / pr.p) < TIGHT
    assert 0 < k["alpha"] < 1 and 0 < k["beta"] < 1


def test_default_c1():
    for p in (3, 4, 7):
        k = asymptotic_constants(PolynomialRates.default_symmetric(p))
        assert rel(k["c1"], mpmath.pi ** (-mpmath.mpf(p) / 2)) < TIGHT


@pytest.mark.parametrize("pr", [P3, P4])
def test_closed_forms_match_products(pr):
    z = zero_values_polynomial(pr, 60)
    ex = zero_values_polynomial(pr, 60, exact=True)
    u_rule, v_rule = z.u.rule, z.v.rule
    for n in (1, 2, 10, 60):
        assert rel(u_rule(n), z.u(n)) < mpmath.mpf(10) ** -60
        assert rel(v_rule(n), z.v(n)) < mpmath.mpf(10) ** -60
        assert rel(mpmath.mpf(ex.v(n).numerator) / ex.v(n).denominator, z.v(n)) < TIGHT


def test_residuals():
    pr = PolynomialRates.default_symmetric(4)
    r = residual_check(zero_values_polynomial(pr, 2000))
    assert r["max_n_tau"] < 2 and r["max_n_rho"] < 2
    z = zero_values_power(1, 500)
    assert abs(z.v(500) * mpmath.pi * 500 - 1) < mpmath.mpf(1) / 500


@pytest.mark.parametrize("pr", [P3, P4])
def test_residual_at_one_matches_delta_products(pr):
    r = residual_check(zero_values_polynomial(pr, 10), n_max=5)
    for n in range(1, 6):
        tau, rho = tau_rho_from_deltas(pr, n)
        assert abs(r["tau"][n - 1] - tau) < mpmath.mpf(10) ** -60
        assert abs(r["rho"][n - 1] - rho) < mpmath.mpf(10) ** -60


def test_summability_matches_verdict():
    def tail_share(pr, n):
        z = zero_values_symmetric(polynomial_bn(pr), n)
        terms = [z.u(k) + z.v(k) for k in range(1, n + 1)]
        return mpmath.fsum(terms[n // 2:]) / mpmath.fsum(terms)

    # indeterminate: the second half contributes little; boundary (p=2): it keeps growing
    assert tail_share(P3, 4000) < mpmath.mpf("0.02")
    assert tail_share(PolynomialRates(2, (1, 1), (0, 0)), 4000) > mpmath.mpf("0.05")


def test_zero_sequences_json():
    z = zero_values_polynomial(P3, 8)
    rec = json.loads(json.dumps(z.to_json()))
    assert rec["meta"]["n_max"] == 8 and rec["meta"]["source"] == "polynomial_rates"
    z2 = ZeroSequences.from_json(rec)
    assert all(rel(z2.v(n), z.v(n)) < TIGHT for n in range(1, 9))
    assert rel(z2.c1, z.c1) < TIGHT
    with pytest.raises(ValueError):
        ZeroSequences.from_json({"kind": "other"})


@given(st.lists(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=9), min_size=16, max_size=16))
@settings(max_examples=30, deadline=None)
def test_products_match_polys(betas):
    from momentlab.sequences import Tabulated

    s = SymmetricJacobi(Tabulated(betas))
    P, Q = eval_polys(s, 0, 16)
    z = zero_values_symmetric(s, 8)
    for n in range(1, 9):
        assert rel(z.v(n), P[2 * n] ** 2) < mpmath.mpf(10) ** -65
        assert rel(z.u(n), Q[2 * n - 1] ** 2) < mpmath.mpf(10) ** -65
