import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentlab.core import PolynomialRates, polynomial_bn
from momentlab.growth import (
    CoefficientSeries,
    InsufficientDataError,
    calibration_series,
    canonical_product_series,
    canonical_type_reference,
    estimate,
    exp_series_coefficients,
    exponent_of_convergence,
    indicator_estimate,
    log_canonical_product,
    max_modulus,
    order_estimate,
    type_estimate,
    type_values,
)


def close(x, y, tol):
    return abs(mpmath.mpf(x) / y - 1) <= tol


@pytest.fixture(scope="module")
def expo():
    return exp_series_coefficients(200)


def test_exp(expo):
    e = estimate(expo, rho=1)
    assert close(e.rho_hat, 1, 0.01)
    assert close(e.tau_hat, 1, 0.02)
    # the raw ratio approaches from above, slowly
    assert e.rho_raw > e.rho_hat and e.tau_raw > 0


@pytest.mark.parametrize("kappa", [1, "1.5", 2, 3])
def test_calibration(kappa):
    kappa = mpmath.mpf(kappa)
    s = calibration_series(kappa, 300)
    e = estimate(s, rho=1 / kappa)
    assert abs(e.rho_hat * kappa - 1) <= 0.02
    assert abs(e.tau_hat / (2 * kappa) - 1) <= 0.05


def test_affine_basis_also_within_tolerance():
    s = calibration_series(2, 300)
    t = type_estimate(s, mpmath.mpf(1) / 2, basis="affine")
    assert close(t.tau_hat, 4, 0.05)
    with pytest.raises(ValueError):
        type_estimate(s, 0.5, basis="cubic")
    with pytest.raises(ValueError):
        type_estimate(s, 0)


def test_canonical_product_type():
    s = canonical_product_series(mpmath.mpf(1) / 2, 160)
    assert all(c > 0 for _, c in s.terms)
    t = type_estimate(s, mpmath.mpf(1) / 2)
    assert close(t.tau_hat, mpmath.pi, 0.01)
    # coefficients agree with the product evaluated directly
    x = mpmath.mpf(3)
    assert close(s(x), mpmath.exp(log_canonical_product(x, 2)), mpmath.mpf(10) ** -40)


def test_canonical_reference():
    assert canonical_type_reference(mpmath.mpf(1) / 2) == mpmath.pi
    assert close(canonical_type_reference(mpmath.mpf(1) / 3), 2 * mpmath.pi / mpmath.sqrt(3), mpmath.mpf(10) ** -70)
    for bad in (0, 1, -0.2, 1.5):
        with pytest.raises(ValueError):
            canonical_type_reference(bad)


def test_insufficient_data():
    s = CoefficientSeries.from_coefficients([1 / mpmath.factorial(m) for m in range(15)])
    with pytest.raises(InsufficientDataError):
        order_estimate(s)


@given(st.floats(min_value=0.1, max_value=20), st.sampled_from([1, 2, 3]))
@settings(max_examples=25, deadline=None)
def test_scaling_covariance(lam, kappa):
    lam = mpmath.mpf(lam)
    s = calibration_series(kappa, 60)
    rho = mpmath.mpf(1) / kappa
    a, b = estimate(s, rho=rho), estimate(s.scaled(lam), rho=rho)
    assert close(b.rho_hat, a.rho_hat, mpmath.mpf(10) ** -40)
    assert close(b.tau_hat, a.tau_hat * lam**rho, mpmath.mpf(10) ** -40)
    for (m, t1), (_, t2) in zip(type_values(s, rho), type_values(s.scaled(lam), rho)):
        assert close(t2, t1 * lam**rho, mpmath.mpf(10) ** -60)


def test_max_modulus(expo):
    M, last = max_modulus(expo, 1)
    assert close(M, mpmath.e, mpmath.mpf(10) ** -60) and last < mpmath.mpf(10) ** -300
    s = calibration_series("1.5", 120)
    rs = [mpmath.mpf(2) ** (k / 2) for k in range(0, 30)]
    logs = [mpmath.log(max_modulus(s, r)[0]) for r in rs]
    assert all(b > a for a, b in zip(logs, logs[1:]))
    # log-convex in log r on an equally spaced grid
    assert all(logs[i - 1] + logs[i + 1] - 2 * logs[i] >= 0 for i in range(1, len(logs) - 1))


def test_indicator_exp(expo):
    thetas = [mpmath.pi * k / 8 for k in range(0, 9)]
    out = indicator_estimate(expo, 1, thetas, [5, 10, 20, 40])
    for row in out:
        assert row["stable"]
        assert abs(row["h"] - mpmath.cos(row["theta"])) <= 0.01


def test_indicator_unstable_flag(expo):
    # at r = 300 the 200-term series no longer represents exp
    out = indicator_estimate(expo, 1, [mpmath.pi], [300])
    assert not out[0]["stable"] and out[0]["h"] is None


def test_exponent_of_convergence():
    r = exponent_of_convergence(lambda n: (n + 1) ** 2, 1, 4000)
    assert abs(r["E"] - mpmath.mpf(1) / 2) < 0.01 and not r["low_confidence"]
    r = exponent_of_convergence(lambda n: n * mpmath.log(n) ** 2, 1, 4000)
    assert abs(r["E"] - 1) < 0.01
    for p in (3, 4, 6):
        beta = polynomial_bn(PolynomialRates.default_symmetric(p)).beta
        r = exponent_of_convergence(beta, 1, 3000)
        assert abs(r["E"] - mpmath.mpf(2) / p) < 0.01
    r = exponent_of_convergence(polynomial_bn(PolynomialRates(3, (1, 2, 2), (0, 0, 1))).beta, 1, 3000)
    assert abs(r["E"] - mpmath.mpf(2) / 3) < 0.01


def test_oscillating_sequence_is_flagged():
    for f in (lambda n: n**2 * (2 + mpmath.sin(n / mpmath.mpf(300))), lambda n: n ** (2 + mpmath.sin(4 * mpmath.log(n)) / 2)):
        assert exponent_of_convergence(f, 1, 4000)["low_confidence"]
    with pytest.raises(ValueError):
        exponent_of_convergence(lambda n: mpmath.mpf(1) / n, 1, 400)


def test_series_json_round_trip():
    s = calibration_series(2, 30)
    rec = json.loads(s.dumps())
    assert rec["terms"][1][0] == 2 and isinstance(rec["terms"][1][1], str)
    s2 = CoefficientSeries.from_json(rec)
    assert all(m1 == m2 and close(c2, c1, mpmath.mpf(10) ** -70) for (m1, c1), (m2, c2) in zip(s.terms, s2.terms))
    with pytest.raises(ValueError):
        CoefficientSeries.from_json({"name": "x"})
    with pytest.raises(ValueError):
        CoefficientSeries([(2, 1), (1, 1)])
    with pytest.raises(ValueError):
        CoefficientSeries([(1, mpmath.inf)])


def test_estimate_json(expo):
    rec = estimate(expo, rho=1).to_json()
    assert set(rec) >= {"rho_hat", "tau_hat", "rho_diag", "tau_diag", "window"}
    json.dumps(rec)
