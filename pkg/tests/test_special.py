import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentlab.precision import PrecisionRangeError, dec, mpf, native_context, parse_dec, to_native, workprec
from momentlab.sequences import GammaRatioWeight, PowerWeight
from momentlab.special import AsymSeries, power_tail, zeta


@pytest.mark.parametrize("s", ["1.5", "2", "3", "4.25", "7", "40"])
def test_zeta_against_mpmath(s):
    assert abs(zeta(mpf(s)) / mpmath.zeta(mpf(s)) - 1) < mpmath.mpf(10) ** -70


def test_zeta_closed_forms():
    assert abs(zeta(2) - mpmath.pi**2 / 6) < mpmath.mpf(10) ** -70
    assert abs(zeta(4) - mpmath.pi**4 / 90) < mpmath.mpf(10) ** -70


def test_power_tail_direct():
    direct = mpmath.fsum(mpmath.mpf(k) ** -3 for k in range(5, 20000))
    rest = power_tail(3, 20000)
    assert abs(power_tail(3, 5) - direct - rest) < mpmath.mpf(10) ** -70
    with pytest.raises(ValueError):
        power_tail(1, 1)


def test_asym_tail_sum_power():
    f = AsymSeries(3, [1] + [0] * 12)
    F = f.tail_sum()
    x = 1000
    assert abs(F(x) / power_tail(3, x) - 1) < mpmath.mpf(10) ** -40


def test_asym_shift_and_times_x():
    f = AsymSeries(mpf("2.5"), [1, mpf("0.3"), mpf("-0.2")] + [0] * 10)
    g = f.shifted(1)
    x = mpmath.mpf(500)
    assert abs(g(x) / f(x + 1) - 1) < mpmath.mpf(10) ** -30
    assert abs(f.times_x()(x) - x * f(x)) < mpmath.mpf(10) ** -60
    with pytest.raises(ValueError):
        AsymSeries(1, [1]).tail_sum()


def test_gamma_ratio_expansion():
    w = GammaRatioWeight([mpf(1) / 3, mpf(2) / 3], [1, mpf(1) / 3], scale=mpf("0.7"))
    e = w.expansion(12)
    for k in (200, 1000):
        assert abs(e(k) / w(k) - 1) < mpmath.mpf(10) ** -25


def test_gamma_ratio_values_consistent():
    w = GammaRatioWeight([mpf(1) / 2], [1], power=3)
    vals = w.values(5, 40)
    assert all(abs(v / w(k) - 1) < mpmath.mpf(10) ** -70 for k, v in zip(range(5, 41), vals))


def test_power_weight_expansion_is_exact():
    w = PowerWeight(mpf("1.7"))
    assert w.expansion(4)(123) == w(123)


def test_workprec_guard():
    with pytest.raises(ValueError):
        with workprec(32):
            pass
    with workprec(512):
        assert mpmath.mp.prec == 512
    assert mpmath.mp.prec == 256


@given(st.floats(min_value=-1e30, max_value=1e30, allow_nan=False))
@settings(max_examples=50)
def test_decimal_round_trip(x):
    y = mpf(x)
    assert parse_dec(dec(y)) == y


def test_native_conversion():
    import gmpy2

    x = mpmath.mpf(1) / 3
    with native_context():
        y = to_native(x)
        assert mpf(y) == x
        assert isinstance(y, type(gmpy2.mpfr(1)))
        assert mpf(y * 3) == mpf(x * 3)


def test_precision_range_error_is_arithmetic():
    assert issubclass(PrecisionRangeError, ArithmeticError)
