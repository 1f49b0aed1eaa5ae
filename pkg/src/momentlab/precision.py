"""Working-precision context and decimal-string interchange.

All numerics in the package read the active mpmath precision (``mp.prec``).
:func:`workprec` sets it for a block; the DP kernels mirror it into a gmpy2
context when they convert to native MPFR numbers.
"""

from contextlib import contextmanager
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mp

DEFAULT_BITS = 256
MIN_BITS = 64

mp.prec = DEFAULT_BITS


class PrecisionRangeError(ArithmeticError):
    """A value over- or underflowed the working precision context."""


@contextmanager
def workprec(bits):
    """Run a block with ``bits`` of binary precision."""
    bits = int(bits)
    if bits < MIN_BITS:
        raise ValueError(f"precision must be at least {MIN_BITS} bits, got {bits}")
    with mp.workprec(bits):
        yield bits


def bits():
    return mp.prec


def mpf(x):
    """Convert ints, Fractions, decimal strings and gmpy2 numbers to ``mp.mpf``."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, type(gmpy2.mpfr(0))):
        if not gmpy2.is_finite(x):
            raise PrecisionRangeError(f"non-finite value {x}")
        man, exp = x.as_mantissa_exp()
        return mpmath.mpf((int(man), int(exp)))
    if isinstance(x, type(gmpy2.mpq(0))):
        return mpmath.mpf(int(x.numerator)) / int(x.denominator)
    return mpmath.mpf(x)


def to_native(x):
    """Map an mpmath number to a gmpy2 ``mpfr`` carrying the same bits.

    Exact types (int, Fraction) pass through so that exact-arithmetic
    callers keep exactness.
    """
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, type(gmpy2.mpfr(0))):
        return x
    x = mpmath.mpf(x)
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp == 0:
        return gmpy2.mpfr(0)
    if not man:
        raise PrecisionRangeError(f"non-finite value {x}")
    val = gmpy2.mul_2exp(gmpy2.mpfr(gmpy2.mpz(man)), int(exp))
    return -val if sign else val


@contextmanager
def native_context():
    """gmpy2 context matching the active mpmath precision."""
    with gmpy2.context(gmpy2.get_context(), precision=mp.prec) as ctx:
        yield ctx


def dec(x, digits=None):
    """Serialize a number as a decimal string with enough digits to round-trip."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        x = mpf(x)
    x = mpf(x)
    if digits is None:
        digits = int(mp.prec * 0.30103) + 2
    return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=-4, max_fixed=12)


def parse_dec(s):
    return mpmath.mpf(s)
