"""Index sequences: tabulated values or closed-form rules.

A rule knows its value at any index and, when it has one, its large-index
expansion (an :class:`~momentlab.special.AsymSeries`). The multi-zeta engine
uses the expansion to complete sums beyond the tabulated range.
"""

from fractions import Fraction

import mpmath

from .precision import mpf
from .special import AsymSeries, exp_series, gamma_ratio_log_expansion


class Sequence:
    """Base class; subclasses implement :meth:`value`."""

    #: first valid index
    start = 0
    #: last valid index, or ``None`` when unbounded
    horizon = None

    def value(self, k):
        raise NotImplementedError

    def __call__(self, k):
        if k < self.start or (self.horizon is not None and k > self.horizon):
            raise IndexError(f"index {k} outside [{self.start}, {self.horizon}]")
        return self.value(k)

    def values(self, lo, hi):
        """Values for ``lo <= k <= hi`` as a list."""
        return [self(k) for k in range(lo, hi + 1)]

    def expansion(self, order):
        """Large-``k`` expansion, or ``None``."""
        return None

    def extends_to(self, k):
        return self.horizon is None or k <= self.horizon


class Tabulated(Sequence):
    """Explicit values ``data[i]`` at index ``start + i``."""

    def __init__(self, data, start=0):
        self.data = list(data)
        self.start = start
        self.horizon = start + len(self.data) - 1

    def value(self, k):
        return self.data[k - self.start]

    def values(self, lo, hi):
        if lo < self.start or hi > self.horizon:
            raise IndexError(f"range [{lo}, {hi}] outside [{self.start}, {self.horizon}]")
        return self.data[lo - self.start : hi - self.start + 1]

    def __repr__(self):
        return f"Tabulated(len={len(self.data)}, start={self.start})"


class Rule(Sequence):
    """Closed-form rule ``fn(k)`` with an optional expansion factory."""

    def __init__(self, fn, start=0, expansion=None, name="rule"):
        self.fn = fn
        self.start = start
        self._expansion = expansion
        self.name = name

    def value(self, k):
        return self.fn(k)

    def expansion(self, order):
        return None if self._expansion is None else self._expansion(order)

    def __repr__(self):
        return f"Rule({self.name})"


class PowerWeight(Sequence):
    """``scale * k**-exponent`` for ``k >= 1``."""

    start = 1

    def __init__(self, exponent, scale=1):
        self.exponent = mpf(exponent)
        self.scale = scale

    def value(self, k):
        return mpf(self.scale) * mpmath.mpf(k) ** (-self.exponent)

    def values(self, lo, hi):
        s = -self.exponent
        c = mpf(self.scale)
        if s == int(s) and c == 1:
            e = int(s)
            return [mpmath.mpf(k) ** e for k in range(lo, hi + 1)]
        return [c * mpmath.mpf(k) ** s for k in range(lo, hi + 1)]

    def expansion(self, order):
        return AsymSeries(self.exponent, [mpf(self.scale)] + [0] * order)

    def __repr__(self):
        return f"PowerWeight({mpmath.nstr(self.exponent, 10)})"


class GammaRatioWeight(Sequence):
    """``scale * (prod Gamma(k + a) / prod Gamma(k + b)) ** power``.

    Values over a range come from one log-Gamma evaluation at the left end
    followed by the exact rational step ``prod (k + a) / prod (k + b)``.
    """

    start = 1

    def __init__(self, num, den, scale=1, power=1):
        self.num = tuple(num)
        self.den = tuple(den)
        self.scale = scale
        self.power = power
        for s in self.num + self.den:
            if s + self.start <= 0:
                raise ValueError("gamma arguments must stay positive on the index range")

    def _ratio(self, k):
        k = mpmath.mpf(k)
        lg = mpmath.fsum(mpmath.loggamma(k + mpf(a)) for a in self.num)
        lg -= mpmath.fsum(mpmath.loggamma(k + mpf(b)) for b in self.den)
        return mpmath.exp(lg)

    def _finish(self, r):
        if self.power != 1:
            r = r ** mpf(self.power)
        return mpf(self.scale) * r

    def value(self, k):
        return self._finish(self._ratio(k))

    def values(self, lo, hi):
        r = self._ratio(lo)
        num = [mpf(a) for a in self.num]
        den = [mpf(b) for b in self.den]
        out = []
        for k in range(lo, hi + 1):
            out.append(self._finish(r))
            step = mpmath.mpf(1)
            for a in num:
                step *= k + a
            for b in den:
                step /= k + b
            r *= step
        return out

    def exponent(self):
        """Decay exponent ``s`` with ``w(k) ~ scale * k**-s``."""
        return -mpf(self.power) * (
            mpmath.fsum(mpf(a) for a in self.num) - mpmath.fsum(mpf(b) for b in self.den)
        )

    def expansion(self, order):
        logs = gamma_ratio_log_expansion(
            [mpf(a) for a in self.num], [mpf(b) for b in self.den], order
        )
        p = mpf(self.power)
        coeffs = exp_series([p * c for c in logs])
        return AsymSeries(self.exponent(), coeffs).scale(mpf(self.scale))

    def __repr__(self):
        return f"GammaRatioWeight(num={self.num}, den={self.den}, power={self.power})"


def as_sequence(x, start=0):
    """Coerce a list, callable or :class:`Sequence` to a :class:`Sequence`."""
    if isinstance(x, Sequence):
        return x
    if callable(x):
        return Rule(x, start=start)
    return Tabulated(x, start=start)
