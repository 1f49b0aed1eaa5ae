"""Special functions at the working precision.

Gamma, log-Gamma and Beta come from mpmath. The Riemann zeta function and
the power-sum tails are evaluated here by Euler-Maclaurin summation, which is
also the machinery behind :class:`AsymSeries`, the large-``x`` expansions the
multi-zeta engine uses to complete its truncated sums.
"""

import mpmath
from mpmath import mp


def gamma(x):
    return mpmath.gamma(x)


def loggamma(x):
    return mpmath.loggamma(x)


def beta(x, y):
    return mpmath.beta(x, y)


def _eps():
    return mpmath.mpf(2) ** (-mp.prec)


def power_tail(s, x, terms=None):
    """``sum_{k >= x} k**-s`` for real ``s > 1`` and integer ``x >= 1``.

    Direct summation up to a cutoff ``N`` tied to the precision, then the
    Euler-Maclaurin tail at ``N``.
    """
    s = mpmath.mpf(s)
    if s <= 1:
        raise ValueError(f"power sum diverges for s={s}")
    x = int(x)
    if x < 1:
        raise ValueError("power_tail needs x >= 1")
    N = max(x, int(mp.prec // 4) + 16)
    head = mpmath.fsum(mpmath.mpf(k) ** (-s) for k in range(x, N))
    return head + _em_tail(s, N, terms)


def _em_tail(s, N, terms=None):
    # sum_{k>=N} k^-s = N^(1-s)/(s-1) + N^-s/2 + sum_j B_2j/(2j)! (s)_(2j-1) N^(-s-2j+1)
    N = mpmath.mpf(N)
    total = N ** (1 - s) / (s - 1) + N ** (-s) / 2
    eps = _eps() * abs(total)
    max_j = terms if terms is not None else mp.prec
    rising = s  # (s)_1
    Npow = N ** (-s - 1)
    for j in range(1, max_j + 1):
        term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * Npow
        total += term
        if terms is None and abs(term) < eps:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        Npow /= N * N
    return total


def zeta(s):
    """Riemann zeta at real ``s > 1`` by Euler-Maclaurin summation."""
    return power_tail(s, 1)


def rising(x, n):
    out = mpmath.mpf(1)
    for i in range(n):
        out *= x + i
    return out


def exp_series(logc):
    """Coefficients of ``exp(L(t))`` where ``L(t) = sum_{m>=1} logc[m] t**m``.

    ``logc[0]`` is ignored; the result has the same length with leading 1.
    """
    M = len(logc)
    out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (M - 1)
    for m in range(1, M):
        acc = mpmath.mpf(0)
        for k in range(1, m + 1):
            acc += k * logc[k] * out[m - k]
        out[m] = acc / m
    return out


def gamma_ratio_log_expansion(num, den, order):
    """Expansion of ``log(prod Gamma(z+a)/prod Gamma(z+b)) - (sum a - sum b) log z``.

    Returns ``[0, l_1, ..., l_order]`` with the series ``sum l_m z**-m``,
    from the Bernoulli-polynomial form of the Stirling series.
    """
    out = [mpmath.mpf(0)] * (order + 1)
    for m in range(1, order + 1):
        acc = mpmath.mpf(0)
        for a in num:
            acc += mpmath.bernpoly(m + 1, a)
        for b in den:
            acc -= mpmath.bernpoly(m + 1, b)
        out[m] = (-1) ** (m + 1) * acc / (m * (m + 1))
    return out


class AsymSeries:
    """Asymptotic expansion ``sum_m coeffs[m] * x**-(base + m)`` for large ``x``.

    Every instance carries the same number of orders; higher orders are
    discarded on multiplication.
    """

    __slots__ = ("base", "coeffs")

    def __init__(self, base, coeffs):
        self.base = mpmath.mpf(base)
        self.coeffs = [mpmath.mpf(c) for c in coeffs]

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order):
        return cls(0, [1] + [0] * order)

    def __repr__(self):
        return f"AsymSeries(base={mpmath.nstr(self.base, 8)}, c0={mpmath.nstr(self.coeffs[0], 8)})"

    def __call__(self, x):
        x = mpmath.mpf(x)
        inv = 1 / x
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * inv + c
        return acc * x ** (-self.base)

    def scale(self, c):
        return AsymSeries(self.base, [c * a for a in self.coeffs])

    def __mul__(self, other):
        M = min(self.order, other.order)
        out = [mpmath.mpf(0)] * (M + 1)
        for i in range(M + 1):
            ai = self.coeffs[i]
            if not ai:
                continue
            for j in range(M + 1 - i):
                out[i + j] += ai * other.coeffs[j]
        return AsymSeries(self.base + other.base, out)

    def __sub__(self, other):
        shift = other.base - self.base
        k = int(mpmath.nint(shift))
        if abs(shift - k) > mpmath.mpf(2) ** (-mp.prec // 2) or k < 0:
            raise ValueError("series bases must differ by a nonnegative integer")
        out = list(self.coeffs)
        for m, c in enumerate(other.coeffs):
            if m + k <= self.order:
                out[m + k] -= c
        return AsymSeries(self.base, out)

    def times_x(self):
        """Multiply by ``x``."""
        return AsymSeries(self.base - 1, self.coeffs)

    def shifted(self, delta=1):
        """Expansion of ``f(x + delta)`` in powers of ``1/x``."""
        if delta == 0:
            return self
        M = self.order
        out = [mpmath.mpf(0)] * (M + 1)
        delta = mpmath.mpf(delta)
        for m, c in enumerate(self.coeffs):
            if not c:
                continue
            s = self.base + m
            b = mpmath.mpf(1)
            dpow = mpmath.mpf(1)
            for r in range(M + 1 - m):
                out[m + r] += c * b * dpow
                b = b * (-s - r) / (r + 1)
                dpow *= delta
        return AsymSeries(self.base, out)

    def tail_sum(self):
        """Expansion of ``F(x) = sum_{k >= x} f(k)`` (Euler-Maclaurin term by term)."""
        if self.base <= 1:
            raise ValueError(f"tail sum diverges (exponent {self.base})")
        M = self.order
        out = [mpmath.mpf(0)] * (M + 1)
        for m, c in enumerate(self.coeffs):
            if not c:
                continue
            s = self.base + m
            # x^(1-s)/(s-1) sits at offset m relative to base-1
            out[m] += c / (s - 1)
            if m + 1 <= M:
                out[m + 1] += c / 2
            j = 1
            while m + 2 * j <= M:
                out[m + 2 * j] += c * mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising(s, 2 * j - 1)
                j += 1
        return AsymSeries(self.base - 1, out)
