"""Problem data and the exact transforms between its representations.

Birth-death rates (lambda_n, mu_n) give Stieltjes Jacobi parameters via
``a_n = lambda_n + mu_n`` and ``b_n = sqrt(lambda_n mu_{n+1})``; a Stieltjes
problem corresponds to a symmetric Hamburger problem with coefficients
``beta`` through ``a_n = beta_{2n}^2 + beta_{2n-1}^2``,
``b_n = beta_{2n} beta_{2n+1}``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .precision import dec, mpf
from .sequences import Rule, Sequence, Tabulated, as_sequence


class InvalidRatesError(ValueError):
    pass


class NotStieltjesError(ValueError):
    """The chain-sequence split produced a nonpositive ``beta_{2n}^2``."""


class InvalidScaleError(ValueError):
    pass


def to_fraction(x):
    """Exact rational for ints, Fractions, floats and decimal or ``n/d`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(str(x)) if isinstance(x, float) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fraction_str(q):
    """Decimal string when ``q`` terminates in base 10, else ``"n/d"``."""
    q = Fraction(q)
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    n, den = abs(q.numerator), q.denominator
    k = 0
    while (10**k) % den:
        k += 1
    s = str(n * (10**k) // den).rjust(k + 1, "0")
    out = s[:-k] + "." + s[-k:]
    return ("-" if q < 0 else "") + out


@dataclass(frozen=True)
class BirthDeathRates:
    """Birth rates ``lam[n]`` and death rates ``mu[n]`` for ``n >= 0`` (``mu[0] = 0``)."""

    lam: Sequence
    mu: Sequence

    def __post_init__(self):
        object.__setattr__(self, "lam", as_sequence(self.lam))
        object.__setattr__(self, "mu", as_sequence(self.mu))

    def check(self, n_max):
        if self.mu(0) != 0:
            raise InvalidRatesError("mu_0 must be 0")
        for n in range(n_max + 1):
            if not self.lam(n) > 0:
                raise InvalidRatesError(f"lambda_{n} = {self.lam(n)} is not positive")
            if not self.mu(n + 1) > 0:
                raise InvalidRatesError(f"mu_{n + 1} = {self.mu(n + 1)} is not positive")

    def to_json(self, n_max):
        return {
            "kind": "birth_death_rates",
            "lambda": [dec(self.lam(n)) for n in range(n_max + 1)],
            "mu": [dec(self.mu(n)) for n in range(n_max + 2)],
        }


@dataclass(frozen=True)
class PolynomialRates:
    """Rates ``lambda_n = prod(p n + e_j)``, ``mu_n = prod(p n + d_j)``.

    ``e`` and ``d`` are kept as exact rationals so the indeterminacy
    verdict and the rates themselves are exact.
    """

    p: int
    e: tuple
    d: tuple

    def __post_init__(self):
        e = tuple(sorted(to_fraction(x) for x in self.e))
        d = tuple(sorted(to_fraction(x) for x in self.d))
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "d", d)
        p = self.p
        if int(p) != p or p < 1:
            raise InvalidRatesError(f"degree p must be a positive integer, got {p}")
        object.__setattr__(self, "p", int(p))
        if len(e) != p or len(d) != p:
            raise InvalidRatesError(f"need {p} values of e and d, got {len(e)} and {len(d)}")
        if e[0] <= 0:
            raise InvalidRatesError("all e_j must be positive")
        if d[0] <= -p:
            raise InvalidRatesError(f"all d_j must exceed -p = {-p}")
        if 0 not in d:
            raise InvalidRatesError("some d_j must vanish (mu_0 = 0)")

    @classmethod
    def default_symmetric(cls, p):
        """The instance ``e_j = p/2``, ``d_j = 0``."""
        return cls(p, (Fraction(p, 2),) * p, (Fraction(0),) * p)

    @property
    def E(self):
        return sum(self.e, Fraction(0))

    @property
    def D(self):
        return sum(self.d, Fraction(0))

    def lam(self, n):
        out = Fraction(1)
        for ej in self.e:
            out *= self.p * n + ej
        return out

    def mu(self, n):
        out = Fraction(1)
        for dj in self.d:
            out *= self.p * n + dj
        return out

    def rates(self):
        return BirthDeathRates(Rule(self.lam, name="lambda"), Rule(self.mu, name="mu"))

    def to_json(self):
        return {
            "kind": "polynomial_rates",
            "p": self.p,
            "e": [fraction_str(x) for x in self.e],
            "d": [fraction_str(x) for x in self.d],
        }

    @classmethod
    def from_json(cls, rec):
        if rec.get("kind") != "polynomial_rates":
            raise ValueError(f"not a polynomial_rates record: {rec.get('kind')!r}")
        return cls(int(rec["p"]), tuple(rec["e"]), tuple(rec["d"]))


@dataclass
class JacobiParams:
    """Recurrence coefficients ``a_n`` (real) and ``b_n`` (positive).

    ``n_max`` is the tabulation horizon; a closed-form rule may reach beyond it.
    """

    a: Sequence
    b: Sequence
    n_max: Optional[int] = None

    def __post_init__(self):
        self.a = as_sequence(self.a)
        self.b = as_sequence(self.b)
        if self.n_max is None:
            hs = [h for h in (self.a.horizon, self.b.horizon) if h is not None]
            self.n_max = min(hs) if hs else None

    def table(self, n_max):
        return [self.a(n) for n in range(n_max + 1)], [self.b(n) for n in range(n_max + 1)]

    def to_json(self, n_max=None):
        n_max = self.n_max if n_max is None else n_max
        a, b = self.table(n_max)
        return {"kind": "jacobi", "a": [dec(x) for x in a], "b": [dec(x) for x in b]}

    @classmethod
    def from_json(cls, rec):
        if rec.get("kind") != "jacobi":
            raise ValueError(f"not a jacobi record: {rec.get('kind')!r}")
        a = [mpmath.mpf(x) for x in rec["a"]]
        b = [mpmath.mpf(x) for x in rec["b"]]
        return cls(Tabulated(a), Tabulated(b))


@dataclass
class SymmetricJacobi:
    """Coefficients ``beta_n > 0`` of ``z S_n = beta_n S_{n+1} + beta_{n-1} S_{n-1}``."""

    beta: Sequence
    n_max: Optional[int] = None

    def __post_init__(self):
        self.beta = as_sequence(self.beta)
        if self.n_max is None:
            self.n_max = self.beta.horizon

    def table(self, n_max):
        return [self.beta(n) for n in range(n_max + 1)]

    # uniform interface with JacobiParams for the polynomial evaluator
    def a(self, n):
        return 0

    def b(self, n):
        return self.beta(n)

    def to_json(self, n_max=None):
        n_max = self.n_max if n_max is None else n_max
        return {"kind": "symmetric_jacobi", "beta": [dec(x) for x in self.table(n_max)]}

    @classmethod
    def from_json(cls, rec):
        if rec.get("kind") != "symmetric_jacobi":
            raise ValueError(f"not a symmetric_jacobi record: {rec.get('kind')!r}")
        return cls(Tabulated([mpmath.mpf(x) for x in rec["beta"]]))


def rates_to_jacobi(r, n_max):
    """Stieltjes Jacobi parameters of a birth-death process, tabulated to ``n_max``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    r.check(n_max)
    a = [mpf(r.lam(n)) + mpf(r.mu(n)) for n in range(n_max + 1)]
    b = [mpmath.sqrt(mpf(r.lam(n)) * mpf(r.mu(n + 1))) for n in range(n_max + 1)]
    return JacobiParams(Tabulated(a), Tabulated(b), n_max)


def jacobi_to_symmetric(j, n_max):
    """Split Stieltjes ``(a_n, b_n)`` into symmetric ``beta``.

    Returns ``beta_0 .. beta_{2 n_max + 1}``; the last entry carries
    ``b_{n_max}`` so that :func:`symmetric_to_jacobi` inverts to ``n_max``.
    """
    beta = []
    for n in range(n_max + 1):
        a_n = mpf(j.a(n))
        if n == 0:
            sq = a_n
        else:
            sq = a_n - beta[2 * n - 1] ** 2
        if not sq > 0:
            raise NotStieltjesError(
                f"beta_{2 * n}^2 = {mpmath.nstr(sq, 10)} <= 0 at n={n}: not a Stieltjes problem"
            )
        beta.append(mpmath.sqrt(sq))
        beta.append(mpf(j.b(n)) / beta[2 * n])
    return SymmetricJacobi(Tabulated(beta), 2 * n_max + 1)


def symmetric_to_jacobi(s, n_max):
    """Inverse of :func:`jacobi_to_symmetric` (needs ``beta`` to ``2 n_max + 1``)."""
    a, b = [], []
    for n in range(n_max + 1):
        b2n = mpf(s.beta(2 * n))
        if n == 0:
            a.append(b2n**2)
        else:
            a.append(b2n**2 + mpf(s.beta(2 * n - 1)) ** 2)
        b.append(b2n * mpf(s.beta(2 * n + 1)))
    return JacobiParams(Tabulated(a), Tabulated(b), n_max)


def polynomial_bn(pr, n_max=None):
    """Symmetric coefficients of the polynomial-rate problem as a closed-form rule.

    ``beta_{2n} = sqrt(lambda_n)``, ``beta_{2n+1} = sqrt(mu_{n+1})``.
    """

    def beta(k):
        n, odd = divmod(k, 2)
        return mpmath.sqrt(mpf(pr.mu(n + 1) if odd else pr.lam(n)))

    def beta_sq(k):
        n, odd = divmod(k, 2)
        return pr.mu(n + 1) if odd else pr.lam(n)

    rule = Rule(beta, name=f"polynomial_bn(p={pr.p})")
    rule.square = beta_sq
    return SymmetricJacobi(rule, n_max)


def indeterminacy_check(pr):
    """Ratio ``(E - D)/p`` and the verdict of ``1 < ratio < p - 1``."""
    ratio = (pr.E - pr.D) / pr.p
    if 1 < ratio < pr.p - 1:
        verdict = "indeterminate"
    elif ratio == 1 or ratio == pr.p - 1:
        verdict = "boundary"
    else:
        verdict = "determinate"
    return {"ratio": ratio, "verdict": verdict}


def scale_jacobi(j, c):
    """Multiply all recurrence coefficients by ``c > 0``."""
    if not c > 0:
        raise InvalidScaleError(f"scale must be positive, got {c}")
    exact = isinstance(c, (int, Fraction))
    c2 = Fraction(c) ** 2 if exact else None
    c = mpf(c)
    if isinstance(j, SymmetricJacobi):
        beta = j.beta
        rule = Rule(lambda k: c * mpf(beta(k)), start=beta.start, name="scaled")
        sq = getattr(beta, "square", None)
        if exact and sq is not None:
            # rational factor: keep the squares exact
            rule.square = lambda k: c2 * Fraction(sq(k))
        return SymmetricJacobi(rule, j.n_max)
    a, b = j.a, j.b
    return JacobiParams(
        Rule(lambda n: c * mpf(a(n)), name="scaled a"),
        Rule(lambda n: c * mpf(b(n)), name="scaled b"),
        j.n_max,
    )


def record_from_json(rec):
    """Dispatch a JSON record on its ``kind``."""
    kind = rec.get("kind")
    if kind == "polynomial_rates":
        return PolynomialRates.from_json(rec)
    if kind == "jacobi":
        return JacobiParams.from_json(rec)
    if kind == "symmetric_jacobi":
        return SymmetricJacobi.from_json(rec)
    if kind == "birth_death_rates":
        lam = [mpmath.mpf(x) for x in rec["lambda"]]
        mu = [mpmath.mpf(x) for x in rec["mu"]]
        return BirthDeathRates(Tabulated(lam), Tabulated(mu))
    raise ValueError(f"unknown record kind {kind!r}")
