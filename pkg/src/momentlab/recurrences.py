"""Orthonormal polynomials at a point, their values at zero, and Gamma asymptotics.

For a symmetric problem the odd ``P`` and even ``Q`` values at zero vanish, and
the surviving ones are running products of the coefficients::

    v_n = P_{2n}(0)^2 = prod_{k=1..n} beta_{2k-2}^2 / beta_{2k-1}^2
    u_n = Q_{2n-1}(0)^2 = prod_{k=1..n-1} beta_{2k-1}^2 / prod_{k=0..n-1} beta_{2k}^2

These feed the multi-zeta sums that carry the growth of the Nevanlinna matrix.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .core import JacobiParams, PolynomialRates, SymmetricJacobi, indeterminacy_check
from .precision import PrecisionRangeError, dec, mpf
from .sequences import GammaRatioWeight, Sequence, Tabulated


class DomainError(ValueError):
    pass


class Hybrid(Sequence):
    """Tabulated values up to the table horizon, a closed-form rule beyond it.

    The rule also supplies the large-index expansion.
    """

    def __init__(self, table, rule):
        self.table = table
        self.rule = rule
        self.start = table.start
        self.horizon = None

    def value(self, k):
        if k <= self.table.horizon:
            return self.table(k)
        return self.rule(k)

    def values(self, lo, hi):
        th = self.table.horizon
        if hi <= th:
            return self.table.values(lo, hi)
        left = self.table.values(lo, th) if lo <= th else []
        return list(left) + self.rule.values(max(lo, th + 1), hi)

    def expansion(self, order):
        return self.rule.expansion(order)


@dataclass
class ZeroSequences:
    """``v_n = P_{2n}(0)^2`` and ``u_n = Q_{2n-1}(0)^2`` for ``n >= 1``.

    ``c1, c2, alpha, beta`` describe ``v_n ~ c1 n^(-1/beta)`` and
    ``u_{n+1} ~ c2 n^(-1/alpha)``; they are ``None`` when unknown.
    """

    v: Sequence
    u: Sequence
    n_max: int
    c1: Optional[object] = None
    c2: Optional[object] = None
    alpha: Optional[object] = None
    beta: Optional[object] = None
    residual_bound: Optional[object] = None
    meta: dict = field(default_factory=dict)

    def to_json(self, n_max=None):
        n_max = self.n_max if n_max is None else n_max
        num = lambda x: None if x is None else dec(x)
        return {
            "kind": "zero_sequences",
            "v": [dec(self.v(n)) for n in range(1, n_max + 1)],
            "u": [dec(self.u(n)) for n in range(1, n_max + 1)],
            "c1": num(self.c1),
            "c2": num(self.c2),
            "alpha": num(self.alpha),
            "beta": num(self.beta),
            "residual_bound": num(self.residual_bound),
            "meta": {"precision_bits": mpmath.mp.prec, "n_max": n_max, **self.meta},
        }

    @classmethod
    def from_json(cls, rec):
        if rec.get("kind") != "zero_sequences":
            raise ValueError(f"not a zero_sequences record: {rec.get('kind')!r}")
        opt = lambda x: None if x is None else mpmath.mpf(x)
        v = [mpmath.mpf(x) for x in rec["v"]]
        u = [mpmath.mpf(x) for x in rec["u"]]
        return cls(
            Tabulated(v, start=1),
            Tabulated(u, start=1),
            len(v),
            opt(rec.get("c1")),
            opt(rec.get("c2")),
            opt(rec.get("alpha")),
            opt(rec.get("beta")),
            opt(rec.get("residual_bound")),
            dict(rec.get("meta", {})),
        )


def eval_polys(j, z, n_max):
    """``P_n(z)`` and ``Q_n(z)`` for ``0 <= n <= n_max`` by the three-term recurrence.

    ``j`` is a :class:`JacobiParams` or :class:`SymmetricJacobi`; ``b_{-1} = 1``.
    """
    z = mpmath.mpmathify(z)
    P = [mpmath.mpf(1)]
    Q = [mpmath.mpf(0)]
    p_prev, q_prev = mpmath.mpf(0), mpmath.mpf(-1)
    b_prev = mpmath.mpf(1)
    for n in range(n_max):
        a_n, b_n = mpf(j.a(n)), mpf(j.b(n))
        p_next = ((z - a_n) * P[n] - b_prev * p_prev) / b_n
        q_next = ((z - a_n) * Q[n] - b_prev * q_prev) / b_n
        p_prev, q_prev = P[n], Q[n]
        P.append(p_next)
        Q.append(q_next)
        b_prev = b_n
    return P, Q


def _squares(s, n_max, exact):
    sq = getattr(s.beta, "square", None)
    if exact:
        if sq is None:
            raise ValueError("exact zero values need a rule with rational squares")
        return [Fraction(sq(k)) for k in range(2 * n_max)]
    if sq is not None:
        return [mpf(sq(k)) for k in range(2 * n_max)]
    return [mpf(s.beta(k)) ** 2 for k in range(2 * n_max)]


def zero_values_symmetric(s, n_max, exact=False):
    """``v_n, u_n`` for ``1 <= n <= n_max`` from running products of ``beta^2``.

    With ``exact=True`` (rules exposing rational squares) the values are
    Fractions, so downstream polynomial identities hold exactly.
    """
    b2 = _squares(s, n_max, exact)
    one = Fraction(1) if exact else mpmath.mpf(1)
    v, u = [], []
    pv = one
    pu = one / b2[0]
    for n in range(1, n_max + 1):
        pv = pv * b2[2 * n - 2] / b2[2 * n - 1]
        if n > 1:
            pu = pu * b2[2 * n - 3] / b2[2 * n - 2]
        if not exact and (pv == 0 or pu == 0 or mpmath.isinf(pv) or mpmath.isinf(pu)):
            raise PrecisionRangeError(f"zero-value product left the exponent range at n={n}; raise precision")
        v.append(pv)
        u.append(pu)
    return ZeroSequences(Tabulated(v, start=1), Tabulated(u, start=1), n_max, meta={"source": "symmetric"})


def delta_n(x, n):
    """``n * ((x+1)...(x+n) Gamma(x+1) / (n! n^x) - 1)`` for ``x > -1``."""
    x = mpf(x)
    if not x > -1:
        raise DomainError(f"delta_n needs x > -1, got {x}")
    if n < 1:
        raise DomainError("delta_n needs n >= 1")
    # (x+1)...(x+n)/n! = Gamma(n+1+x) / (Gamma(x+1) Gamma(n+1))
    lg = mpmath.loggamma(n + 1 + x) - mpmath.loggamma(n + 1) - x * mpmath.log(n)
    return n * mpmath.expm1(lg)


def asymptotic_constants(pr):
    """``c1, c2, alpha, beta`` of ``v_n ~ c1 n^(-1/beta)``, ``u_{n+1} ~ c2 n^(-1/alpha)``."""
    p = pr.p
    c1 = mpmath.mpf(1)
    for dj, ej in zip(pr.d, pr.e):
        c1 *= mpmath.gamma(1 + mpf(dj) / p) / mpmath.gamma(mpf(ej) / p)
    c2 = mpmath.mpf(p) ** (-p) / c1
    ratio = (pr.E - pr.D) / p
    alpha = mpf(Fraction(p) / (pr.E - pr.D))
    beta = 1 / (p - mpf(ratio))
    return {"c1": c1, "c2": c2, "alpha": alpha, "beta": beta}


def _c2_direct(pr):
    """``c2`` from its own Gamma product, independent of ``c1``."""
    p = pr.p
    out = mpmath.mpf(p) ** (-p)
    for dj, ej in zip(pr.d, pr.e):
        out *= mpmath.gamma(mpf(ej) / p) / mpmath.gamma(1 + mpf(dj) / p)
    return out


def polynomial_weight_rules(pr):
    """Closed forms ``u_k = c2 prod Gamma(k + d_j/p)/Gamma(k + e_j/p)`` and
    ``v_k = c1 prod Gamma(k + e_j/p)/Gamma(k + 1 + d_j/p)``."""
    p = pr.p
    k = asymptotic_constants(pr)
    dp = [Fraction(dj) / p for dj in pr.d]
    ep = [Fraction(ej) / p for ej in pr.e]
    u = GammaRatioWeight(dp, ep, scale=k["c2"])
    v = GammaRatioWeight(ep, [1 + x for x in dp], scale=k["c1"])
    return u, v


def zero_values_polynomial(pr, n_max, exact=False):
    """Zero sequences of the polynomial-rate problem, tabulated and with closed forms."""
    from .core import polynomial_bn

    z = zero_values_symmetric(polynomial_bn(pr), n_max, exact=exact)
    k = asymptotic_constants(pr)
    u_rule, v_rule = polynomial_weight_rules(pr)
    z.u = Hybrid(z.u, u_rule)
    z.v = Hybrid(z.v, v_rule)
    z.c1, z.c2, z.alpha, z.beta = k["c1"], k["c2"], k["alpha"], k["beta"]
    z.meta = {"source": "polynomial_rates", "problem": pr.to_json()}
    return z


def zero_values_power(c, n_max):
    """Zero sequences of ``beta_n = (n+1)^c`` (``c > 1``).

    ``v_n = (Gamma(n+1/2)/(sqrt(pi) n!))^(2c)`` and
    ``u_n = (sqrt(pi) Gamma(n) / (2 Gamma(n+1/2)))^(2c)``.
    """
    from .sequences import Rule

    c = mpf(c)
    beta = SymmetricJacobi(Rule(lambda k: mpmath.mpf(k + 1) ** c, name=f"(n+1)^{c}"))
    z = zero_values_symmetric(beta, n_max)
    half = Fraction(1, 2)
    v_rule = GammaRatioWeight([half], [1], scale=mpmath.pi ** (-c), power=2 * c)
    u_rule = GammaRatioWeight([0], [half], scale=(mpmath.pi / 4) ** c, power=2 * c)
    z.u = Hybrid(z.u, u_rule)
    z.v = Hybrid(z.v, v_rule)
    z.c1 = mpmath.pi ** (-c)
    z.c2 = (mpmath.pi / 4) ** c
    z.alpha = z.beta = 1 / c
    z.meta = {"source": "power_beta", "c": dec(c)}
    return z


def residual_check(z, pr=None, n_max=None):
    """Empirical ``K`` with ``|tau_n|, |rho_n| <= K/n``.

    ``tau_n = v_n / (c1 n^(-1/beta)) - 1`` and
    ``rho_n = u_{n+1} / (c2 n^(-1/alpha)) - 1`` (``u_{n+1} = Q_{2n+1}(0)^2``).
    """
    if pr is not None:
        k = asymptotic_constants(pr)
        c1, c2, alpha, beta = k["c1"], k["c2"], k["alpha"], k["beta"]
    else:
        c1, c2, alpha, beta = z.c1, z.c2, z.alpha, z.beta
    if n_max is None:
        n_max = z.n_max - 1
    taus, rhos = [], []
    for n in range(1, n_max + 1):
        nn = mpmath.mpf(n)
        taus.append(mpf(z.v(n)) / (c1 * nn ** (-1 / beta)) - 1)
        rhos.append(mpf(z.u(n + 1)) / (c2 * nn ** (-1 / alpha)) - 1)
    max_tau = max(n * abs(t) for n, t in enumerate(taus, 1))
    max_rho = max(n * abs(r) for n, r in enumerate(rhos, 1))
    return {"max_n_tau": max_tau, "max_n_rho": max_rho, "tau": taus, "rho": rhos}


def tau_rho_from_deltas(pr, n):
    """``tau_n, rho_n`` from their defining products of ``delta_n`` values."""
    p = pr.p
    num_t = den_t = num_r = den_r = mpmath.mpf(1)
    for ej, dj in zip(pr.e, pr.d):
        x_e1 = delta_n(mpf(ej) / p - 1, n)
        x_e = delta_n(mpf(ej) / p, n)
        y_d = delta_n(mpf(dj) / p, n)
        num_t *= 1 + x_e1 / n
        den_t *= 1 + y_d / n
        num_r *= 1 + y_d / n
        den_r *= 1 + x_e / n
    return num_t / den_t - 1, num_r / den_r - 1
