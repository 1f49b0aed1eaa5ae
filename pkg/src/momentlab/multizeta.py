"""Interleaved nested sums by prefix-sum dynamic programming.

The central object is the depth-``2n`` sum

    sum_{a <= k1 <= k2 < k3 <= k4 < ... < k_{2n-1} <= k_{2n}} u_{k1} v_{k2} ... u_{k_{2n-1}} v_{k_{2n}}

computed level by level: ``F_1 = u``, ``F_{2j} = v * cumsum_le(F_{2j-1})``,
``F_{2j+1} = u * cumsum_lt(F_{2j})``. One pass to depth ``2 n_max`` yields every
``n <= n_max`` at cost ``O(n_max K)``.

Truncation
----------
With ``tail="none"`` only indices ``<= K`` are summed. With ``tail="asymptotic"``
(or ``"auto"`` once ``K >= TAIL_MIN_K`` and both weights carry large-index
expansions) every admissible tuple is split at ``K`` into a head, summed
exactly by the DP, and a tail, summed by term-wise Euler-Maclaurin on the
weights' asymptotic series. The split is exact because any head index is
below any tail index, so both ``<=`` and ``<`` hold across it.
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from .precision import mpf, native_context, to_native
from .sequences import PowerWeight, Sequence, Tabulated, as_sequence
from .special import AsymSeries, zeta

TAIL_MIN_K = 64
TAIL_ORDER = 12
EPS_TAIL = mpmath.mpf("1e-8")


class DivergenceError(ValueError):
    pass


class OracleBudgetError(RuntimeError):
    pass


class SandwichViolation(AssertionError):
    pass


@dataclass
class NestedSumSpec:
    """Weights on odd (``u``) and even (``v``) positions, start ``a``, depth ``n``, cut ``K``."""

    odd_weight: Sequence
    even_weight: Sequence
    start: int = 1
    depth: int = 1
    K: int = 100

    def __post_init__(self):
        self.odd_weight = as_sequence(self.odd_weight, start=1)
        self.even_weight = as_sequence(self.even_weight, start=1)
        if self.start < 1:
            raise ValueError("start index must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.K < self.start:
            raise ValueError(f"truncation K={self.K} below start index {self.start}")


@dataclass
class SumResult:
    n: int
    value: object
    K_used: int
    stability: object
    tail: str = "none"
    starved: bool = False

    def as_row(self):
        from .precision import dec

        return {"n": self.n, "value": dec(self.value), "K_used": self.K_used, "stability": mpmath.nstr(self.stability, 6)}


# --------------------------------------------------------------------------
# head: exact DP over indices a..K


def _native_list(xs):
    return [to_native(x) for x in xs]


def _zero_like(x):
    return x * 0


def interleaved_heads(u, v, levels):
    """Level sums ``H_i = sum_m F_i(m)`` for ``i = 0..levels`` (``H_0 = 1``).

    ``u`` and ``v`` are value lists over the same index window.
    """
    if not u:
        return [1] + [0] * levels
    zero = _zero_like(u[0])
    H = [zero + 1]
    F = list(u)
    H.append(sum(F, zero))
    for i in range(2, levels + 1):
        if i % 2 == 0:
            S = itertools.accumulate(F)
            F = [a * b for a, b in zip(v, S)]
        else:
            S = itertools.accumulate(F)
            F = [zero] + [a * b for a, b in zip(u[1:], S)]
        H.append(sum(F, zero))
    return H


def gap_heads(w, idx, levels):
    """``A_j = sum_m G_j(m)`` and ``B_j = sum_m m G_j(m)`` for the gap-weighted DP.

    ``G_1 = w``, ``G_j(m) = w_m * (m * S0(m-1) - S1(m-1))`` with running sums
    ``S0`` of ``G_{j-1}`` and ``S1`` of ``l G_{j-1}(l)``.
    """
    if not w:
        return [0] * (levels + 1), [0] * (levels + 1)
    zero = _zero_like(w[0])
    A = [zero + 1]
    B = [zero]
    G = list(w)
    A.append(sum(G, zero))
    B.append(sum((m * g for m, g in zip(idx, G)), zero))
    for _ in range(2, levels + 1):
        S0 = itertools.accumulate(G)
        S1 = itertools.accumulate(m * g for m, g in zip(idx, G))
        G = [zero] + [wm * (m * s0 - s1) for wm, m, s0, s1 in zip(w[1:], idx[1:], S0, S1)]
        A.append(sum(G, zero))
        B.append(sum((m * g for m, g in zip(idx, G)), zero))
    return A, B


def _window(seq, a, K):
    if K < a:
        return []
    return seq.values(a, K)


def _exact(xs):
    return all(isinstance(x, (int, Fraction)) for x in xs)


def _head_values(u_seq, v_seq, a, K, levels):
    u = _window(u_seq, a, K)
    v = _window(v_seq, a, K)
    if _exact(u) and _exact(v):
        return interleaved_heads([Fraction(x) for x in u], [Fraction(x) for x in v], levels)
    with native_context():
        H = interleaved_heads(_native_list(u), _native_list(v), levels)
    return [mpf(h) for h in H]


# --------------------------------------------------------------------------
# tail: asymptotic series for indices beyond K


def interleaved_tails(u_exp, v_exp, levels):
    """Series ``Phi_L^u, Phi_L^v`` (functions of the lower index limit) for ``L <= levels``.

    ``Phi_L^u(x) = sum_{k >= x} u(k) Phi_{L-1}^v(k)`` (next relation ``<=``) and
    ``Phi_L^v(x) = sum_{k >= x} v(k) Phi_{L-1}^u(k+1)`` (next relation ``<``).
    """
    order = min(u_exp.order, v_exp.order)
    one = AsymSeries.one(order)
    Tu, Tv = [one], [one]
    for _ in range(1, levels + 1):
        nu = (u_exp * Tv[-1]).tail_sum()
        nv = (v_exp * Tu[-1].shifted(1)).tail_sum()
        Tu.append(nu)
        Tv.append(nv)
    return Tu, Tv


def gap_tails(w_exp, levels):
    """``X0_L, X1_L`` for the gap-weighted tail.

    ``R_0 = 1``; ``X0_L(x) = sum_{k>=x} w(k) R_{L-1}(k)``,
    ``X1_L(x) = sum_{k>=x} k w(k) R_{L-1}(k)``, ``R_L(k) = X1_L(k+1) - k X0_L(k+1)``.
    """
    R = AsymSeries.one(w_exp.order)
    X0, X1 = [None], [None]
    for _ in range(1, levels + 1):
        wr = w_exp * R
        x0 = wr.tail_sum()
        x1 = wr.times_x().tail_sum()
        X0.append(x0)
        X1.append(x1)
        R = x1.shifted(1) - x0.shifted(1).times_x()
    return X0, X1


def _resolve_tail(tail, K, *seqs):
    if tail not in ("auto", "none", "asymptotic"):
        raise ValueError(f"unknown tail mode {tail!r}")
    has = all(s.expansion(2) is not None for s in seqs)
    if tail == "asymptotic":
        if not has:
            raise ValueError("asymptotic tail needs weights with large-index expansions")
        return "asymptotic"
    if tail == "auto" and has and K >= TAIL_MIN_K:
        return "asymptotic"
    return "none"


def _interleaved_at(u_seq, v_seq, a, K, n_max, mode, order):
    levels = 2 * n_max
    H = _head_values(u_seq, v_seq, a, K, levels)
    if mode == "none":
        return [H[2 * n] for n in range(1, n_max + 1)]
    Tu, Tv = interleaved_tails(u_seq.expansion(order), v_seq.expansion(order), levels)
    x0 = max(K + 1, a)
    tu = [s(x0) for s in Tu]
    tv = [s(x0) for s in Tv]
    Hm = [mpf(h) for h in H]
    out = []
    for n in range(1, n_max + 1):
        L = 2 * n
        acc = Hm[L]
        for i in range(L):
            acc += Hm[i] * (tu[L - i] if i % 2 == 0 else tv[L - i])
        out.append(acc)
    return out


def _gap_at(w_seq, K, n_max, mode, order):
    idx = list(range(1, K + 1))
    w = _window(w_seq, 1, K)
    if _exact(w):
        A, B = gap_heads([Fraction(x) for x in w], idx, n_max)
    else:
        with native_context():
            A, B = gap_heads(_native_list(w), idx, n_max)
        A, B = [mpf(x) for x in A], [mpf(x) for x in B]
    if mode == "none":
        return [A[n] for n in range(1, n_max + 1)]
    X0, X1 = gap_tails(w_seq.expansion(order), n_max)
    x0 = K + 1
    x0v = [None] + [s(x0) for s in X0[1:]]
    x1v = [None] + [s(x0) for s in X1[1:]]
    A = [mpf(x) for x in A]
    B = [mpf(x) for x in B]
    out = []
    for n in range(1, n_max + 1):
        acc = A[n] + x0v[n]
        for i in range(1, n):
            acc += A[i] * x1v[n - i] - B[i] * x0v[n - i]
        out.append(acc)
    return out


def _relchange(new, old):
    new, old = mpf(new), mpf(old)
    if new == 0:
        return mpmath.mpf(0) if old == 0 else mpmath.mpf(1)
    return abs(new - old) / abs(new)


def _refine(compute, K, eps, K_max):
    """Evaluate at ``K`` and ``K // 2``; keep doubling while unstable and ``K <= K_max``."""
    ref = compute(max(K // 2, 1))
    cur = compute(K)
    stab = [_relchange(c, r) for c, r in zip(cur, ref)]
    while K_max is not None and max(stab) > eps and 2 * K <= K_max:
        K *= 2
        ref, cur = cur, compute(K)
        stab = [_relchange(c, r) for c, r in zip(cur, ref)]
    return cur, stab, K


def interleaved_sums(u, v, n_max, K, a=1, tail="auto", eps=None, K_max=None, order=TAIL_ORDER):
    """``sigma_n(a)`` for ``n = 1..n_max`` with one DP pass per ``K`` evaluated."""
    u, v = as_sequence(u, start=1), as_sequence(v, start=1)
    if K < a:
        raise ValueError(f"truncation K={K} below start index {a}")
    mode = _resolve_tail(tail, K, u, v)
    eps = EPS_TAIL if eps is None else mpmath.mpf(eps)

    def compute(k):
        return _interleaved_at(u, v, a, k, n_max, mode, order)

    vals, stab, K_used = _refine(compute, K, eps, K_max)
    return [
        SumResult(n, val, K_used, s, mode, starved=(mode == "none" and K_used < a + n - 1))
        for n, (val, s) in enumerate(zip(vals, stab), start=1)
    ]


def nested_sum(spec, tail="none", eps=None, K_max=None):
    """The depth-``2n`` interleaved sum described by ``spec``.

    The default sums indices ``<= K`` only; a ``K`` below ``a + n - 1`` starves
    the sum and returns 0 with ``starved`` set.
    """
    res = interleaved_sums(
        spec.odd_weight, spec.even_weight, spec.depth, spec.K, a=spec.start, tail=tail, eps=eps, K_max=K_max
    )
    return res[-1]


def gamma_n(p, n_max, K, tail="auto", eps=None, K_max=None):
    """``gamma_n(p) = sum_{1<=k1<=k2<...<=k_{2n}} (k1...k_{2n})^(-p/2)`` for ``n <= n_max``."""
    p = mpf(p)
    if not p > 2:
        raise DivergenceError(f"gamma_n(p) diverges for p={p} <= 2")
    w = PowerWeight(p / 2)
    return interleaved_sums(w, w, n_max, K, tail=tail, eps=eps, K_max=K_max)


def zeta_n(p, n_max, K, tail="auto", eps=None, K_max=None, order=TAIL_ORDER):
    """``zeta_n(p) = sum_{k1<...<kn} (k2-k1)...(kn-k_{n-1}) (k1...kn)^(-p)``.

    Entry ``n = 1`` is ``zeta(p)`` (no gaps).
    """
    p = mpf(p)
    if not p > 2:
        raise DivergenceError(f"zeta_n(p) diverges for p={p} <= 2")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    w = PowerWeight(p)
    mode = _resolve_tail(tail, K, w)
    eps = EPS_TAIL if eps is None else mpmath.mpf(eps)

    def compute(k):
        return _gap_at(w, k, n_max, mode, order)

    vals, stab, K_used = _refine(compute, K, eps, K_max)
    return [
        SumResult(n, val, K_used, s, mode, starved=(mode == "none" and K_used < n))
        for n, (val, s) in enumerate(zip(vals, stab), start=1)
    ]


def s_n(alpha, beta, a, n_max, K, tail="auto", eps=None, K_max=None):
    """``s_n(a)`` with odd weight ``k^(-1/alpha)`` and even weight ``k^(-1/beta)``."""
    alpha, beta = mpf(alpha), mpf(beta)
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError("s_n needs 0 < alpha, beta < 1")
    return interleaved_sums(PowerWeight(1 / alpha), PowerWeight(1 / beta), n_max, K, a=a, tail=tail, eps=eps, K_max=K_max)


def sigma_n(zs, n_max, K, a=1, tail="auto", eps=None, K_max=None):
    """``sigma_n(a)`` for the zero sequences ``zs`` (``u`` odd, ``v`` even)."""
    return interleaved_sums(zs.u, zs.v, n_max, K, a=a, tail=tail, eps=eps, K_max=K_max)


# --------------------------------------------------------------------------
# oracle


ORACLE_MAX_DEPTH = 3
ORACLE_MAX_K = 30


def brute_force_oracle(spec):
    """Enumerate every admissible index tuple and sum the weight products.

    Exact for rational weights. Refuses specs beyond ``n <= 3, K <= 30``.
    """
    n, K, a = spec.depth, spec.K, spec.start
    if n > ORACLE_MAX_DEPTH or K > ORACLE_MAX_K:
        raise OracleBudgetError(f"oracle budget exceeded (n={n}, K={K}; limits n<=3, K<=30)")
    u = {k: spec.odd_weight(k) for k in range(a, K + 1)}
    v = {k: spec.even_weight(k) for k in range(a, K + 1)}
    L = 2 * n

    def rec(pos, lo, acc):
        # pos is 0-based; odd positions (1-based) carry u and are followed by <=
        if pos == L:
            return acc
        total = 0
        wt = u if pos % 2 == 0 else v
        for k in range(lo, K + 1):
            nxt = k if pos % 2 == 0 else k + 1
            total += rec(pos + 1, nxt, acc * wt[k])
        return total

    return rec(0, a, 1)


def random_spec(rng, max_depth=3, max_K=25, denominator=7):
    """Random small spec with positive rational weights (for oracle checks)."""
    n = rng.randint(1, max_depth)
    a = rng.randint(1, 3)
    K = rng.randint(a, max(a, max_K))
    u = [Fraction(rng.randint(1, 9), rng.randint(1, denominator)) for _ in range(K)]
    v = [Fraction(rng.randint(1, 9), rng.randint(1, denominator)) for _ in range(K)]
    return NestedSumSpec(Tabulated(u, start=1), Tabulated(v, start=1), start=a, depth=n, K=K)


# --------------------------------------------------------------------------
# proved inequalities


def _tolerance(*results):
    return max(max(r.stability for r in results), mpmath.mpf(2) ** (-mp.prec // 2))


def _check(rows, key_margins, strict):
    bad = [(r["n"], k) for r in rows for k in key_margins if r[k] < -r["tolerance"]]
    if bad and strict:
        raise SandwichViolation(f"negative margins beyond tail tolerance: {bad}")
    return rows


def mz3_constant(p):
    p = mpf(p)
    return zeta(p - 1) * mpmath.mpf(2) ** (p / 2 - 1) / (p / 2 - 1)


def sandwich_report(p, n_max, K, n_min=3, strict=True, tail="auto"):
    """``zeta_n(p) <= gamma_n(p) <= zeta(p-1) 2^(p/2-1)/(p/2-1) zeta_{n-1}(p)``, ``n >= 3``.

    Margins are relative to ``gamma_n``; a margin below minus the tail
    tolerance raises :class:`SandwichViolation` when ``strict``.
    """
    g = gamma_n(p, n_max, K, tail=tail)
    z = zeta_n(p, n_max, K, tail=tail)
    const = mz3_constant(p)
    rows = []
    for n in range(n_min, n_max + 1):
        gn, zn, zprev = g[n - 1], z[n - 1], z[n - 2]
        upper = const * zprev.value
        rows.append(
            {
                "n": n,
                "zeta_n": zn.value,
                "gamma_n": gn.value,
                "upper": upper,
                "margin_low": (gn.value - zn.value) / gn.value,
                "margin_high": (upper - gn.value) / gn.value,
                "tolerance": _tolerance(gn, zn, zprev),
            }
        )
    return _check(rows, ("margin_low", "margin_high"), strict)


def sumup_report(alpha, beta, n_max, K, n_min=1, strict=True, tail="auto"):
    """Compare ``s_n(1)`` with ``gamma_n = gamma_n(2/gamma)`` (``gamma`` the harmonic mean).

    ``alpha > beta``: ``(zeta(1/alpha) zeta(1/gamma))^-1 (4n^2)^(-1/gamma) gamma_n <= s_n(1) <= gamma_n``.
    ``alpha < beta``: ``gamma_n <= s_n(1) <= zeta(1/alpha) zeta(1/beta) zeta(1/gamma)^2 gamma_{n-2}`` (``n >= 3``).
    """
    alpha, beta = mpf(alpha), mpf(beta)
    gam = 2 / (1 / alpha + 1 / beta)
    s = s_n(alpha, beta, 1, n_max, K, tail=tail)
    g = interleaved_sums(PowerWeight(1 / gam), PowerWeight(1 / gam), n_max, K, tail=tail)
    rows = []
    if alpha >= beta:
        c = 1 / (zeta(1 / alpha) * zeta(1 / gam))
        for n in range(max(n_min, 1), n_max + 1):
            sn, gn = s[n - 1], g[n - 1]
            lower = c * (4 * mpmath.mpf(n) ** 2) ** (-1 / gam) * gn.value
            rows.append(
                {
                    "n": n,
                    "s_n": sn.value,
                    "lower": lower,
                    "upper": gn.value,
                    "margin_low": (sn.value - lower) / sn.value,
                    "margin_high": (gn.value - sn.value) / sn.value,
                    "tolerance": _tolerance(sn, gn),
                    "case": "alpha>=beta",
                }
            )
    else:
        c = zeta(1 / alpha) * zeta(1 / beta) * zeta(1 / gam) ** 2
        for n in range(max(n_min, 3), n_max + 1):
            sn, gn, g2 = s[n - 1], g[n - 1], g[n - 3]
            upper = c * g2.value
            rows.append(
                {
                    "n": n,
                    "s_n": sn.value,
                    "lower": gn.value,
                    "upper": upper,
                    "margin_low": (sn.value - gn.value) / sn.value,
                    "margin_high": (upper - sn.value) / sn.value,
                    "tolerance": _tolerance(sn, gn, g2),
                    "case": "alpha<beta",
                }
            )
    return _check(rows, ("margin_low", "margin_high"), strict)


def measured_L(a, n_max):
    """``max_{n <= n_max} prod_{j<=n}(1 + (a-1)/j) / n^(a-1)``."""
    best = mpmath.mpf(0)
    prod = mpmath.mpf(1)
    for n in range(1, n_max + 1):
        prod *= 1 + mpmath.mpf(a - 1) / n
        best = max(best, prod / mpmath.mpf(n) ** (a - 1))
    return best


def start_index_report(alpha, beta, a, n_max, K, strict=True, tail="auto"):
    """``s_n(1) >= s_n(a) >= s_n(1) (L(a) n^(a-1))^(-2/gamma)`` with measured ``L(a)``."""
    alpha, beta = mpf(alpha), mpf(beta)
    gam = 2 / (1 / alpha + 1 / beta)
    s1 = s_n(alpha, beta, 1, n_max, K, tail=tail)
    sa = s_n(alpha, beta, a, n_max, K, tail=tail)
    L = measured_L(a, n_max)
    rows = []
    for n in range(1, n_max + 1):
        lower = s1[n - 1].value * (L * mpmath.mpf(n) ** (a - 1)) ** (-2 / gam)
        x = sa[n - 1].value
        rows.append(
            {
                "n": n,
                "s_n_1": s1[n - 1].value,
                "s_n_a": x,
                "lower": lower,
                "L": L,
                "margin_low": (x - lower) / x,
                "margin_high": (s1[n - 1].value - x) / s1[n - 1].value,
                "tolerance": _tolerance(s1[n - 1], sa[n - 1]),
            }
        )
    return _check(rows, ("margin_low", "margin_high"), strict)


def diagonal_subsum(p, n_max):
    """``sum_{l1<...<ln} (l1...ln)^(-p)``: coefficients of ``prod(1 + x/l^p)``.

    Uses the power-sum (Newton) identities with zeta values, so it is
    independent of the DP.
    """
    p = mpf(p)
    P = [None] + [zeta(j * p) for j in range(1, n_max + 1)]
    e = [mpmath.mpf(1)]
    for n in range(1, n_max + 1):
        acc = mpmath.mpf(0)
        for i in range(1, n + 1):
            acc += (-1) ** (i - 1) * e[n - i] * P[i]
        e.append(acc / n)
    return e[1:]
