"""Truncated Nevanlinna matrices of symmetric problems and their ``C`` entry.

With nilpotent factors ``U_n = ((0, u_n), (0, 0))`` and ``V_n = ((0, 0), (v_n, 0))``
the matrix is ``[prod (I - z V_n)(I + z U_n)] ((0, -1), (1, z))`` with later
factors on the left. Each pair is ``((1, z u_n), (-z v_n, 1 - z^2 u_n v_n))``,
which has determinant one, so every truncation does too.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .core import jacobi_to_symmetric
from .growth import CoefficientSeries
from .multizeta import interleaved_sums
from .precision import mpf
from .recurrences import zero_values_symmetric


# polynomials are coefficient lists, lowest degree first


def padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def pscale(p, c):
    return [c * x for x in p]


def pshift(p, k=1):
    return [0] * k + list(p)


def pmul(p, q, cap=None):
    if not p or not q:
        return []
    n = len(p) + len(q) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [0] * n
    for i, a in enumerate(p):
        if not a or i >= n:
            continue
        for j, b in enumerate(q[: n - i]):
            out[i + j] += a * b
    return out


def ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def pcoeff(p, k):
    return p[k] if 0 <= k < len(p) else 0


@dataclass
class NevanlinnaTruncation:
    """Polynomial entries ``A, B, C, D`` after ``N`` factor pairs.

    ``discarded`` is the largest coefficient magnitude dropped by the degree cap.
    """

    A: list
    B: list
    C: list
    D: list
    N: int
    cap: object = None
    discarded: object = 0

    def det(self):
        return ptrim(padd(pmul(self.A, self.D), pscale(pmul(self.B, self.C), -1)))

    def series(self, name):
        coeffs = getattr(self, name)
        return CoefficientSeries(list(enumerate(coeffs)), name=f"{name}_N{self.N}", meta={"N": self.N})


def _uv(z, N):
    return [z.u(n) for n in range(1, N + 1)], [z.v(n) for n in range(1, N + 1)]


def truncated_product(z, N, cap=None):
    """Left-expanded product of ``N`` pairs times the seed ``((0, -1), (1, z))``.

    Exact when the zero sequences are rational. With ``cap`` set, degrees
    above it are dropped and the largest dropped magnitude is recorded.
    """
    u, v = _uv(z, N)
    one = 1
    # M = I, rows (m11, m12; m21, m22)
    m11, m12, m21, m22 = [one], [], [], [one]
    dropped = 0

    def cut(p):
        nonlocal dropped
        if cap is not None and len(p) > cap + 1:
            dropped = max([dropped] + [abs(x) for x in p[cap + 1 :]])
            return p[: cap + 1]
        return p

    for n in range(N):
        un, vn = u[n], v[n]
        # F = ((1, z u), (-z v, 1 - z^2 u v)); M <- F M
        r1 = (padd(m11, pshift(pscale(m21, un))), padd(m12, pshift(pscale(m22, un))))
        w = -un * vn
        r2 = (
            padd(pshift(pscale(m11, -vn)), padd(m21, pshift(pscale(m21, w), 2))),
            padd(pshift(pscale(m12, -vn)), padd(m22, pshift(pscale(m22, w), 2))),
        )
        m11, m12 = cut(r1[0]), cut(r1[1])
        m21, m22 = cut(r2[0]), cut(r2[1])
    # times seed ((0, -1), (1, z))
    A = m12
    B = padd(pscale(m11, -1), pshift(m12))
    C = m22
    D = padd(pscale(m21, -1), pshift(m22))
    return NevanlinnaTruncation(ptrim(A), ptrim(B), ptrim(C), ptrim(D), N, cap, dropped)


def m22_coefficients(z, n_max, K, tail="auto", a=1):
    """``m_22 = 1 + sum (-1)^n sigma_n(1) z^(2n)`` through ``n_max``, via the nested-sum DP."""
    res = interleaved_sums(z.u, z.v, n_max, K, a=a, tail=tail)
    terms = [(0, 1)] + [(2 * r.n, (-1) ** r.n * r.value) for r in res]
    out = CoefficientSeries(
        terms,
        name="m22",
        meta={"K_used": res[-1].K_used, "tail": res[-1].tail, "max_stability": mpmath.nstr(max(r.stability for r in res), 6)},
    )
    out.results = res
    return out


def m22_exact_coefficients(z, n_max, K):
    """Exact truncated coefficients ``(-1)^n sigma_n`` (indices ``<= K``) as a list starting at ``z^0``."""
    res = interleaved_sums(z.u, z.v, n_max, K, tail="none")
    out = [1]
    for r in res:
        out += [0, (-1) ** r.n * r.value]
    return out


def _stieltjes_c_coeffs(j, N, n_coef):
    """Coefficients of ``C_N(z) = 1 + z sum_{k<N} P_k(0) Q_k(z)`` up to ``z^n_coef``."""
    cap = n_coef
    P0 = [mpmath.mpf(1)]
    p_prev, b_prev = mpmath.mpf(0), mpmath.mpf(1)
    Q = [[], [1 / mpf(j.b(0))]]
    for n in range(N):
        a_n, b_n = mpf(j.a(n)), mpf(j.b(n))
        p_next = (-a_n * P0[n] - b_prev * p_prev) / b_n
        p_prev = P0[n]
        P0.append(p_next)
        if n >= 1:
            # Q_{n+1} = ((z - a_n) Q_n - b_{n-1} Q_{n-1}) / b_n
            q = padd(pshift(Q[n]), padd(pscale(Q[n], -a_n), pscale(Q[n - 1], -b_prev)))
            Q.append(pscale(q[: cap + 1], 1 / b_n))
        b_prev = b_n
    acc = [mpmath.mpf(0)] * (cap + 1)
    for k in range(N):
        for i, x in enumerate(Q[k][:cap]):
            acc[i + 1] += P0[k] * x
    acc[0] = mpmath.mpf(1)
    return acc


def stieltjes_symmetric_c_check(j, N, K=None, n_coef=10, tol=None, tail="auto", reference=None):
    """Compare the Stieltjes ``C`` with the symmetric ``C_s`` coefficientwise (``C_s(z) = C(z^2)``).

    The finite identity pairs ``C_N`` with the symmetric sums truncated at
    ``K = N - 1``; that comparison is exact up to rounding and gated by ``tol``.
    The tail-completed symmetric coefficients (at ``K``, default ``N``) are
    reported alongside with their stability; the gap between the two is the
    truncation error of ``C_N`` itself. Reaching beyond ``N`` needs
    ``reference``, zero sequences with closed-form continuations.
    """
    K = N if K is None else K
    sym = jacobi_to_symmetric(j, N)
    zs = zero_values_symmetric(sym, N)
    c_st = _stieltjes_c_coeffs(j, N, n_coef)
    trunc = interleaved_sums(zs.u, zs.v, n_coef, N - 1, tail="none")
    if reference is None and K > N:
        raise ValueError("K > N needs reference zero sequences that extend beyond N")
    full = m22_coefficients(reference or zs, n_coef, K, tail=tail)
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 2) if tol is None else mpmath.mpf(tol)
    rows, ok = [], True
    for n in range(n_coef + 1):
        cs_trunc = mpmath.mpf(1) if n == 0 else (-1) ** n * trunc[n - 1].value
        diff = abs(c_st[n] - cs_trunc)
        rel = diff / abs(cs_trunc) if cs_trunc else diff
        row = {"n": n, "C_stieltjes": c_st[n], "C_s_truncated": cs_trunc, "rel_diff": rel}
        cs_full = full.terms[n][1]
        row["C_s_completed"] = cs_full
        row["truncation_gap"] = abs(cs_full - cs_trunc) / abs(cs_full)
        row["stability"] = mpmath.mpf(0) if n == 0 else full.results[n - 1].stability
        ok = ok and rel <= tol
        rows.append(row)
    odd = truncated_product(zs, min(N, 60), cap=2 * n_coef + 1).C
    odd_max = max([abs(x) for x in odd[1::2]] + [0])
    return {"rows": rows, "agree": ok, "tolerance": tol, "odd_max": odd_max, "N": N, "K": K}
