from fractions import Fraction

import mpmath
import pytest

from momentlab.core import PolynomialRates, SymmetricJacobi, rates_to_jacobi
from momentlab.nevanlinna import (
    m22_coefficients,
    m22_exact_coefficients,
    pcoeff,
    pmul,
    ptrim,
    stieltjes_symmetric_c_check,
    truncated_product,
)
from momentlab.recurrences import zero_values_polynomial, zero_values_symmetric
from momentlab.sequences import Rule

P3 = PolynomialRates(3, (1, 2, 2), (0, 0, 1))
P4 = PolynomialRates(4, (1, 2, 2, 3), (-1, 0, 0, 1))


@pytest.fixture(scope="module")
def exact3():
    return zero_values_polynomial(P3, 50, exact=True)


def test_seed(exact3):
    t = truncated_product(exact3, 0)
    assert (t.A, t.B, t.C, t.D) == ([], [-1], [1], [0, 1])


def test_determinant_exact(exact3):
    for N in (1, 2, 7, 20, 50):
        assert truncated_product(exact3, N).det() == [1]


def test_degrees_and_parity(exact3):
    N = 12
    t = truncated_product(exact3, N)
    assert len(t.C) - 1 == 2 * N and len(t.D) - 1 == 2 * N + 1
    assert all(x == 0 for x in t.A[0::2]) and all(x == 0 for x in t.C[1::2])
    assert all(x == 0 for x in t.B[1::2]) and all(x == 0 for x in t.D[0::2])
    assert t.B[0] == -1 and pcoeff(t.A, 0) == 0


def mat_poly_mul(X, Y):
    return [[_padd(pmul(X[i][0], Y[0][j]), pmul(X[i][1], Y[1][j])) for j in range(2)] for i in range(2)]


def _padd(p, q):
    n = max(len(p), len(q))
    return [pcoeff(p, k) + pcoeff(q, k) for k in range(n)]


def test_pair_factor_from_nilpotents():
    u, v, w = Fraction(3, 7), Fraction(5, 2), Fraction(2, 9)
    U = [[0, u], [0, 0]]
    U2 = [[0, w], [0, 0]]
    V = [[0, 0], [v, 0]]
    mul = lambda X, Y: [[sum(X[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert mul(U, U2) == [[0, 0], [0, 0]] and mul(V, V) == [[0, 0], [0, 0]]
    # (I - zV)(I + zU) = [[1, z u], [-z v, 1 - z^2 u v]]
    left = [[[1], []], [[0, -v], [1]]]
    right = [[[1], [0, u]], [[], [1]]]
    prod = mat_poly_mul(left, right)
    assert prod[0][0] == [1] and prod[0][1] == [0, u]
    assert prod[1][0] == [0, -v] and prod[1][1] == [1, 0, -u * v]


def test_m22_equals_product(exact3):
    for N in (5, 20, 40):
        C = truncated_product(exact3, N).C
        dp = m22_exact_coefficients(exact3, N, N)
        assert C == dp


def test_m22_signs_and_series():
    zs = zero_values_polynomial(P3, 400)
    s = m22_coefficients(zs, 12, 400)
    assert s.terms[0] == (0, 1)
    assert all((-1) ** (m // 2) * c > 0 for m, c in s.terms)
    assert [m for m, _ in s.terms] == list(range(0, 26, 2))
    assert s.meta["tail"] == "asymptotic"


def test_constant_beta_toy():
    zs = zero_values_symmetric(SymmetricJacobi(Rule(lambda k: 1)), 10)
    for N in (3, 10):
        C = truncated_product(zs, N).C
        assert C == m22_exact_coefficients(zs, N, N)


def test_cap_records_discard(exact3):
    full = truncated_product(exact3, 20)
    t = truncated_product(exact3, 20, cap=9)
    assert len(t.C) <= 10 and t.discarded > 0
    assert t.C == ptrim(full.C[:10])


def test_c_check_p3():
    j = rates_to_jacobi(P3.rates(), 200)
    chk = stieltjes_symmetric_c_check(j, 200, n_coef=10)
    assert chk["agree"]
    assert chk["rows"][0]["C_stieltjes"] == 1 and chk["rows"][0]["C_s_truncated"] == 1
    assert chk["odd_max"] == 0
    assert max(r["rel_diff"] for r in chk["rows"]) < mpmath.mpf(10) ** -60


def test_c_check_needs_reference_beyond_N():
    j = rates_to_jacobi(P4.rates(), 60)
    with pytest.raises(ValueError):
        stieltjes_symmetric_c_check(j, 60, K=200)
    chk = stieltjes_symmetric_c_check(j, 60, K=2000, n_coef=6, reference=zero_values_polynomial(P4, 60))
    assert chk["agree"] and chk["K"] == 2000
    # the completed coefficients exceed the truncated ones in size
    assert all(abs(r["C_s_completed"]) >= abs(r["C_s_truncated"]) for r in chk["rows"])


def test_series_export(exact3):
    s = truncated_product(exact3, 4).series("C")
    assert s.name == "C_N4" and s.terms[0] == (0, 1)
