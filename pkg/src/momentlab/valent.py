"""Polynomial-rate birth-death problems: order and type pipelines.

For rates ``lambda_n = prod(p n + e_j)``, ``mu_n = prod(p n + d_j)`` the
Stieltjes problem has order ``1/p``; its type lies in
``[pi/(p sin(pi/p)), pi/(p sin(pi/p) cos(pi/p))]`` and is ``tau_p / p`` with
``tau_p`` the type of ``G_p(z) = sum gamma_n(p) z^n``. The value
``(1/p) B(1/p, 1 - 2/p)`` is a conjecture and is only reported.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import __version__
from .core import (
    PolynomialRates,
    indeterminacy_check,
    jacobi_to_symmetric,
    polynomial_bn,
    rates_to_jacobi,
)
from .growth import (
    CoefficientSeries,
    canonical_type_reference,
    log_canonical_product,
    order_estimate,
    type_estimate,
)
from .multizeta import gamma_n, sigma_n, zeta_n
from .precision import mpf
from .recurrences import zero_values_polynomial, zero_values_power

ORDER_TOL = mpmath.mpf("0.05")
TYPE_TOL = mpmath.mpf("0.05")


class PipelineError(RuntimeError):
    """Failure inside :func:`full_report`, tagged with the stage that failed."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class DeterminateProblemError(ValueError):
    pass


FLAGSHIPS = {
    "p3": PolynomialRates(3, (1, 2, 2), (0, 0, 1)),
    "p4": PolynomialRates(4, (1, 2, 2, 3), (-1, 0, 0, 1)),
}


def _series_from(results, name, meta):
    terms = [(r.n, r.value) for r in results]
    s = CoefficientSeries(terms, name=name, meta=meta)
    s.results = results
    return s


def _sum_meta(results):
    return {
        "K_used": results[-1].K_used,
        "tail": results[-1].tail,
        "max_stability": mpmath.nstr(max(r.stability for r in results), 6),
    }


def gp_series(p, n_max, K, tail="auto"):
    """``G_p(z) = sum_{n>=1} gamma_n(p) z^n``."""
    res = gamma_n(p, n_max, K, tail=tail)
    return _series_from(res, f"G_{mpmath.nstr(mpf(p), 6)}", {"p": str(p), **_sum_meta(res)})


def zp_series(p, n_max, K, tail="auto"):
    """``Z_p(z) = sum_{n>=1} zeta_n(p) z^n`` (the ``n = 1`` term is ``zeta(p)``)."""
    res = zeta_n(p, n_max, K, tail=tail)
    return _series_from(res, f"Z_{mpmath.nstr(mpf(p), 6)}", {"p": str(p), **_sum_meta(res)})


def type_bounds(p):
    """``(pi/(p sin(pi/p)), pi/(p sin(pi/p) cos(pi/p)))``."""
    if p < 3:
        raise ValueError(f"type bounds need p >= 3, got {p}")
    x = mpmath.pi / mpf(p)
    low = x / mpmath.sin(x)
    return low, low / mpmath.cos(x)


def conjectured_type(p):
    """``(1/p) Gamma(1/p) Gamma(1 - 2/p) / Gamma(1 - 1/p)``."""
    p = mpf(p)
    if not p > 2:
        raise ValueError("conjectured type needs p > 2")
    return mpmath.gamma(1 / p) * mpmath.gamma(1 - 2 / p) / (p * mpmath.gamma(1 - 1 / p))


def containment_certificate(p):
    """Margins of ``low < T < high``.

    Lower: ``T / low = Gamma(1-2/p) / Gamma(1-1/p)^2``, above one by
    log-convexity of Gamma. Upper: ``T`` against ``high`` directly.
    """
    low, high = type_bounds(p)
    T = conjectured_type(p)
    pp = mpf(p)
    ratio = mpmath.gamma(1 - 2 / pp) / mpmath.gamma(1 - 1 / pp) ** 2
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 16)
    return {
        "p": p,
        "low": low,
        "T": T,
        "high": high,
        "lower_margin": ratio - 1,
        "upper_margin": (high - T) / high,
        "inside": bool(ratio - 1 > eps and (high - T) / high > eps),
    }


def tc_conjecture(c):
    """``B(1/(2c), 1 - 1/c)``."""
    c = mpf(c)
    if not c > 1:
        raise ValueError("needs c > 1")
    return mpmath.beta(1 / (2 * c), 1 - 1 / c)


def tc_estimate(c, n_max, K, window=0.5, source="gamma", tail="auto"):
    """``T_c``: the type of ``sum gamma_n(2c) z^n`` (or of ``zeta_n``) at its order ``1/(2c)``.

    Equivalently ``T_c = (2c/e) limsup n gamma_n(2c)^(1/(2cn))``.
    """
    c = mpf(c)
    if not c > 1:
        raise ValueError("needs c > 1")
    s = gp_series(2 * c, n_max, K, tail) if source == "gamma" else zp_series(2 * c, n_max, K, tail)
    est = type_estimate(s, 1 / (2 * c), window)
    return {"T_c": est.tau_hat, "T_c_raw": est.tau_raw, "estimate": est, "series": s}


def tc_bracket(c=2):
    """Bracket for ``T_c / 2`` at ``c = 2``: ``p = 4`` type bounds times ``4 / 2``."""
    if mpf(c) != 2:
        raise ValueError("the bracket transfer is stated for c = 2")
    low, high = type_bounds(4)
    return 2 * low, 2 * high


def _classify(tail):
    if all(s == 0 for s in tail):
        return "tight"
    if all(s <= 0 for s in tail):
        return "log-concave"
    if all(s >= 0 for s in tail):
        return "log-convex"
    if all(a == -b and a != 0 for a, b in zip(tail, tail[1:])):
        return "alternating"
    return "mixed"


def log_concavity_report(pr, n_max):
    """Signs of ``b_{k+1} b_{k-1} - b_k^2`` for the symmetric coefficients ``b_k``.

    Comparisons use exact squares, so the verdict is exact. ``pr`` is a
    :class:`PolynomialRates` or a callable giving ``b_k^2`` exactly. The
    verdict describes the longest classifiable tail, starting at ``from_k``.
    """
    sq = polynomial_bn(pr).beta.square if isinstance(pr, PolynomialRates) else pr
    signs = []
    for k in range(1, n_max):
        lhs = Fraction(sq(k + 1)) * Fraction(sq(k - 1))
        rhs = Fraction(sq(k)) ** 2
        signs.append((k, (lhs > rhs) - (lhs < rhs)))
    vals = [s for _, s in signs]
    for i in range(len(vals)):
        verdict = _classify(vals[i:])
        if verdict != "mixed":
            return {"verdict": verdict, "from_k": signs[i][0], "signs": signs}
    return {"verdict": "mixed", "from_k": None, "signs": signs}


def tv_sandwich(p, r_list, n_max=60, K=256, tail="auto"):
    """``prod(1 + r^2/n^p) < 1 + sum gamma_n(p) r^(2n) < prod(1 + r/n^(p/2))^2`` in log form.

    Rows carry the relative margins and the size of the last series term.
    """
    p = mpf(p)
    g = gamma_n(p, n_max, K, tail=tail)
    rows = []
    for r in r_list:
        r = mpf(r)
        terms = [x.value * r ** (2 * x.n) for x in g]
        mid = 1 + mpmath.fsum(terms)
        lo = log_canonical_product(r**2, p)
        hi = 2 * log_canonical_product(r, p / 2)
        lm = mpmath.log(mid)
        rows.append(
            {
                "r": r,
                "log_lower": lo,
                "log_series": lm,
                "log_upper": hi,
                "margin_low": lm - lo,
                "margin_high": hi - lm,
                "last_term": terms[-1] / mid,
                "stability": max(x.stability for x in g),
            }
        )
    return rows


@dataclass
class ValentReport:
    p: int
    problem: dict
    ratio: Fraction
    rho_hat: object
    tau_hat: object
    bracket_low: object
    bracket_high: object
    conjectured_T: object
    flags: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    series: object = None

    @property
    def passed(self):
        return all(self.flags.values())

    def to_json(self):
        num = lambda x: None if x is None else mpmath.nstr(x, 15)
        return {
            "kind": "valent_report",
            "version": __version__,
            "p": self.p,
            "problem": self.problem,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "rho_hat": num(self.rho_hat),
            "tau_hat": num(self.tau_hat),
            "bracket_low": num(self.bracket_low),
            "bracket_high": num(self.bracket_high),
            "conjectured_T": num(self.conjectured_T),
            "conjecture_gap": num(self.tau_hat - self.conjectured_T),
            "flags": self.flags,
            "diagnostics": {k: (num(v) if isinstance(v, mpmath.mpf) else v) for k, v in self.diagnostics.items()},
        }

    def text(self):
        rows = [
            ("p", str(self.p)),
            ("(E-D)/p", f"{self.ratio}"),
            ("order estimate", mpmath.nstr(self.rho_hat, 8)),
            ("1/p", mpmath.nstr(mpmath.mpf(1) / self.p, 8)),
            ("type estimate", mpmath.nstr(self.tau_hat, 8)),
            ("bracket", f"[{mpmath.nstr(self.bracket_low, 8)}, {mpmath.nstr(self.bracket_high, 8)}]"),
            ("conjectured T", mpmath.nstr(self.conjectured_T, 8)),
        ] + [(k, "pass" if v else "FAIL") for k, v in self.flags.items()]
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


DEFAULT_BUDGET = {"n_max": 120, "K": 10_000, "window": 0.5, "check_n": 60, "gp": True}


def full_report(pr, budget=None):
    """Rates to type: every stage is checked and failures carry the stage name.

    Stages: indeterminacy, transform (rates to symmetric coefficients, cross
    checked against the closed form), zero_values, multizeta (the Stieltjes
    ``C`` coefficients ``(-1)^n sigma_n``), growth (order and type at
    ``rho = 1/p``), brackets.
    """
    b = dict(DEFAULT_BUDGET, **(budget or {}))
    stage = "indeterminacy"
    try:
        chk = indeterminacy_check(pr)
        if chk["verdict"] != "indeterminate":
            raise DeterminateProblemError(f"(E-D)/p = {chk['ratio']} is outside (1, p-1): {chk['verdict']}")
        if pr.p < 3:
            raise DeterminateProblemError("p must be at least 3")
        p = pr.p
        stage = "transform"
        nc = b["check_n"]
        sym = jacobi_to_symmetric(rates_to_jacobi(pr.rates(), nc), nc)
        rule = polynomial_bn(pr).beta
        transform_err = max(abs(sym.beta(k) / rule(k) - 1) for k in range(2 * nc + 2))
        if transform_err > mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
            raise PipelineError(stage, f"transformed coefficients deviate by {mpmath.nstr(transform_err, 5)}")
        stage = "zero_values"
        zs = zero_values_polynomial(pr, max(b["n_max"], nc))
        stage = "multizeta"
        res = sigma_n(zs, b["n_max"], b["K"])
        series = CoefficientSeries(
            [(0, 1)] + [(r.n, (-1) ** r.n * r.value) for r in res], name=f"C(p={p})", meta={"problem": pr.to_json(), **_sum_meta(res)}
        )
        stage = "growth"
        rho = mpmath.mpf(1) / p
        oe = order_estimate(series, b["window"])
        te = type_estimate(series, rho, b["window"])
        diag = {
            "rho_raw": oe.rho_raw,
            "tau_raw": te.tau_raw,
            "symmetric_rho_hat": 2 * oe.rho_hat,
            "transform_max_rel_err": transform_err,
            "K_used": res[-1].K_used,
            "max_stability": max(r.stability for r in res),
            "window": list(te.window),
            "c1c2_times_p^p": zs.c1 * zs.c2 * mpmath.mpf(p) ** p,
        }
        if b.get("gp"):
            g = gp_series(p, b["n_max"], b["K"])
            tg = type_estimate(g, rho, b["window"]).tau_hat
            diag["tau_G_over_p"] = tg / p
            diag["pipeline_gap"] = abs(tg / p - te.tau_hat) / te.tau_hat
        stage = "brackets"
        low, high = type_bounds(p)
        T = conjectured_type(p)
        flags = {
            "order": bool(abs(oe.rho_hat * p - 1) <= ORDER_TOL),
            "type_bracket": bool(low * (1 - TYPE_TOL) <= te.tau_hat <= high * (1 + TYPE_TOL)),
            "stability": bool(diag["max_stability"] <= mpmath.mpf("1e-8")),
        }
    except PipelineError:
        raise
    except Exception as exc:  # noqa: BLE001 - re-raised with its stage
        raise PipelineError(stage, f"{type(exc).__name__}: {exc}") from exc
    rep = ValentReport(p, pr.to_json(), chk["ratio"], oe.rho_hat, te.tau_hat, low, high, T, flags, diag, series)
    return rep


def power_problem_series(c, n_max, K, tail="auto"):
    """Stieltjes-type series ``sum (-1)^n sigma_n w^n`` for ``beta_n = (n+1)^c``."""
    zs = zero_values_power(c, n_max)
    res = sigma_n(zs, n_max, K, tail=tail)
    terms = [(0, 1)] + [(r.n, (-1) ** r.n * r.value) for r in res]
    return CoefficientSeries(terms, name=f"power(c={c})", meta=_sum_meta(res))
