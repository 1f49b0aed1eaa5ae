"""Order, type and indicator of entire functions from Taylor coefficients.

Both growth constants are limsups, and the raw ratios converge like
``1/log m``. Each estimator therefore returns a regression value (used for
decisions) next to the raw tail supremum (kept as a diagnostic).

Order: with ``c_m ~ C (e rho tau / m)^(m/rho) m^b`` one has
``log(1/|c_m|) = A m log m + B m + b' log m + c' + O(1/m)`` with ``A = 1/rho``.

Type: ``t_m = m |c_m|^(rho/m) / (e rho)`` satisfies
``log t_m = log tau + x log m / m + y / m + O(1/m^2)``, so the intercept of a
fit on ``{1, log m / m, 1/m}`` gives ``log tau``.
"""

import json
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from .precision import dec, mpf, workprec


class InsufficientDataError(ValueError):
    pass


class UnstableEvaluation(ArithmeticError):
    pass


MIN_TERMS = 20


@dataclass
class CoefficientSeries:
    """Terms ``(exponent, coefficient)`` of ``f(z) = sum c_m z^m``, exponents increasing."""

    terms: list
    name: str = "series"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = [(int(m), mpf(c)) for m, c in self.terms]
        ms = [m for m, _ in self.terms]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("exponents must be strictly increasing")
        for m, c in self.terms:
            if not mpmath.isfinite(c):
                raise ValueError(f"coefficient at exponent {m} is not finite")

    @classmethod
    def from_coefficients(cls, coeffs, exponents=None, name="series", meta=None):
        exponents = range(len(coeffs)) if exponents is None else exponents
        return cls(list(zip(exponents, coeffs)), name, dict(meta or {}))

    def nonzero(self):
        return [(m, c) for m, c in self.terms if c != 0 and m > 0]

    def scaled(self, lam):
        """Coefficients ``c_m lam^m``, i.e. ``f(lam z)``."""
        lam = mpf(lam)
        return CoefficientSeries([(m, c * lam**m) for m, c in self.terms], self.name, dict(self.meta))

    def __call__(self, z):
        z = mpmath.mpmathify(z)
        return mpmath.fsum(c * z**m for m, c in self.terms)

    def to_json(self):
        return {"name": self.name, "terms": [[m, dec(c)] for m, c in self.terms], "meta": self.meta}

    @classmethod
    def from_json(cls, rec):
        if not isinstance(rec, dict) or "terms" not in rec:
            raise ValueError("series JSON needs a 'terms' array")
        return cls([(int(m), mpmath.mpf(c)) for m, c in rec["terms"]], rec.get("name", "series"), rec.get("meta", {}))

    def dumps(self):
        return json.dumps(self.to_json(), indent=1)


@dataclass
class GrowthEstimate:
    rho_hat: object = None
    tau_hat: object = None
    rho_raw: object = None
    tau_raw: object = None
    rho_used: object = None
    rho_diag: list = field(default_factory=list)
    tau_diag: list = field(default_factory=list)
    window: tuple = ()
    residual: object = None

    def to_json(self):
        num = lambda x: None if x is None else mpmath.nstr(x, 20)
        return {
            "rho_hat": num(self.rho_hat),
            "tau_hat": num(self.tau_hat),
            "rho_raw": num(self.rho_raw),
            "tau_raw": num(self.tau_raw),
            "rho_used": num(self.rho_used),
            "window": list(self.window),
            "residual": num(self.residual),
            "rho_diag": [[m, mpmath.nstr(x, 12)] for m, x in self.rho_diag],
            "tau_diag": [[m, mpmath.nstr(x, 12)] for m, x in self.tau_diag],
        }


def _window(pairs, frac):
    if len(pairs) < MIN_TERMS:
        raise InsufficientDataError(f"need at least {MIN_TERMS} nonzero terms, got {len(pairs)}")
    lo = int(len(pairs) * (1 - frac))
    lo = min(lo, len(pairs) - 4)
    return pairs[lo:]


def least_squares(rows, rhs):
    """Coefficients and RMS residual of an overdetermined linear fit, at working precision."""
    A = mpmath.matrix(rows)
    b = mpmath.matrix(rhs)
    x, res = mpmath.qr_solve(A, b)
    return [x[i] for i in range(A.cols)], res / mpmath.sqrt(len(rhs))


def order_estimate(s, window=0.5):
    """``rho_hat`` from the regression, ``rho_raw`` the tail sup of ``m log m / log(1/|c_m|)``."""
    pairs = s.nonzero()
    win = _window(pairs, window)
    rows, rhs, diag = [], [], []
    for m, c in win:
        mm = mpmath.mpf(m)
        y = -mpmath.log(abs(c))
        rows.append([mm * mpmath.log(mm), mm, mpmath.log(mm), 1])
        rhs.append(y)
    for m, c in pairs:
        y = -mpmath.log(abs(c))
        if m > 1 and y > 0:
            diag.append((m, m * mpmath.log(m) / y))
    coef, res = least_squares(rows, rhs)
    if not coef[0] > 0:
        raise InsufficientDataError("regression gave a nonpositive growth coefficient")
    lo = win[0][0]
    tail = [x for m, x in diag if m >= lo]
    return GrowthEstimate(
        rho_hat=1 / coef[0],
        rho_raw=max(tail) if tail else None,
        rho_diag=diag,
        window=(lo, win[-1][0]),
        residual=res,
    )


TYPE_BASES = {
    "log": lambda m: [1, mpmath.log(m) / m, 1 / m],
    "log2": lambda m: [1, mpmath.log(m) / m, 1 / m, mpmath.log(m) ** 2 / m**2, mpmath.log(m) / m**2, 1 / m**2],
    "affine": lambda m: [1, 1 / m],
}


def type_values(s, rho):
    """``(m, t_m)`` with ``t_m = m |c_m|^(rho/m) / (e rho)`` over the nonzero terms."""
    rho = mpf(rho)
    out = []
    for m, c in s.nonzero():
        mm = mpmath.mpf(m)
        out.append((m, mm * mpmath.exp(rho * mpmath.log(abs(c)) / mm) / (mpmath.e * rho)))
    return out


def type_estimate(s, rho, window=0.5, basis="log"):
    """``tau_hat`` by extrapolating ``t_m`` to ``m = infinity``.

    ``basis="log"`` fits ``log t_m`` on ``{1, log m/m, 1/m}``; ``"affine"``
    fits ``t_m`` itself on ``{1, 1/m}``.
    """
    rho = mpf(rho)
    if not (rho > 0 and mpmath.isfinite(rho)):
        raise ValueError(f"rho must be positive and finite, got {rho}")
    if basis not in TYPE_BASES:
        raise ValueError(f"unknown basis {basis!r}")
    tv = type_values(s, rho)
    win = _window(tv, window)
    f = TYPE_BASES[basis]
    rows = [f(mpmath.mpf(m)) for m, _ in win]
    if basis == "affine":
        rhs = [t for _, t in win]
        coef, res = least_squares(rows, rhs)
        tau = coef[0]
    else:
        rhs = [mpmath.log(t) for _, t in win]
        coef, res = least_squares(rows, rhs)
        tau = mpmath.exp(coef[0])
    return GrowthEstimate(
        tau_hat=tau,
        tau_raw=max(t for _, t in win),
        rho_used=rho,
        tau_diag=tv,
        window=(win[0][0], win[-1][0]),
        residual=res,
    )


def estimate(s, rho=None, window=0.5, basis="log"):
    """Order and type together; the type uses ``rho`` when given, else ``rho_hat``."""
    o = order_estimate(s, window)
    t = type_estimate(s, o.rho_hat if rho is None else rho, window, basis)
    o.tau_hat, o.tau_raw, o.rho_used, o.tau_diag = t.tau_hat, t.tau_raw, t.rho_used, t.tau_diag
    return o


def max_modulus(s, r):
    """``sum |c_m| r^m`` and the relative size of its last term (truncation record)."""
    r = mpf(r)
    terms = [abs(c) * r**m for m, c in s.terms]
    total = mpmath.fsum(terms)
    return total, (terms[-1] / total if total else mpmath.mpf(0))


def log_canonical_product(x, s, N=None):
    """``log prod_{n>=1} (1 + x n^-s)`` for ``x >= 0``, ``s > 1``.

    Direct sum to ``N`` (where ``x N^-s <= 1/4``) then the power-series tail
    ``sum_j (-1)^(j+1) x^j / j * sum_{n>N} n^(-j s)``.
    """
    from .special import power_tail

    x, s = mpf(x), mpf(s)
    if not s > 1:
        raise ValueError("canonical product diverges for s <= 1")
    if N is None:
        N = max(16, int(mpmath.ceil((4 * x) ** (1 / s))) + 1)
    head = mpmath.fsum(mpmath.log1p(x * mpmath.mpf(n) ** (-s)) for n in range(1, N + 1))
    q = x * mpmath.mpf(N + 1) ** (-s)
    eps = mpmath.mpf(2) ** (-mp.prec)
    tail = mpmath.mpf(0)
    j = 1
    while True:
        term = (-1) ** (j + 1) * x**j / j * power_tail(j * s, N + 1)
        tail += term
        if abs(term) < eps * (abs(tail) + abs(head)) or q**j < eps:
            break
        j += 1
    return head + tail


def indicator_estimate(s, rho, thetas, r_list, guard_digits=10):
    """``log|f(r e^(i theta))| / r^rho`` at the largest numerically stable ``r`` per ``theta``.

    Stability: the ratio ``sum |c_m| r^m / |f|`` measures cancellation; a
    point is stable when it costs fewer than ``digits - guard_digits`` digits
    and the last retained term is below ``10^-guard_digits`` of the total.
    Exploratory output only.
    """
    rho = mpf(rho)
    budget = mp.dps - guard_digits
    cut = mpmath.mpf(10) ** -guard_digits
    out = []
    for th in thetas:
        best = None
        for r in sorted(r_list):
            mod, last = max_modulus(s, r)
            if last > cut:
                break
            z = mpmath.mpf(r) * mpmath.expj(mpf(th))
            val = s(z)
            lost = mpmath.log10(mod / abs(val)) if val != 0 else mpmath.inf
            if lost < budget:
                best = {"theta": th, "r": r, "h": mpmath.log(abs(val)) / mpmath.mpf(r) ** rho, "digits_lost": lost, "stable": True}
        if best is None:
            best = {"theta": th, "r": None, "h": None, "digits_lost": None, "stable": False}
        out.append(best)
    return out


def exponent_of_convergence(b, n_min, n_max, window=0.5, drift_tol=0.05, resid_tol=0.01):
    """``E(b) = 1/s`` from the fit ``log b_n = s log n + t log log n + c``.

    The ``log log n`` column absorbs slowly varying factors such as
    ``log^2 n``. ``low_confidence`` is set when the plain local slopes of the
    two halves of the window differ by more than ``drift_tol`` after
    removing the fitted slowly varying part, when the RMS residual exceeds
    ``resid_tol``, or when only the plain log-log fit gives a positive slope.
    """
    ns = list(range(max(n_min, 3), n_max + 1))
    lo = ns[int(len(ns) * (1 - window))]
    win = [n for n in ns if n >= lo]
    logb = {n: mpmath.log(mpf(b(n))) for n in win}
    rows = [[mpmath.log(n), mpmath.log(mpmath.log(n)), 1] for n in win]
    rhs = [logb[n] for n in win]
    (slope, t, c), res = least_squares(rows, rhs)
    fallback = not slope > 0
    if fallback:
        (slope, c), res = least_squares([[r[0], 1] for r in rows], rhs)
        t = mpmath.mpf(0)
        if not slope > 0:
            raise ValueError("sequence does not grow like a power of n")
    half = len(win) // 2

    def local(ix):
        n0, n1 = win[ix[0]], win[ix[1]]
        adj = lambda n: logb[n] - t * mpmath.log(mpmath.log(n))
        return (adj(n1) - adj(n0)) / (mpmath.log(n1) - mpmath.log(n0))

    s1, s2 = local((0, half)), local((half, len(win) - 1))
    drift = abs(s1 - s2) / abs(slope)
    low = fallback or drift > drift_tol or res > resid_tol
    return {"E": 1 / slope, "slope": slope, "loglog_coeff": t, "residual": res, "drift": drift, "low_confidence": bool(low)}


def canonical_type_reference(rho):
    """``pi / sin(pi rho)``: type of ``prod (1 + z / n^(1/rho))`` at order ``rho``."""
    rho = mpf(rho)
    if not (0 < rho < 1):
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return mpmath.pi / mpmath.sin(mpmath.pi * rho)


def calibration_series(kappa, n_terms, even=True):
    """``sum z^(2n) / (n!)^(2 kappa)`` (or ``z^n`` when ``even`` is false), ``n = 0..n_terms-1``."""
    kappa = mpf(kappa)
    terms = []
    for n in range(n_terms):
        c = mpmath.exp(-2 * kappa * mpmath.loggamma(n + 1))
        terms.append((2 * n if even else n, c))
    return CoefficientSeries(terms, name=f"calibration(kappa={mpmath.nstr(kappa, 6)})", meta={"kappa": dec(kappa)})


def exp_series_coefficients(n_terms):
    return CoefficientSeries([(m, 1 / mpmath.factorial(m)) for m in range(n_terms)], name="exp")


def canonical_product_series(rho, n_terms, N=None):
    """Taylor coefficients of ``prod_{n>=1} (1 + z n^(-1/rho))``.

    Elementary symmetric functions of ``x_n = n^(-1/rho)`` from the power sums
    ``zeta(j / rho)`` by Newton's identities.
    """
    from .special import zeta

    s = 1 / mpf(rho)
    if not s > 1:
        raise ValueError("canonical product needs rho < 1")
    # the alternating recursion cancels about log2(1/e_n) ~ s n log2 n bits
    extra = int(s * n_terms * mpmath.log(n_terms + 1, 2)) + 64
    with workprec(mp.prec + extra):
        P = [None] + [zeta(j * s) for j in range(1, n_terms)]
        e = [mpmath.mpf(1)]
        for n in range(1, n_terms):
            acc = mpmath.mpf(0)
            for i in range(1, n + 1):
                acc += (-1) ** (i - 1) * e[n - i] * P[i]
            e.append(acc / n)
    e = [+x for x in e]
    return CoefficientSeries(list(enumerate(e)), name=f"canonical(rho={mpmath.nstr(rho, 6)})")
