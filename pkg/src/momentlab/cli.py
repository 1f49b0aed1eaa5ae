"""Command-line front end.

Exit codes: 0 success, 2 usage or malformed input, 3 numeric or domain
failure, 4 a ``--gate`` check failed.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import mpmath

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_GATE = 0, 2, 3, 4


class UsageError(Exception):
    pass


class NumericFailure(Exception):
    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


# --------------------------------------------------------------------------
# output


def _csv_text(config, header, rows):
    buf = io.StringIO()
    buf.write(f"# momentlab {__version__}\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(config, body):
    return json.dumps({"version": __version__, "config": config, **body}, indent=1, sort_keys=True) + "\n"


def _text_table(header, rows):
    cols = [header] + [[str(x) for x in r] for r in rows]
    widths = [max(len(c[i]) for c in cols) for i in range(len(header))]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(len(header))) for c in cols) + "\n"


def emit(args, config, header, rows, extra=None):
    fmt = args.format
    if fmt == "csv":
        text = _csv_text(config, header, rows)
    elif fmt == "json":
        text = _json_text(config, {"columns": header, "rows": rows, **(extra or {})})
    else:
        text = f"momentlab {__version__}\n" + _text_table(header, rows)
        if extra:
            text += "\n".join(f"{k}: {v}" for k, v in sorted(extra.items()) if not isinstance(v, (list, dict))) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _num(x, digits=20):
    return mpmath.nstr(x, digits)


def _config(args, *keys):
    cfg = {"command": args.command, "precision_bits": args.precision_bits}
    for k in keys:
        v = getattr(args, k, None)
        cfg[k] = v
    return cfg


# --------------------------------------------------------------------------
# instance parsing


def _fracs(text):
    from fractions import Fraction

    try:
        return tuple(Fraction(x.strip()) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse list {text!r}: {exc}") from exc


def _rates(args):
    from .core import InvalidRatesError, PolynomialRates

    if args.p is None:
        raise UsageError("--p is required")
    if int(args.p) != args.p:
        raise UsageError("--p must be an integer for polynomial rates")
    p = int(args.p)
    try:
        if args.default_symmetric:
            return PolynomialRates.default_symmetric(p)
        if args.e is None or args.d is None:
            raise UsageError("give --e and --d, or --default-symmetric")
        return PolynomialRates(p, _fracs(args.e), _fracs(args.d))
    except InvalidRatesError as exc:
        raise UsageError(str(exc)) from exc


def _require_indeterminate(pr):
    from .core import indeterminacy_check

    chk = indeterminacy_check(pr)
    if chk["verdict"] != "indeterminate" or pr.p < 3:
        raise NumericFailure(
            f"(E-D)/p = {chk['ratio']} gives a {chk['verdict']} problem; nothing to estimate", stage="indeterminacy"
        )
    return chk


# --------------------------------------------------------------------------
# commands


def cmd_multizeta(args):
    from .multizeta import gamma_n, s_n, sigma_n, zeta_n
    from .precision import dec
    from .recurrences import zero_values_polynomial

    kind = args.kind
    if kind in ("gamma", "zeta") and args.p is None:
        raise UsageError("--p is required for --kind gamma/zeta")
    if args.K < 1 or args.n_max < 1:
        raise UsageError("--K and --n-max must be positive")
    if kind == "gamma":
        res = gamma_n(args.p, args.n_max, args.K, tail=args.tail)
    elif kind == "zeta":
        res = zeta_n(args.p, args.n_max, args.K, tail=args.tail)
    elif kind == "s":
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta are required for --kind s")
        res = s_n(args.alpha, args.beta, args.a, args.n_max, args.K, tail=args.tail)
    else:
        pr = _rates(args)
        _require_indeterminate(pr)
        zs = zero_values_polynomial(pr, min(args.n_max, args.K))
        res = sigma_n(zs, args.n_max, args.K, a=args.a, tail=args.tail)
    rows = [[r.n, dec(r.value), r.K_used, _num(r.stability, 6)] for r in res]
    cfg = _config(args, "kind", "p", "alpha", "beta", "a", "e", "d", "default_symmetric", "n_max", "K", "tail")
    emit(args, cfg, ["n", "value", "K_used", "stability"], rows, {"tail_mode": res[0].tail})
    return EXIT_OK


def _valent_job(payload):
    from .core import PolynomialRates
    from .precision import workprec
    from .valent import full_report

    bits, rec, budget = payload
    with workprec(bits):
        rep = full_report(PolynomialRates.from_json(rec), budget)
        return rep.to_json(), rep.passed


def _budget(args):
    return {"n_max": args.n_max, "K": args.K, "window": args.window}


def cmd_valent(args):
    from .valent import FLAGSHIPS, PipelineError
    from .core import PolynomialRates

    if args.flagships:
        instances = list(FLAGSHIPS.values()) + [PolynomialRates.default_symmetric(p) for p in range(3, 7)]
    else:
        pr = _rates(args)
        _require_indeterminate(pr)
        instances = [pr]
    payloads = [(args.precision_bits, pr.to_json(), _budget(args)) for pr in instances]
    try:
        if args.jobs > 1 and len(payloads) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                out = list(ex.map(_valent_job, payloads))
        else:
            out = [_valent_job(x) for x in payloads]
    except PipelineError as exc:
        raise NumericFailure(str(exc), stage=exc.stage) from exc
    header = ["p", "e", "d", "ratio", "rho_hat", "tau_hat", "bracket_low", "bracket_high", "conjectured_T", "passed"]
    rows = [
        [
            r["p"],
            " ".join(r["problem"]["e"]),
            " ".join(r["problem"]["d"]),
            r["ratio"],
            r["rho_hat"],
            r["tau_hat"],
            r["bracket_low"],
            r["bracket_high"],
            r["conjectured_T"],
            ok,
        ]
        for r, ok in out
    ]
    cfg = _config(args, "p", "e", "d", "default_symmetric", "flagships", "n_max", "K", "window")
    emit(args, cfg, header, rows, {"reports": [r for r, _ in out]})
    if args.gate and not all(ok for _, ok in out):
        return EXIT_GATE
    return EXIT_OK


def cmd_growth(args):
    from .growth import CoefficientSeries, InsufficientDataError, order_estimate, type_estimate

    try:
        with open(args.series) as fh:
            rec = json.load(fh)
        s = CoefficientSeries.from_json(rec)
    except (OSError, json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"cannot read series file {args.series!r}: {exc}") from exc
    try:
        oe = order_estimate(s, args.window)
    except InsufficientDataError as exc:
        raise UsageError(str(exc)) from exc
    rho = oe.rho_hat if args.rho is None else mpmath.mpf(args.rho)
    te = type_estimate(s, rho, args.window, args.basis)
    rows = [
        ["rho_hat", _num(oe.rho_hat)],
        ["rho_raw", _num(oe.rho_raw)],
        ["rho_used", _num(rho)],
        ["tau_hat", _num(te.tau_hat)],
        ["tau_raw", _num(te.tau_raw)],
        ["window_lo", te.window[0]],
        ["window_hi", te.window[1]],
    ]
    cfg = _config(args, "series", "rho", "window", "basis")
    extra = {"series_name": s.name}
    if args.format == "json":
        extra["order"] = oe.to_json()
        extra["type"] = te.to_json()
    emit(args, cfg, ["quantity", "value"], rows, extra)
    if args.gate and args.expect_rho is not None:
        if abs(oe.rho_hat / mpmath.mpf(args.expect_rho) - 1) > 0.02:
            return EXIT_GATE
    return EXIT_OK


def cmd_nevanlinna(args):
    from .core import rates_to_jacobi
    from .nevanlinna import m22_exact_coefficients, stieltjes_symmetric_c_check, truncated_product
    from .recurrences import zero_values_polynomial

    pr = _rates(args)
    _require_indeterminate(pr)
    N = args.N
    zs = zero_values_polynomial(pr, max(N, 1), exact=True)
    T = truncated_product(zs, N)
    det_ok = T.det() == [1]
    dp = m22_exact_coefficients(zs, N, N)
    m22_ok = dp[: len(T.C)] == T.C[: len(dp)] and len(dp) >= len(T.C)
    rows = [[k, _num(c, 25)] for k, c in enumerate(T.C)]
    extra = {"determinant_is_one": det_ok, "m22_matches_dp": m22_ok, "degree": len(T.C) - 1}
    ok = det_ok and m22_ok
    if args.c_check:
        j = rates_to_jacobi(pr.rates(), args.c_check)
        ref = zero_values_polynomial(pr, args.c_check)
        chk = stieltjes_symmetric_c_check(j, args.c_check, K=args.K, reference=ref)
        extra["c_check_agree"] = chk["agree"]
        extra["c_check_max_rel_diff"] = _num(max(r["rel_diff"] for r in chk["rows"]), 6)
        ok = ok and chk["agree"]
    cfg = _config(args, "p", "e", "d", "default_symmetric", "N", "c_check", "K")
    emit(args, cfg, ["degree", "C_coefficient"], rows, extra)
    if args.gate and not ok:
        return EXIT_GATE
    return EXIT_OK


def cmd_tc(args):
    from .valent import tc_bracket, tc_conjecture, tc_estimate

    if not args.c > 1:
        raise UsageError("--c must exceed 1")
    g = tc_estimate(args.c, args.n_max, args.K, window=args.window)
    z = tc_estimate(args.c, args.n_max, args.K, window=args.window, source="zeta")
    conj = tc_conjecture(args.c)
    rows = [
        ["T_c_from_gamma", _num(g["T_c"])],
        ["T_c_from_zeta", _num(z["T_c"])],
        ["T_c_conjecture", _num(conj)],
        ["half_T_c_from_gamma", _num(g["T_c"] / 2)],
        ["gamma_zeta_rel_gap", _num(abs(g["T_c"] / z["T_c"] - 1), 6)],
        ["conjecture_rel_gap", _num(abs(g["T_c"] / conj - 1), 6)],
    ]
    ok = abs(g["T_c"] / z["T_c"] - 1) <= 0.05
    if args.c == 2:
        lo, hi = tc_bracket(2)
        rows += [["bracket_low", _num(lo)], ["bracket_high", _num(hi)]]
        half = g["T_c"] / 2
        ok = ok and lo * 0.95 <= half <= hi * 1.05
    cfg = _config(args, "c", "n_max", "K", "window")
    emit(args, cfg, ["quantity", "value"], rows)
    if args.gate and not ok:
        return EXIT_GATE
    return EXIT_OK


def cmd_report(args):
    from .report import write_valent_report
    from .valent import PipelineError, full_report

    pr = _rates(args)
    _require_indeterminate(pr)
    try:
        rep = full_report(pr, _budget(args))
    except PipelineError as exc:
        raise NumericFailure(str(exc), stage=exc.stage) from exc
    cfg = _config(args, "p", "e", "d", "default_symmetric", "n_max", "K", "window")
    cfg["version"] = __version__
    files = write_valent_report(rep, args.outdir, config=cfg)
    sys.stdout.write(rep.text() + "\n")
    sys.stdout.write("wrote " + ", ".join(files) + f" to {args.outdir}\n")
    if args.gate and not rep.passed:
        return EXIT_GATE
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_rates(sp, required_p=True):
    sp.add_argument("--p", type=float, help="rate degree (or weight exponent for multizeta)")
    sp.add_argument("--e", help="comma-separated e_j (rationals like 3/2 allowed)")
    sp.add_argument("--d", help="comma-separated d_j")
    sp.add_argument("--default-symmetric", action="store_true", help="use e_j = p/2, d_j = 0")


def _add_budget(sp, n_max=120, K=10_000):
    sp.add_argument("--n-max", type=int, default=n_max)
    sp.add_argument("--K", type=int, default=K, help="truncation index of the nested sums")
    sp.add_argument("--window", type=float, default=0.5, help="fraction of terms used by the fits")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--out", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    common.add_argument("--gate", action="store_true", help="exit 4 when a check fails")
    common.add_argument("--jobs", type=int, default=1, help="parallel independent instances")

    ap = argparse.ArgumentParser(prog="momentlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"momentlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("multizeta", parents=[common], help="nested sums gamma_n, zeta_n, s_n, sigma_n")
    sp.add_argument("--kind", choices=("gamma", "zeta", "s", "sigma"), default="gamma")
    _add_rates(sp)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--a", type=int, default=1, help="start index")
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--K", type=int, default=1000)
    sp.add_argument("--tail", choices=("auto", "none", "asymptotic"), default="auto")
    sp.set_defaults(func=cmd_multizeta)

    sp = sub.add_parser("valent", parents=[common], help="order and type of a polynomial-rate problem")
    _add_rates(sp)
    sp.add_argument("--flagships", action="store_true", help="run the named instances and e_j=p/2 for p=3..6")
    _add_budget(sp)
    sp.set_defaults(func=cmd_valent)

    sp = sub.add_parser("growth", parents=[common], help="order and type of a series JSON file")
    sp.add_argument("series", help="series JSON file")
    sp.add_argument("--rho", type=float, help="order used for the type (default: estimated)")
    sp.add_argument("--expect-rho", type=float, help="with --gate: required order within 2%%")
    sp.add_argument("--window", type=float, default=0.5)
    sp.add_argument("--basis", choices=("log", "log2", "affine"), default="log")
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("nevanlinna", parents=[common], help="truncated Nevanlinna matrix checks")
    _add_rates(sp)
    sp.add_argument("--N", type=int, default=20, help="number of factor pairs")
    sp.add_argument("--c-check", type=int, default=0, metavar="N", help="also compare C_s with C(z^2) at depth N")
    sp.add_argument("--K", type=int, default=4096)
    sp.set_defaults(func=cmd_nevanlinna)

    sp = sub.add_parser("tc", parents=[common], help="T_c for b_n = n^c")
    sp.add_argument("--c", type=float, default=2.0)
    _add_budget(sp)
    sp.set_defaults(func=cmd_tc)

    sp = sub.add_parser("report", parents=[common], help="full report with CSV plot data and PNG figures")
    _add_rates(sp)
    _add_budget(sp)
    sp.add_argument("--outdir", default="momentlab-report")
    sp.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision_bits < 64:
        ap.print_usage(sys.stderr)
        sys.stderr.write("momentlab: error: --precision-bits must be at least 64\n")
        return EXIT_USAGE
    saved = mpmath.mp.prec
    mpmath.mp.prec = args.precision_bits
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        sys.stderr.write(f"momentlab {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except NumericFailure as exc:
        tag = f"[{exc.stage}] " if exc.stage else ""
        sys.stderr.write(f"momentlab {args.command}: numeric failure: {tag}{exc}\n")
        return EXIT_NUMERIC
    except (ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"momentlab {args.command}: numeric failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    finally:
        mpmath.mp.prec = saved


if __name__ == "__main__":
    sys.exit(main())
