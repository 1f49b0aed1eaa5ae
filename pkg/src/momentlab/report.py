"""Report files: delimited plot data plus rendered figures."""

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import mpmath  # noqa: E402

from .growth import max_modulus, type_values  # noqa: E402


def mpf_(x):
    return mpmath.mpf(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)


def coefficient_rows(series):
    return [(m, mpmath.nstr(c, 30), mpmath.nstr(mpmath.log10(abs(c)), 12)) for m, c in series.nonzero()]


def max_modulus_rows(series, r_list, max_share=mpmath.mpf("1e-8")):
    """``(r, log M(r), last-term share)`` for radii where the truncated series has converged."""
    out = []
    for r in r_list:
        M, last = max_modulus(series, r)
        if last > max_share:
            break
        out.append((mpmath.nstr(mpf_(r), 12), mpmath.nstr(mpmath.log(M), 20), mpmath.nstr(last, 6)))
    return out


def write_valent_report(rep, outdir, r_list=None, config=None):
    """Write ``report.json``, ``report.txt``, three CSV files and three PNG figures.

    Returns the list of files written, relative to ``outdir``.
    """
    os.makedirs(outdir, exist_ok=True)
    s = rep.series
    rho = mpmath.mpf(1) / rep.p
    r_list = r_list or [mpmath.mpf(10) ** (k / 2) for k in range(0, 41)]
    files = []

    coef = coefficient_rows(s)
    _write_csv(os.path.join(outdir, "coefficients.csv"), ["n", "coefficient", "log10_abs"], coef)
    tv = type_values(s, rho)
    _write_csv(os.path.join(outdir, "type_diagnostics.csv"), ["m", "t_m"], [(m, mpmath.nstr(t, 15)) for m, t in tv])
    mm = max_modulus_rows(s, r_list)
    _write_csv(os.path.join(outdir, "max_modulus.csv"), ["r", "log_M", "last_term_share"], mm)
    files += ["coefficients.csv", "type_diagnostics.csv", "max_modulus.csv"]

    payload = {"config": config or {}, "report": rep.to_json()}
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write(rep.text() + "\n")
    files += ["report.json", "report.txt"]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r[0] for r in coef], [float(r[2]) for r in coef], ".", ms=3)
    ax.set_xlabel("n")
    ax.set_ylabel("log10 |coefficient|")
    ax.set_title(f"Stieltjes C coefficients, p={rep.p}")
    _save(fig, os.path.join(outdir, "coefficients.png"))

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([1 / m for m, _ in tv], [float(t) for _, t in tv], ".", ms=3, label="t_m")
    ax.axhline(float(rep.tau_hat), color="C1", label="type estimate")
    ax.axhline(float(rep.conjectured_T), color="C2", ls="--", label="conjectured")
    ax.axhspan(float(rep.bracket_low), float(rep.bracket_high), color="0.9", label="proved bracket")
    ax.set_xlabel("1/m")
    ax.set_ylabel("t_m")
    ax.set_xlim(left=0)
    ax.legend(fontsize=8)
    ax.set_title(f"type extrapolation at order 1/{rep.p}")
    _save(fig, os.path.join(outdir, "type_diagnostics.png"))

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [float(mpmath.log(mpf_(x[0]))) for x in mm]
    ys = [float(mpmath.log(mpf_(x[1]))) if mpf_(x[1]) > 0 else float("nan") for x in mm]
    ax.plot(xs, ys, "o-", ms=3, label="log log M(r)")
    ax.plot(xs, [float(rho) * x + float(mpmath.log(rep.tau_hat)) for x in xs], "--", label="rho log r + log tau")
    ax.set_xlabel("log r")
    ax.set_ylabel("log log M(r)")
    ax.legend(fontsize=8)
    _save(fig, os.path.join(outdir, "max_modulus.png"))
    files += ["coefficients.png", "type_diagnostics.png", "max_modulus.png"]
    return files
