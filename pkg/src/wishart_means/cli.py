"""Command-line entry point for the averaging experiments.

Four commands: ``analytic`` (closed-form bias/risk tables), ``simulate``
(seeded Monte Carlo report for one estimator), ``remark3`` (the canned
diagonal-bias reproduction with self-checked gates) and ``risk-scan`` (the
scalar risk-difference grid). Output is CSV or JSON, reproducible bit for bit
from the recorded configuration and seed; when ``--out`` names a file, a
matplotlib figure is rendered next to it unless ``--no-plot`` is given.

Exit codes: 0 success, 2 configuration error, 3 numeric/domain error,
4 self-check gate failure.
"""

from __future__ import annotations

import math
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from .errors import DomainError, SingularTransformError, UnsupportedDimensionError
from .hpd import HpdMatrix, random_hpd
from .intrinsic import (
    EstimatorKind,
    bias_coefficient,
    intrinsic_bias_arithmetic,
    intrinsic_bias_frechet,
    monte_carlo_bias_risk,
    scalar_risk_arithmetic,
    scalar_risk_frechet,
)
from .reports import csv_table, json_document, report_csv_row, report_to_dict
from .wishart import SeedSpec, WishartModel

DEFAULT_SEED = 1729
# Gate anchors for the remark3 self-check at the reference replication count.
REMARK3_REPLICATIONS = 10_000
REMARK3_DIAG_TOL = 0.004
REMARK3_OFFDIAG_TOL = 0.005


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("WISHART_MEANS_WORKERS", "1")))
    except ValueError:
        return 1


@contextmanager
def _numeric_errors():
    try:
        yield
    except (DomainError, SingularTransformError, OverflowError, RuntimeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)


def _parse_sigma(spec: str, p: int) -> HpdMatrix:
    s = spec.strip()
    if s == "identity":
        return HpdMatrix.identity(p)
    if s.startswith("diagonal:"):
        try:
            values = [float(t) for t in s[len("diagonal:"):].split(",")]
        except ValueError:
            raise click.UsageError(f"cannot parse diagonal sigma spec {spec!r}")
        if len(values) != p:
            raise click.UsageError(
                f"diagonal sigma spec has {len(values)} entries, expected p = {p}"
            )
        if any(v <= 0 for v in values):
            raise click.UsageError("diagonal sigma entries must be positive")
        return HpdMatrix(np.diag(values))
    if s.startswith("random:"):
        try:
            sub_seed = int(s[len("random:"):])
        except ValueError:
            raise click.UsageError(f"cannot parse random sigma spec {spec!r}")
        return random_hpd(p, sub_seed)
    raise click.UsageError(
        f"unknown sigma spec {spec!r}; expected identity, diagonal:<v1,..,vp> "
        f"or random:<seed>"
    )


def _resolve_plot(plot: bool | None, out: str | None) -> bool:
    writes_file = out is not None and out != "-"
    if plot is None:
        return writes_file
    if plot and not writes_file:
        raise click.UsageError("--plot requires --out <path>")
    return plot


def _write_text(text: str, out: str | None) -> None:
    if out is not None and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _plot_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def _output_options(f):
    f = click.option(
        "--plot/--no-plot", "plot", default=None,
        help="Render a figure next to --out (default: on when --out is set).",
    )(f)
    f = click.option("--out", "out", type=click.Path(dir_okay=False, writable=True),
                     default=None, help="Output file; omit or '-' for stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     default="csv", show_default=True, help="Output format.")(f)
    f = click.option("--seed", "seed", type=click.IntRange(0, 2**64 - 1),
                     default=DEFAULT_SEED, show_default=True,
                     help="Master seed for the random streams.")(f)
    return f


@click.group()
@click.version_option(package_name="wishart-means")
def main():
    """Compare Frechet and arithmetic averaging of complex Wishart estimates."""


# ---------------------------------------------------------------------------
# analytic
# ---------------------------------------------------------------------------


@main.command()
@click.option("--p", "p", type=int, default=1, show_default=True, help="Matrix dimension.")
@click.option("--K", "dof", type=int, required=True,
              help="Complex degrees of freedom per estimate.")
@click.option("--N", "n_samples", type=int, default=1, show_default=True,
              help="Number of averaged estimates.")
@click.option("--K-max", "dof_max", type=int, default=None,
              help="Emit one row per K from --K to --K-max.")
@click.option("--N-max", "n_max", type=int, default=None,
              help="Emit one row per N from --N to --N-max.")
@_output_options
def analytic(p, dof, n_samples, dof_max, n_max, seed, fmt, out, plot):
    """Closed-form bias coefficient, intrinsic biases and scalar risks."""
    if n_samples < 1:
        raise click.UsageError("--N must be at least 1")
    want_plot = _resolve_plot(plot, out)
    dof_hi = dof_max if dof_max is not None else dof
    n_hi = n_max if n_max is not None else n_samples
    if dof_hi < dof or n_hi < n_samples:
        raise click.UsageError("--K-max/--N-max must not be below --K/--N")

    rows = []
    with _numeric_errors():
        for k in range(dof, dof_hi + 1):
            for n in range(n_samples, n_hi + 1):
                scalar = p == 1
                rows.append({
                    "p": p, "K": k, "N": n,
                    "bias_coeff": bias_coefficient(k, p),
                    "ibias_frechet": intrinsic_bias_frechet(p, k),
                    "ibias_arithmetic": intrinsic_bias_arithmetic(p, k, n),
                    "risk_frechet": scalar_risk_frechet(k, n) if scalar else None,
                    "risk_arithmetic": scalar_risk_arithmetic(k, n) if scalar else None,
                })

    header = ["p", "K", "N", "bias_coeff", "ibias_frechet", "ibias_arithmetic",
              "risk_frechet", "risk_arithmetic"]
    if fmt == "csv":
        text = csv_table(header, ([r[c] for c in header] for r in rows))
    else:
        text = json_document({
            "command": "analytic",
            "p": p,
            "seed": {"master_seed": seed, "stream_id": 0},
            "rows": rows,
        })
    _write_text(text, out)
    if want_plot:
        from . import plots

        plots.render_analytic(rows, _plot_path(out))


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


@main.command()
@click.option("--estimator", "estimator", type=click.Choice(["frechet", "arithmetic"]),
              required=True, help="Which averaging estimator to simulate.")
@click.option("--p", "p", type=int, default=1, show_default=True, help="Matrix dimension.")
@click.option("--K", "dof", type=int, required=True,
              help="Complex degrees of freedom per estimate.")
@click.option("--N", "n_samples", type=int, default=1, show_default=True,
              help="Number of averaged estimates per replication.")
@click.option("--replications", "replications", type=int, default=1000,
              show_default=True, help="Monte Carlo replications (at least 2).")
@click.option("--sigma", "sigma_spec", default="identity", show_default=True,
              help="True covariance: identity, diagonal:<v1,..,vp> or random:<seed>.")
@click.option("--workers", "workers", type=int, default=None,
              help="Process count for replication fan-out "
                   "[default: WISHART_MEANS_WORKERS or 1].")
@_output_options
def simulate(estimator, p, dof, n_samples, replications, sigma_spec, workers,
             seed, fmt, out, plot):
    """Monte Carlo bias/risk report for one estimator, bit-reproducible."""
    if replications < 2:
        raise click.UsageError("--replications must be at least 2")
    if n_samples < 1:
        raise click.UsageError("--N must be at least 1")
    want_plot = _resolve_plot(plot, out)
    sigma = _parse_sigma(sigma_spec, p)
    n_workers = workers if workers is not None else _default_workers()
    if n_workers < 1:
        raise click.UsageError("--workers must be at least 1")

    with _numeric_errors():
        model = WishartModel(p=p, dof=dof, sigma=sigma)
        report = monte_carlo_bias_risk(
            EstimatorKind(estimator), model, n_samples, replications,
            SeedSpec(seed), workers=n_workers,
        )

    doc = report_to_dict(report, sigma_spec=sigma_spec)
    if fmt == "csv":
        header, row = report_csv_row(report, sigma_spec)
        text = csv_table(header, [row])
    else:
        text = json_document({"command": "simulate", **doc})
    _write_text(text, out)
    if want_plot:
        from . import plots

        plots.render_simulate(doc, _plot_path(out))


# ---------------------------------------------------------------------------
# remark3
# ---------------------------------------------------------------------------


@main.command("remark3")
@click.option("--p", "p", type=int, default=3, show_default=True, help="Matrix dimension.")
@click.option("--K", "dof", type=int, default=20, show_default=True,
              help="Complex degrees of freedom per estimate.")
@click.option("--N", "n_samples", type=int, default=3, show_default=True,
              help="Number of averaged estimates per replication.")
@click.option("--replications", "replications", type=int,
              default=REMARK3_REPLICATIONS, show_default=True)
@click.option("--diag-tol", "diag_tol", type=float, default=None,
              help="Override the diagonal gate (default 0.004, scaled by "
                   "sqrt(10000/replications)).")
@click.option("--offdiag-tol", "offdiag_tol", type=float, default=None,
              help="Override the off-diagonal gate (default 0.005, scaled like "
                   "the diagonal one).")
@click.option("--workers", "workers", type=int, default=None,
              help="Process count for replication fan-out "
                   "[default: WISHART_MEANS_WORKERS or 1].")
@_output_options
def remark3(p, dof, n_samples, replications, diag_tol, offdiag_tol, workers,
            seed, fmt, out, plot):
    """Reproduce the diagonal-bias simulation and self-check its gates.

    Simulates the Frechet mean at the identity covariance, averages the
    log-domain tangents, and checks every diagonal entry against the analytic
    bias coefficient and every off-diagonal mean modulus against (near) zero.
    Exits with status 4 when a gate fails.
    """
    if replications < 2:
        raise click.UsageError("--replications must be at least 2")
    want_plot = _resolve_plot(plot, out)
    n_workers = workers if workers is not None else _default_workers()

    scale = math.sqrt(REMARK3_REPLICATIONS / replications)
    d_tol = diag_tol if diag_tol is not None else REMARK3_DIAG_TOL * scale
    o_tol = offdiag_tol if offdiag_tol is not None else REMARK3_OFFDIAG_TOL * scale

    with _numeric_errors():
        ref = bias_coefficient(dof, p)
        model = WishartModel.identity(p, dof)
        report = monte_carlo_bias_risk(
            EstimatorKind.FRECHET_MEAN, model, n_samples, replications,
            SeedSpec(seed), workers=n_workers,
        )

    tangent = report.mean_tangent_whitened.array
    diag = np.real(np.diag(tangent))
    diag_se = np.sqrt(np.diag(np.asarray(report.entry_variances)) / replications)
    off = tangent - np.diag(np.diag(tangent))
    max_off = float(np.max(np.abs(off))) if p > 1 else 0.0
    diag_ok = bool(np.all(np.abs(diag - ref) <= d_tol))
    off_ok = max_off < o_tol
    passed = diag_ok and off_ok

    summary = {
        "command": "remark3",
        "p": p, "K": dof, "N": n_samples, "replications": replications,
        "seed": {"master_seed": seed, "stream_id": 0},
        "bias_coeff_ref": float(ref),
        "diag_mean": diag.tolist(),
        "diag_se": diag_se.tolist(),
        "max_offdiag_abs": max_off,
        "diag_tol": float(d_tol),
        "offdiag_tol": float(o_tol),
        "passed": passed,
    }
    if fmt == "csv":
        header = ["p", "K", "N", "replications", "master_seed", "stream_id",
                  "bias_coeff_ref"]
        row: list = [p, dof, n_samples, replications, seed, 0, ref]
        for i in range(p):
            header.append(f"diag_mean_{i}")
            row.append(diag[i])
        for i in range(p):
            header.append(f"diag_se_{i}")
            row.append(diag_se[i])
        header += ["max_offdiag_abs", "diag_tol", "offdiag_tol", "passed"]
        row += [max_off, d_tol, o_tol, passed]
        text = csv_table(header, [row])
    else:
        text = json_document({**summary, "report": report_to_dict(report)})
    _write_text(text, out)
    if want_plot:
        from . import plots

        plots.render_remark3(summary, _plot_path(out))
    if not passed:
        click.echo(
            f"gate failure: diag within tol: {diag_ok}, off-diagonal within tol: "
            f"{off_ok}", err=True,
        )
        sys.exit(4)


# ---------------------------------------------------------------------------
# risk-scan
# ---------------------------------------------------------------------------


@main.command("risk-scan")
@click.option("--p", "p", type=int, default=1, show_default=True,
              help="Matrix dimension (the closed-form scan needs p = 1).")
@click.option("--K-min", "dof_min", type=int, default=1, show_default=True)
@click.option("--K-max", "dof_max", type=int, default=50, show_default=True)
@click.option("--N-min", "n_min", type=int, default=2, show_default=True,
              help="Smallest sample count (1 adds the degenerate equal-risk column).")
@click.option("--N-max", "n_max", type=int, default=50, show_default=True)
@_output_options
def risk_scan(p, dof_min, dof_max, n_min, n_max, seed, fmt, out, plot):
    """Scalar Riemannian risk of both estimators over a (K, N) grid.

    Self-checks that the Frechet-mean risk exceeds the arithmetic-mean risk
    at every grid point with N >= 2; exits with status 4 otherwise.
    """
    want_plot = _resolve_plot(plot, out)
    if dof_min < 1 or dof_max < dof_min or n_min < 1 or n_max < n_min:
        raise click.UsageError("invalid grid bounds")
    with _numeric_errors():
        if p != 1:
            raise UnsupportedDimensionError(
                f"risk-scan uses the closed scalar forms and needs p = 1, got {p}"
            )
        ks = np.arange(dof_min, dof_max + 1)
        ns = np.arange(n_min, n_max + 1)
        kk, nn = np.meshgrid(ks, ns, indexing="ij")
        risk_f = scalar_risk_frechet(kk.ravel().astype(float), nn.ravel().astype(float))
        risk_a = scalar_risk_arithmetic(kk.ravel().astype(float), nn.ravel().astype(float))
    diff = (risk_f - risk_a).reshape(kk.shape)
    positive = bool(np.all(diff[:, ns >= 2] > 0.0))

    header = ["K", "N", "risk_frechet", "risk_arithmetic", "risk_difference"]
    flat = zip(kk.ravel(), nn.ravel(), risk_f, risk_a, (risk_f - risk_a))
    if fmt == "csv":
        text = csv_table(header, ([int(k), int(n), rf, ra, d] for k, n, rf, ra, d in flat))
    else:
        text = json_document({
            "command": "risk-scan",
            "p": p, "K_min": dof_min, "K_max": dof_max,
            "N_min": n_min, "N_max": n_max,
            "seed": {"master_seed": seed, "stream_id": 0},
            "rows": [
                {"K": int(k), "N": int(n), "risk_frechet": rf,
                 "risk_arithmetic": ra, "risk_difference": d}
                for k, n, rf, ra, d in flat
            ],
            "all_positive": positive,
        })
    _write_text(text, out)
    if want_plot:
        from . import plots

        plots.render_risk_scan(ks, ns, diff, _plot_path(out))
    if not positive:
        click.echo("gate failure: risk difference not positive on the N >= 2 grid",
                   err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
