"""Delimited and JSON serialization of experiment reports.

CSV output carries a mandatory header row; floats are printed with 17
significant digits so a round-trip through text is lossless. JSON documents
mirror the :class:`~wishart_means.intrinsic.MonteCarloReport` field names.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from .intrinsic import MonteCarloReport

__all__ = [
    "csv_table",
    "format_cell",
    "json_document",
    "matrix_to_json",
    "report_csv_row",
    "report_to_dict",
]


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def csv_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(c) for c in row])
    return buf.getvalue()


def json_document(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=np.complex128)
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def report_to_dict(report: MonteCarloReport, sigma_spec: str | None = None) -> dict:
    """JSON-ready dict mirroring the Monte Carlo report fields."""
    doc = {
        "estimator": report.estimator.value,
        "p": report.p,
        "dof": report.dof,
        "n_samples": report.n_samples,
        "replications": report.replications,
        "seed": {
            "master_seed": report.seed.master_seed,
            "stream_id": report.seed.stream_id,
        },
        "sigma": matrix_to_json(report.sigma),
        "mean_tangent": matrix_to_json(report.mean_tangent),
        "mean_tangent_whitened": matrix_to_json(report.mean_tangent_whitened),
        "entry_variances": np.asarray(report.entry_variances, dtype=float).tolist(),
        "ibias_hat": report.ibias_hat,
        "ibias_se": report.ibias_se,
        "ibias_corrected": report.ibias_corrected,
        "risk_hat": report.risk_hat,
        "risk_se": report.risk_se,
        "variance_sum": report.variance_sum,
        "manifold_expectation": matrix_to_json(report.manifold_expectation),
    }
    if sigma_spec is not None:
        doc["sigma_spec"] = sigma_spec
    return doc


def report_csv_row(report: MonteCarloReport, sigma_spec: str):
    """Single-row flattened CSV schema for a Monte Carlo report.

    Scalar summaries come first, then the mean tangent entries in row-major
    order (real and imaginary parts) and the whitened entry variances.
    """
    header = [
        "estimator", "p", "K", "N", "replications", "master_seed", "stream_id",
        "sigma_spec", "ibias_hat", "ibias_se", "ibias_corrected",
        "risk_hat", "risk_se", "variance_sum",
    ]
    row: list = [
        report.estimator.value, report.p, report.dof, report.n_samples,
        report.replications, report.seed.master_seed, report.seed.stream_id,
        sigma_spec, report.ibias_hat, report.ibias_se, report.ibias_corrected,
        report.risk_hat, report.risk_se, report.variance_sum,
    ]
    mt = report.mean_tangent.array
    ev = np.asarray(report.entry_variances, dtype=float)
    p = report.p
    for i in range(p):
        for j in range(p):
            header += [f"mean_tangent_{i}{j}_re", f"mean_tangent_{i}{j}_im"]
            row += [mt[i, j].real, mt[i, j].imag]
    for i in range(p):
        for j in range(p):
            header.append(f"entry_variance_{i}{j}")
            row.append(ev[i, j])
    return header, row
