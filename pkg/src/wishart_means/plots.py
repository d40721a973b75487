"""Figure rendering for CLI reports (written next to the delimited output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_analytic(rows: list[dict], path) -> None:
    """Intrinsic bias of both estimators across the requested (K, N) grid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = sorted({r["K"] for r in rows})
    frechet = {r["K"]: r["ibias_frechet"] for r in rows}
    ax.plot(ks, [frechet[k] for k in ks], "o-", color="C3", label="Frechet mean")
    for n in sorted({r["N"] for r in rows}):
        sub = {r["K"]: r["ibias_arithmetic"] for r in rows if r["N"] == n}
        ax.plot(ks, [sub[k] for k in ks], "s--", alpha=0.8, label=f"arithmetic mean, N={n}")
    ax.set_xlabel("degrees of freedom K")
    ax.set_ylabel("intrinsic bias")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title(f"Intrinsic bias, p={rows[0]['p']}")
    _save(fig, path)


def render_simulate(report_doc: dict, path) -> None:
    """Mean tangent magnitude and whitened entry variances as heatmaps."""
    mt = np.array(report_doc["mean_tangent"]["real"]) + 1j * np.array(
        report_doc["mean_tangent"]["imag"]
    )
    ev = np.array(report_doc["entry_variances"])
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.4))
    im0 = axes[0].imshow(np.abs(mt), cmap="viridis")
    axes[0].set_title("|mean tangent|")
    fig.colorbar(im0, ax=axes[0], fraction=0.046)
    im1 = axes[1].imshow(ev, cmap="magma")
    axes[1].set_title("entry variances (whitened)")
    fig.colorbar(im1, ax=axes[1], fraction=0.046)
    fig.suptitle(
        f"{report_doc['estimator']} mean, p={report_doc['p']}, K={report_doc['dof']}, "
        f"N={report_doc['n_samples']}, R={report_doc['replications']}",
        fontsize=9,
    )
    _save(fig, path)


def render_remark3(summary: dict, path) -> None:
    """Averaged log-tangent diagonal vs the analytic bias coefficient."""
    diag = np.asarray(summary["diag_mean"])
    se = np.asarray(summary["diag_se"])
    ref = summary["bias_coeff_ref"]
    tol = summary["diag_tol"]
    idx = np.arange(1, diag.size + 1)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.errorbar(idx, diag, yerr=4 * se, fmt="o", capsize=4, label="diagonal mean (4 SE)")
    ax.axhline(ref, color="C3", lw=1.2, label="analytic bias coefficient")
    ax.axhspan(ref - tol, ref + tol, color="C3", alpha=0.12, label="gate")
    ax.set_xticks(idx)
    ax.set_xlabel("diagonal entry")
    ax.set_ylabel("averaged log-tangent")
    ax.set_title(
        f"max |off-diagonal| = {summary['max_offdiag_abs']:.2e} "
        f"(gate {summary['offdiag_tol']:.2e})",
        fontsize=9,
    )
    ax.legend(fontsize=8)
    _save(fig, path)


def render_risk_scan(ks, ns, difference: np.ndarray, path) -> None:
    """Risk difference (Frechet minus arithmetic) over the (K, N) grid."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    mesh = axes[0].pcolormesh(ns, ks, difference, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=axes[0])
    axes[0].set_xlabel("sample count N")
    axes[0].set_ylabel("degrees of freedom K")
    axes[0].set_title("risk(Frechet) - risk(arithmetic)")
    ks = np.asarray(ks)
    for k in ks[np.linspace(0, ks.size - 1, min(4, ks.size), dtype=int)]:
        axes[1].plot(ns, difference[np.searchsorted(ks, k)], label=f"K={k}")
    axes[1].axhline(0.0, color="k", lw=0.8)
    axes[1].set_xlabel("sample count N")
    axes[1].set_ylabel("risk difference")
    axes[1].legend(fontsize=8)
    _save(fig, path)
