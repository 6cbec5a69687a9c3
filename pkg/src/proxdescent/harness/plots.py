"""Figure rendering for the report path.

Static files only: each driver drops a PNG next to its CSV.  The CSV stays
the canonical artifact; figures are a convenience view of the same rows.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .traces import TraceRow


def _positive(values):
    return [v if v is not None and v > 0 else None for v in values]


def render_run_figure(rows: List[TraceRow], path) -> Path:
    """Objective and stationarity proxy against cumulative evaluations."""
    evals = [r.cumulative_evaluations for r in rows]
    fig, (ax_f, ax_s) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax_f.plot(evals, [r.f_value for r in rows], lw=1.2)
    ax_f.set_xlabel("evaluations")
    ax_f.set_ylabel("objective value")
    station = [r.stationarity_proxy for r in rows]
    if any(s > 0 for s in station):
        ax_s.semilogy(evals, [max(s, 1e-300) for s in station], lw=1.2)
    else:
        ax_s.plot(evals, station, lw=1.2)
    ax_s.set_xlabel("evaluations")
    ax_s.set_ylabel("stationarity proxy")
    title = f"{rows[0].experiment_id} ({rows[0].algorithm})"
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def render_sweep_figure(cell_rows: Dict[tuple, List[TraceRow]], path) -> Path:
    """Sensitivity grid: one column per beta, rho as curves.

    Top row tracks the squared certificate norm, bottom row the inexactness,
    both against outer iterations on a log scale.
    """
    betas = sorted({b for b, _ in cell_rows})
    rhos = sorted({r for _, r in cell_rows})
    fig, axes = plt.subplots(2, len(betas), figsize=(3.2 * len(betas), 6), squeeze=False)
    for col, beta in enumerate(betas):
        for rho in rhos:
            rows = cell_rows[(beta, rho)]
            ks = [r.outer_index for r in rows]
            axes[0][col].semilogy(
                ks, [max(r.gtilde_norm_sq, 1e-300) for r in rows], lw=1.0, label=f"rho={rho:g}"
            )
            axes[1][col].semilogy(
                ks, [max(r.epsilon, 1e-300) for r in rows], lw=1.0, label=f"rho={rho:g}"
            )
        axes[0][col].set_title(f"beta={beta:g}")
        axes[1][col].set_xlabel("outer iteration")
    axes[0][0].set_ylabel("||gtilde||^2")
    axes[1][0].set_ylabel("inexactness")
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def render_compare_figure(all_rows: Dict[str, List[TraceRow]], path) -> Path:
    """Stationarity proxy against evaluations for each comparison arm."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, rows in all_rows.items():
        ax.semilogy(
            [r.cumulative_evaluations for r in rows],
            [max(r.stationarity_proxy, 1e-300) for r in rows],
            lw=1.1,
            label=label,
        )
    ax.set_xlabel("evaluations")
    ax.set_ylabel("stationarity proxy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)
