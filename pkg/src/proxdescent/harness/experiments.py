"""Experiment drivers: run one config, sweep a parameter grid, compare
against the guided-subgradient baseline, and certify an emitted trace
against reference envelope solves.

Every run owns its oracle, solver state and derived random stream, so sweep
cells and comparison arms are independent of execution order; re-running any
config reproduces all non-timing columns exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .. import baselines
from ..descent import ProxDescentConfig, SolveReport, run as run_prox_descent, telescoping_bounds
from ..oracles import FirstOrderOracle
from ..stationarity import is_to_ms_bound, moreau_reference
from .config import ExperimentConfig
from .traces import TraceRow, read_trace, write_trace


def _prox_descent_config(alg: dict, budget: int) -> ProxDescentConfig:
    return ProxDescentConfig(
        beta=float(alg.get("beta", 0.5)),
        rho=float(alg.get("rho", 1.0)),
        eta_target=float(alg.get("eta_target", 0.0)),
        eps_target=float(alg.get("eps_target", 0.0)),
        max_outer=int(alg.get("max_outer", budget)),
        max_inner_per_step=int(alg.get("max_inner_per_step", 100_000)),
        descent_test_slack=float(alg.get("descent_test_slack", 1e-12)),
    )


def _solve(config: ExperimentConfig, oracle: FirstOrderOracle, x1):
    """Dispatch on algorithm name; returns (report, trace rows)."""
    alg = config.algorithm
    name = alg["name"]
    rows: List[TraceRow] = []

    if name == "prox_descent":
        pd_config = _prox_descent_config(alg, config.budget)
        report = run_prox_descent(oracle, x1, pd_config, max_evaluations=config.budget)
        for rec in report.steps:
            rows.append(
                TraceRow(
                    experiment_id=config.experiment_id,
                    algorithm=name,
                    outer_index=rec.index,
                    cumulative_evaluations=rec.cumulative_evaluations,
                    f_value=rec.f_value,
                    gtilde_norm_sq=rec.gtilde_norm_sq,
                    epsilon=rec.epsilon,
                    inner_count=rec.inner_count,
                    stationarity_proxy=rec.gtilde_norm_sq,
                    wall_time_ms=rec.elapsed_ms,
                )
            )
        return report, rows

    if name == "subgradient":
        schedule = _schedule_from(alg, oracle, config.budget)
        T = min(int(alg.get("steps", config.budget)), config.budget)
        report = baselines.subgradient_method(oracle, x1, schedule, T)
    elif name == "ppm":
        report = baselines.ppm(
            oracle,
            x1,
            alpha=float(alg["alpha"]),
            T=int(alg.get("steps", 100)),
            inner_tol=float(alg.get("inner_tol", 1e-6)),
        )
    elif name == "pgsg":
        T = int(alg["outer"])
        J = int(alg["inner"])
        if T * J > config.budget:
            raise ValueError(f"pgsg split {T}x{J} exceeds the budget {config.budget}")
        report = baselines.pgsg(
            oracle,
            x1,
            rho=float(alg.get("rho", 1.0)),
            T=T,
            J=J,
            paper_sign=bool(alg.get("pgsg_paper_sign", False)),
        )
    else:
        raise ValueError(f"unknown algorithm {name!r}")

    for rec in report.records:
        rows.append(
            TraceRow(
                experiment_id=config.experiment_id,
                algorithm=name,
                outer_index=rec.index,
                cumulative_evaluations=rec.cumulative_evaluations,
                f_value=rec.f_value,
                gtilde_norm_sq=None,
                epsilon=None,
                inner_count=rec.inner_count,
                stationarity_proxy=rec.stationarity,
                wall_time_ms=rec.elapsed_ms,
            )
        )
    return report, rows


def _schedule_from(alg: dict, oracle: FirstOrderOracle, budget: int) -> baselines.StepSchedule:
    sched = alg.get("schedule", {"kind": "constant", "value": 0.01})
    kind = sched.get("kind", "constant")
    if kind == "constant":
        return baselines.StepSchedule.constant(float(sched["value"]))
    if kind == "horizon_constant":
        L = sched.get("L", oracle.lipschitz_L)
        if L is None:
            raise ValueError("horizon_constant schedule needs L (none declared by oracle)")
        horizon = int(sched.get("T", budget))
        return baselines.StepSchedule.horizon_constant(float(sched["delta"]), float(L), horizon)
    raise ValueError(f"unknown subgradient schedule kind {kind!r}")


def run_experiment(
    config: ExperimentConfig,
    output_dir: Optional[str] = None,
    plots: Optional[bool] = None,
):
    """Run one configured experiment; returns (trace path, report).

    Writes ``<experiment_id>.csv`` into the resolved output directory and,
    unless plots are disabled, a rendered ``<experiment_id>.png`` next to it.
    """
    oracle = config.make_oracle()
    x1 = config.start_point(oracle)
    report, rows = _solve(config, oracle, x1)
    out = config.resolve_output_dir(output_dir)
    path = write_trace(out / f"{config.experiment_id}.csv", rows)
    if plots if plots is not None else config.plots:
        from .plots import render_run_figure

        render_run_figure(rows, out / f"{config.experiment_id}.png")
    return path, report


def sweep(
    config: ExperimentConfig,
    beta_grid: Sequence[float],
    rho_grid: Sequence[float],
    output_dir: Optional[str] = None,
    plots: Optional[bool] = None,
):
    """Cartesian (beta, rho) grid of prox_descent runs on one instance.

    Every cell shares the problem data and start point (both derived from the
    config seed) and owns its own solver state.  Returns the summary path and
    the list of per-cell summary dicts; the summary minima are exact minima
    over each cell's trace.
    """
    if config.algorithm["name"] != "prox_descent":
        raise ValueError("sweep drives prox_descent only")
    out = config.resolve_output_dir(output_dir)
    do_plots = plots if plots is not None else config.plots

    cells = []
    cell_rows = {}
    for beta in beta_grid:
        for rho in rho_grid:
            cell = ExperimentConfig(
                seed=config.seed,
                problem=dict(config.problem),
                algorithm={**config.algorithm, "beta": float(beta), "rho": float(rho)},
                budget=config.budget,
                experiment_id=f"{config.experiment_id}_b{beta:g}_r{rho:g}",
                x1=config.x1,
                output_dir=str(out),
                plots=False,
            )
            path, report = run_experiment(cell, output_dir=str(out), plots=False)
            rows = read_trace(path)
            cell_rows[(beta, rho)] = rows
            gt = [r.gtilde_norm_sq for r in rows]
            eps = [r.epsilon for r in rows]
            cells.append(
                {
                    "beta": float(beta),
                    "rho": float(rho),
                    "trace": str(path),
                    "outer_steps": len(rows),
                    "evaluations": rows[-1].cumulative_evaluations,
                    "final_gtilde_norm_sq": gt[-1],
                    "final_epsilon": eps[-1],
                    "min_gtilde_norm_sq": min(gt),
                    "min_epsilon": min(eps),
                }
            )

    summary_path = out / f"{config.experiment_id}_sweep_summary.csv"
    fields = list(cells[0].keys())
    with open(summary_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for cell in cells:
            writer.writerow(cell)
    if do_plots:
        from .plots import render_sweep_figure

        render_sweep_figure(cell_rows, out / f"{config.experiment_id}_sweep.png")
    return summary_path, cells


def compare(
    config: ExperimentConfig,
    splits: Optional[Sequence] = None,
    output_dir: Optional[str] = None,
    plots: Optional[bool] = None,
):
    """prox_descent against guided-subgradient splits under one budget.

    Each pgsg split (T, J) runs T outer rounds of J inner steps; every arm
    gets the same start point and total evaluation budget.  Returns the
    comparison table path and rows (algorithm, outer, inner, total
    evaluations, stationarity = min over the trace of the displacement
    proxy (rho+m)^2 ||x_{k+1}-x_k||^2).
    """
    splits = [(int(t), int(j)) for t, j in (splits if splits is not None else config.pgsg_splits)]
    if not splits:
        raise ValueError("compare needs at least one pgsg (T, J) split")
    for T, J in splits:
        if T * J > config.budget:
            raise ValueError(f"infeasible split {T}x{J}: exceeds budget {config.budget}")
    out = config.resolve_output_dir(output_dir)
    do_plots = plots if plots is not None else config.plots

    rho = float(config.algorithm.get("rho", 10.0))
    table = []
    all_rows = {}

    pd_cell = ExperimentConfig(
        seed=config.seed,
        problem=dict(config.problem),
        algorithm={**config.algorithm, "name": "prox_descent"},
        budget=config.budget,
        experiment_id=f"{config.experiment_id}_prox_descent",
        x1=config.x1,
        output_dir=str(out),
        plots=False,
    )
    path, report = run_experiment(pd_cell, output_dir=str(out), plots=False)
    rows = read_trace(path)
    all_rows["prox_descent"] = rows
    table.append(
        {
            "algorithm": "prox_descent",
            "outer_iterations": len(rows),
            "inner_iterations": "dynamic",
            "total_evaluations": rows[-1].cumulative_evaluations,
            "stationarity": min(r.stationarity_proxy for r in rows),
        }
    )

    for T, J in splits:
        arm = ExperimentConfig(
            seed=config.seed,
            problem=dict(config.problem),
            algorithm={"name": "pgsg", "rho": rho, "outer": T, "inner": J},
            budget=config.budget,
            experiment_id=f"{config.experiment_id}_pgsg_{T}x{J}",
            x1=config.x1,
            output_dir=str(out),
            plots=False,
        )
        path, _ = run_experiment(arm, output_dir=str(out), plots=False)
        rows = read_trace(path)
        all_rows[f"pgsg {T}x{J}"] = rows
        table.append(
            {
                "algorithm": f"pgsg_{T}x{J}",
                "outer_iterations": T,
                "inner_iterations": J,
                "total_evaluations": rows[-1].cumulative_evaluations,
                "stationarity": min(r.stationarity_proxy for r in rows),
            }
        )

    table_path = out / f"{config.experiment_id}_comparison.csv"
    with open(table_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(table[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in table:
            writer.writerow(row)
    if do_plots:
        from .plots import render_compare_figure

        render_compare_figure(all_rows, out / f"{config.experiment_id}_compare.png")
    return table_path, table


def certify(
    trace_path,
    config: ExperimentConfig,
    max_checked: int = 10,
    reference_tol: float = 1e-10,
    output_dir: Optional[str] = None,
):
    """Cross-check a prox_descent trace against reference envelope solves.

    Re-runs the config deterministically to recover the iterate points, then
    at up to ``max_checked`` evenly spaced iterates verifies that the
    reference envelope gradient at alpha = m + rho stays below the bound
    implied by the emitted (eta, eps) certificate, within the reference
    solve's own certified error.  Also checks the two telescoped certificate
    sums over the whole trace.  Returns (report path, result dict); raises
    ``CertificationError`` when any bound fails.
    """
    rows = read_trace(trace_path)
    if rows[0].algorithm != "prox_descent":
        raise ValueError("certification needs a prox_descent trace (others carry no certificate)")
    if config.algorithm["name"] != "prox_descent":
        raise ValueError("config does not describe a prox_descent run")

    oracle = config.make_oracle()
    x1 = config.start_point(oracle)
    pd_config = _prox_descent_config(config.algorithm, config.budget)
    report = run_prox_descent(oracle, x1, pd_config, max_evaluations=config.budget)
    if len(report.steps) != len(rows):
        raise ValueError(
            f"replay produced {len(report.steps)} steps but the trace has {len(rows)};"
            " config does not match the trace"
        )
    for rec, row in zip(report.steps, rows):
        if not np.isclose(rec.f_value, row.f_value, rtol=1e-12, atol=1e-300):
            raise ValueError(f"replay disagrees with the trace at outer index {row.outer_index}")

    m = oracle.weak_convexity_m
    rho = pd_config.rho
    alpha = m + rho
    indices = sorted(set(np.linspace(0, len(rows) - 1, min(max_checked, len(rows)), dtype=int)))

    checks = []
    for i in indices:
        row = rows[i]
        point = report.points[row.outer_index]  # iterate carrying this certificate
        ref = moreau_reference(
            oracle, point, rho_env=alpha, tol=reference_tol, best_effort=True
        )
        bound = is_to_ms_bound(np.sqrt(row.gtilde_norm_sq), max(row.epsilon, 0.0), m, rho)
        solver_error = alpha * ref.prox_distance_bound(alpha, m)
        grad_norm = float(np.linalg.norm(ref.gradient))
        ok = grad_norm <= bound + solver_error + 1e-9 * max(1.0, bound)
        checks.append(
            {
                "outer_index": row.outer_index,
                "gradient_norm": grad_norm,
                "certificate_bound": bound,
                "solver_error": solver_error,
                "reference_gap": ref.certified_gap,
                "satisfied": ok,
            }
        )

    tele = telescoping_bounds(report, m, pd_config)
    slack = 1e-9 * max(1.0, abs(report.f_initial))
    tele_ok = (
        tele["sum_gtilde_sq"] <= tele["gtilde_budget"] + slack
        and tele["sum_epsilon"] <= tele["epsilon_budget"] + slack
    )

    out = config.resolve_output_dir(output_dir)
    path = out / f"{config.experiment_id}_certificate.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(checks[0].keys()), lineterminator="\n")
        writer.writeheader()
        for check in checks:
            writer.writerow(check)

    result = {
        "checks": checks,
        "telescoping_ok": tele_ok,
        "telescoping": tele,
        "certified_index": report.certified_index,
        "all_satisfied": tele_ok and all(c["satisfied"] for c in checks),
    }
    if not result["all_satisfied"]:
        raise CertificationError(f"certificate cross-check failed; details in {path}")
    return path, result


class CertificationError(RuntimeError):
    """A trace failed its reference cross-check."""
