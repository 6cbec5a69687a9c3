"""Command line interface.

    proxdescent run <config.yaml> [--output-dir DIR] [--no-plots]
    proxdescent sweep <config.yaml> --beta 0.25 0.5 0.75 --rho 0.1 1 10
    proxdescent compare <config.yaml> [--splits 100x1000 250x400 ...]
    proxdescent certify <trace.csv> <config.yaml> [--tol 1e-10]

Exit code 0 on success; any error state (bad config, infeasible split,
inner-budget exhaustion, failed certification) exits nonzero with a
diagnostic on stderr.  PROXDESCENT_OUTPUT_DIR overrides the output
directory from the environment.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .experiments import CertificationError, certify, compare, run_experiment, sweep


def _parse_split(text: str):
    try:
        t, j = text.lower().split("x")
        return int(t), int(j)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"split must look like 250x400, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxdescent",
        description="Weakly convex solvers: run, sweep, compare, certify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None)
    p_run.add_argument("--no-plots", action="store_true")

    p_sweep = sub.add_parser("sweep", help="run a (beta, rho) grid")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--beta", type=float, nargs="+", required=True)
    p_sweep.add_argument("--rho", type=float, nargs="+", required=True)
    p_sweep.add_argument("--output-dir", default=None)
    p_sweep.add_argument("--no-plots", action="store_true")

    p_cmp = sub.add_parser("compare", help="prox_descent vs pgsg splits")
    p_cmp.add_argument("config")
    p_cmp.add_argument("--splits", type=_parse_split, nargs="+", default=None)
    p_cmp.add_argument("--output-dir", default=None)
    p_cmp.add_argument("--no-plots", action="store_true")

    p_cert = sub.add_parser("certify", help="cross-check a trace against reference solves")
    p_cert.add_argument("trace")
    p_cert.add_argument("config")
    p_cert.add_argument("--tol", type=float, default=1e-10)
    p_cert.add_argument("--output-dir", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
            path, report = run_experiment(
                config, output_dir=args.output_dir, plots=not args.no_plots
            )
            print(f"trace: {path}")
            print(f"termination: {report.termination}  evaluations: {report.total_evaluations}")
            if report.certified_index is not None:
                print(f"certified at outer index {report.certified_index}")
            if report.termination == "inner_budget_exhausted":
                print("error: inner iteration budget exhausted before a descent step", file=sys.stderr)
                return 3
            return 0

        if args.command == "sweep":
            config = load_config(args.config)
            summary, cells = sweep(
                config, args.beta, args.rho, output_dir=args.output_dir, plots=not args.no_plots
            )
            print(f"summary: {summary}")
            for cell in cells:
                print(
                    f"  beta={cell['beta']:g} rho={cell['rho']:g} "
                    f"final ||gtilde||^2={cell['final_gtilde_norm_sq']:.3e} "
                    f"final eps={cell['final_epsilon']:.3e}"
                )
            return 0

        if args.command == "compare":
            config = load_config(args.config)
            table_path, table = compare(
                config, splits=args.splits, output_dir=args.output_dir, plots=not args.no_plots
            )
            print(f"table: {table_path}")
            for row in table:
                print(
                    f"  {row['algorithm']:>16}  outer={row['outer_iterations']:>6} "
                    f"inner={row['inner_iterations']:>8}  total={row['total_evaluations']:>8}  "
                    f"stationarity={row['stationarity']:.3e}"
                )
            return 0

        if args.command == "certify":
            config = load_config(args.config)
            path, result = certify(
                args.trace, config, reference_tol=args.tol, output_dir=args.output_dir
            )
            print(f"certificate report: {path}")
            for check in result["checks"]:
                status = "ok" if check["satisfied"] else "VIOLATED"
                print(
                    f"  k={check['outer_index']:>6}  |grad env|={check['gradient_norm']:.3e}  "
                    f"bound={check['certificate_bound']:.3e}  {status}"
                )
            print(f"telescoping sums: {'ok' if result['telescoping_ok'] else 'VIOLATED'}")
            if result["certified_index"] is not None:
                print(f"run certified at outer index {result['certified_index']}")
            return 0
    except CertificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
