"""Proximal descent method for m-weakly convex minimization.

Outer loop: inexact proximal point steps.  Inner loop: two-cut bundle null
steps at a fixed center x_k until the trial point z passes the descent test

    f(x_k) - ( f(z) + (m/2)||z - x_k||^2 )  >=  beta ( f(x_k) - model(z) ).

Each accepted trial carries an explicit certificate: gtilde = alpha (x_k - z)
with alpha = m + rho is an eps-inexact subgradient of f at z, where eps is
the model gap at z.  Termination is certified once ||gtilde|| <= eta_target
and eps <= eps_target hold at the same iterate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .bundle import (
    EssentialModel,
    cut_from_evaluation,
    initial_model,
    model_update,
    prox_step,
)
from .oracles import Evaluation, FirstOrderOracle, Vector, as_point

# A computed model gap more negative than this (relative) threshold means a
# cut failed to minorize the convexified function, i.e. the declared modulus
# m is too small for the function at hand.
MINORANT_VIOLATION_TOL = 1e-8


class WeakConvexityViolation(RuntimeError):
    """A bundle cut exceeded the convexified function: declared m is too small."""

    def __init__(self, center, trial, gap):
        self.center = np.asarray(center)
        self.trial = np.asarray(trial)
        self.gap = float(gap)
        super().__init__(
            "model cut fails to minorize the convexified function "
            f"(gap {gap:.3e} at trial {self.trial} for center {self.center}); "
            "the oracle's declared weak_convexity_m is too small"
        )


class InnerBudgetExhausted(RuntimeError):
    """The inner loop hit max_inner_per_step before the descent test passed."""

    def __init__(self, center, iterations, trace):
        self.center = np.asarray(center)
        self.iterations = iterations
        self.trace = trace
        super().__init__(
            f"descent test still failing after {iterations} inner iterations "
            f"at center {self.center}"
        )


class EvaluationBudgetExceeded(RuntimeError):
    """The evaluation budget ran out mid inner loop."""

    def __init__(self, message, evaluations_spent=0):
        self.evaluations_spent = evaluations_spent
        super().__init__(message)


@dataclass
class ProxDescentConfig:
    """Parameters of the solver.

    ``beta`` in (0,1) relaxes the required decrease, ``rho`` is the proximal
    parameter; together with the oracle's modulus m they set alpha = m + rho.
    ``eta_target``/``eps_target`` define the joint stopping certificate.
    ``descent_test_slack`` is a relative tolerance that keeps floating-point
    ties from looping forever; it is far below any certified accuracy.
    """

    beta: float
    rho: float
    eta_target: float = 0.0
    eps_target: float = 0.0
    max_outer: int = 1000
    max_inner_per_step: int = 100_000
    descent_test_slack: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0,1), got {self.beta}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.eta_target < 0 or self.eps_target < 0:
            raise ValueError("targets must be nonnegative")
        if self.max_outer < 1 or self.max_inner_per_step < 1:
            raise ValueError("iteration limits must be positive")
        if self.descent_test_slack < 0:
            raise ValueError("descent_test_slack must be nonnegative")

    def alpha(self, weak_convexity_m: float) -> float:
        return weak_convexity_m + self.rho


def descent_test(
    f_center: float,
    f_trial_convexified: float,
    model_value_at_trial: float,
    beta: float,
    slack: float = 0.0,
) -> bool:
    """Accept the trial when realized decrease covers beta of the model decrease.

    The slack is relative to max(1, |f_center|) and guards against
    floating-point ties only.
    """
    lhs = f_center - f_trial_convexified
    rhs = beta * (f_center - model_value_at_trial)
    return lhs >= rhs - slack * max(1.0, abs(f_center))


@dataclass(frozen=True)
class InnerRecord:
    """One inner iteration: subproblem optimum, model gap and slope norms.

    ``eta`` is the subproblem optimum produced by the prox step,
    ``gap`` the model gap at its minimizer (the candidate inexactness),
    ``s_norm`` the aggregate slope norm, and ``slope_gap_norm`` the distance
    between the new subgradient-cut slope and the aggregate slope.
    """

    eta: float
    gap: float
    s_norm: float
    slope_gap_norm: float
    theta: float


@dataclass
class DescentStepResult:
    """Accepted trial of one outer step together with its certificate."""

    trial: Vector
    gtilde: Vector
    inexactness: float
    inner_iterations: int
    inner_trace: List[InnerRecord]
    trial_value: float
    trial_subgradient: Vector
    max_cut_slope_norm: float
    evaluations: int


def prox_descent_step(
    oracle: FirstOrderOracle,
    center,
    config: ProxDescentConfig,
    center_eval: Optional[Evaluation] = None,
    max_evaluations: Optional[int] = None,
) -> DescentStepResult:
    """Run null steps from ``center`` until the descent test accepts a trial.

    ``center_eval`` lets the caller reuse an evaluation already paid for at
    the center (the outer loop does this, so each inner iteration costs
    exactly one oracle evaluation).  ``max_evaluations`` bounds the number of
    evaluations this call may spend.
    """
    c = as_point(center, oracle.dimension)
    m = oracle.weak_convexity_m
    rho = config.rho
    alpha = config.alpha(m)

    evaluations = 0
    if center_eval is None:
        center_eval = oracle.evaluate(c)
        evaluations += 1
    f_center = center_eval.value

    model = initial_model(oracle, c, rho, center_eval)
    max_slope = float(np.linalg.norm(model.newest_cut.slope))
    trace: List[InnerRecord] = []

    for j in range(1, config.max_inner_per_step + 1):
        if max_evaluations is not None and evaluations >= max_evaluations:
            raise EvaluationBudgetExceeded(
                f"evaluation budget exhausted after {j - 1} inner iterations",
                evaluations_spent=evaluations,
            )
        step = prox_step(model)
        z = step.minimizer
        ev = oracle.evaluate(z)
        evaluations += 1

        d = z - c
        f_trial_convexified = ev.value + 0.5 * m * float(d @ d)
        model_at_trial = model.value_at(z)
        gap = f_trial_convexified - model_at_trial
        if gap < -MINORANT_VIOLATION_TOL * max(1.0, abs(f_trial_convexified)):
            raise WeakConvexityViolation(c, z, gap)

        new_slope = ev.subgradient + m * d
        max_slope = max(max_slope, float(np.linalg.norm(new_slope)))
        trace.append(
            InnerRecord(
                eta=step.model_value_at_min,
                gap=gap,
                s_norm=float(np.linalg.norm(step.aggregate_slope)),
                slope_gap_norm=float(np.linalg.norm(new_slope - step.aggregate_slope)),
                theta=step.theta,
            )
        )

        if descent_test(
            f_center, f_trial_convexified, model_at_trial, config.beta, config.descent_test_slack
        ):
            return DescentStepResult(
                trial=z,
                gtilde=alpha * (c - z),
                inexactness=gap,
                inner_iterations=j,
                inner_trace=trace,
                trial_value=ev.value,
                trial_subgradient=ev.subgradient,
                max_cut_slope_norm=max_slope,
                evaluations=evaluations,
            )

        new_cut = cut_from_evaluation(ev, z, c, m)
        model = model_update(model, step, new_cut)

    raise InnerBudgetExhausted(c, config.max_inner_per_step, trace)


@dataclass(frozen=True)
class OuterRecord:
    """Completed outer step k: new iterate value and its certificate."""

    index: int
    f_value: float
    gtilde_norm_sq: float
    epsilon: float
    inner_count: int
    cumulative_evaluations: int
    elapsed_ms: float = 0.0


@dataclass
class SolveReport:
    """Full trace of one solver run."""

    steps: List[OuterRecord]
    termination: str  # certified | max_outer | inner_budget_exhausted | eval_budget
    certified_index: Optional[int]
    f_initial: float
    final_point: Vector
    final_value: float
    total_evaluations: int
    points: List[Vector] = field(default_factory=list)  # x_1, x_2, ...
    step_details: List[DescentStepResult] = field(default_factory=list)

    @property
    def best_gtilde_norm_sq(self) -> float:
        return min((r.gtilde_norm_sq for r in self.steps), default=np.inf)

    @property
    def best_epsilon(self) -> float:
        return min((r.epsilon for r in self.steps), default=np.inf)


def run(
    oracle: FirstOrderOracle,
    x1,
    config: ProxDescentConfig,
    max_evaluations: Optional[int] = None,
    keep_details: bool = True,
) -> SolveReport:
    """Drive descent steps from ``x1`` until certified or out of budget.

    Each outer step starts its inner loop from a fresh initial cut at the new
    center, reusing the evaluation already made at that point.  The run stops
    at the first iterate whose certificate satisfies both targets jointly, at
    ``max_outer``, on inner-budget exhaustion, or when ``max_evaluations``
    oracle calls have been spent.
    """
    started = time.perf_counter()
    x = as_point(x1, oracle.dimension)
    center_eval = oracle.evaluate(x)
    evaluations = 1
    f_initial = center_eval.value

    steps: List[OuterRecord] = []
    details: List[DescentStepResult] = []
    points: List[Vector] = [x.copy()]
    termination = "max_outer"
    certified_index = None

    for k in range(1, config.max_outer + 1):
        remaining = None if max_evaluations is None else max_evaluations - evaluations
        try:
            result = prox_descent_step(
                oracle, x, config, center_eval=center_eval, max_evaluations=remaining
            )
        except EvaluationBudgetExceeded as exc:
            termination = "eval_budget"
            evaluations += exc.evaluations_spent
            break
        except InnerBudgetExhausted:
            termination = "inner_budget_exhausted"
            evaluations += config.max_inner_per_step
            break

        evaluations += result.evaluations
        x = result.trial
        center_eval = Evaluation(result.trial_value, result.trial_subgradient)
        gnorm_sq = float(result.gtilde @ result.gtilde)
        steps.append(
            OuterRecord(
                index=k,
                f_value=result.trial_value,
                gtilde_norm_sq=gnorm_sq,
                epsilon=result.inexactness,
                inner_count=result.inner_iterations,
                cumulative_evaluations=evaluations,
                elapsed_ms=1e3 * (time.perf_counter() - started),
            )
        )
        points.append(x.copy())
        if keep_details:
            details.append(result)

        if np.sqrt(gnorm_sq) <= config.eta_target and result.inexactness <= config.eps_target:
            termination = "certified"
            certified_index = k
            break

    return SolveReport(
        steps=steps,
        termination=termination,
        certified_index=certified_index,
        f_initial=f_initial,
        final_point=x,
        final_value=center_eval.value,
        total_evaluations=evaluations,
        points=points,
        step_details=details,
    )


def telescoping_bounds(report: SolveReport, oracle_m: float, config: ProxDescentConfig):
    """Aggregate certificate sums against their telescoped budget.

    Returns a dict with the two partial sums and the bounds
    sum ||gtilde||^2 <= 2 alpha^2 (f(x_1) - f_T) / (m + beta rho) and
    sum eps <= (1 - beta)/beta (f(x_1) - f_T), valid over any run prefix.
    """
    alpha = config.alpha(oracle_m)
    f_last = report.steps[-1].f_value if report.steps else report.f_initial
    drop = report.f_initial - f_last
    return {
        "sum_gtilde_sq": sum(r.gtilde_norm_sq for r in report.steps),
        "gtilde_budget": 2.0 * alpha**2 * drop / (oracle_m + config.beta * config.rho),
        "sum_epsilon": sum(r.epsilon for r in report.steps),
        "epsilon_budget": (1.0 - config.beta) / config.beta * drop,
    }
