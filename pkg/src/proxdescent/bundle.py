"""Two-cut bundle model of a locally convexified function.

For a center x_k and modulus m, the convex shift f(.) + (m/2)||. - x_k||^2 is
approximated from below by the maximum of two affine cuts: an aggregate cut
that carries the previous subproblem optimum forward, and the newest
subgradient cut.  The proximal subproblem

    min_y  max(cut_1, cut_2)(y) + (rho/2) ||y - x_k||^2

then has an O(n) closed-form solution, which is what makes the inner loop of
the solver cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracles import Evaluation, FirstOrderOracle, Vector, as_point

# Below this relative size, the two cut slopes are treated as parallel and the
# max of the cuts collapses to a single affine function.
DEGENERATE_SLOPE_TOL = 1e-14


@dataclass(frozen=True)
class Cut:
    """Affine minorant l(y) = anchor_value + <slope, y - anchor>."""

    anchor: Vector
    anchor_value: float
    slope: Vector

    def value_at(self, y: Vector) -> float:
        return self.anchor_value + float(self.slope @ (y - self.anchor))


@dataclass(frozen=True)
class EssentialModel:
    """Two-cut lower model of f(.) + (m/2)||. - center||^2 near ``center``.

    ``aggregate_cut`` preserves the previous subproblem optimum and
    ``newest_cut`` carries the latest subgradient information.  After a model
    update both cuts share the anchor of the last trial point, and the
    aggregate slope equals rho * (center - anchor); the very first model of an
    inner loop holds the initial cut in both slots instead.
    """

    center: Vector
    rho: float
    m: float
    aggregate_cut: Cut
    newest_cut: Cut

    def value_at(self, y: Vector) -> float:
        return max(self.aggregate_cut.value_at(y), self.newest_cut.value_at(y))


@dataclass(frozen=True)
class ProxStepOutcome:
    """Solution of the two-cut proximal subproblem.

    ``model_value_at_min`` is the subproblem optimum
    model(minimizer) + (rho/2)||minimizer - center||^2, the running lower
    bound on the envelope value at the center.  ``aggregate_slope`` is
    rho * (center - minimizer), the subgradient of the model at the minimizer.
    """

    minimizer: Vector
    theta: float
    model_value_at_min: float
    aggregate_slope: Vector


def initial_cut(oracle: FirstOrderOracle, center) -> Cut:
    """Tangent cut at the center itself: anchor x_k, value f(x_k), slope in df(x_k)."""
    c = as_point(center, oracle.dimension)
    ev = oracle.evaluate(c)
    return cut_from_evaluation(ev, c, c, oracle.weak_convexity_m)


def subgradient_cut(oracle: FirstOrderOracle, z, center) -> Cut:
    """Cut of the convexified function anchored at a trial point z."""
    c = as_point(center, oracle.dimension)
    p = as_point(z, oracle.dimension)
    ev = oracle.evaluate(p)
    return cut_from_evaluation(ev, p, c, oracle.weak_convexity_m)


def cut_from_evaluation(ev: Evaluation, z: Vector, center: Vector, m: float) -> Cut:
    """Subgradient cut built from an already-computed evaluation at z.

    Anchor value f(z) + (m/2)||z - center||^2 and slope g + m (z - center)
    minorize the convexified function by the weakly convex minorant
    inequality.
    """
    d = z - center
    return Cut(z, ev.value + 0.5 * m * float(d @ d), ev.subgradient + m * d)


def aggregate_cut_from_step(model_value_at_z: float, z, center, rho: float) -> Cut:
    """Aggregation cut anchored at the previous subproblem minimizer z.

    Requires z to be the exact minimizer of the previous prox step, so that
    rho * (center - z) is a subgradient of the old model at z.  The cut keeps
    the next subproblem optimum at least as large as the previous one.
    """
    zp = np.asarray(z, dtype=np.float64)
    cp = np.asarray(center, dtype=np.float64)
    return Cut(zp, float(model_value_at_z), rho * (cp - zp))


def initial_model(
    oracle: FirstOrderOracle, center, rho: float, evaluation: Evaluation = None
) -> EssentialModel:
    """Fresh model for one inner loop: the initial cut duplicated in both slots."""
    c = as_point(center, oracle.dimension)
    if evaluation is None:
        evaluation = oracle.evaluate(c)
    cut0 = cut_from_evaluation(evaluation, c, c, oracle.weak_convexity_m)
    return EssentialModel(c, float(rho), oracle.weak_convexity_m, cut0, cut0)


def prox_step(model: EssentialModel) -> ProxStepOutcome:
    """Closed-form minimizer of model(y) + (rho/2)||y - center||^2.

    With both cuts anchored at the shared point z, slopes s (aggregate) and
    g (newest), and gap = newest_value - aggregate_value at z, the optimal
    convex weight on the newest cut is

        theta* = clamp( rho * gap / ||s - g||^2, [0, 1] ),

    and the minimizer is  y* = center - ((1 - theta*) s + theta* g) / rho.
    When the slopes are (numerically) parallel the max is a single affine
    function; theta* is then set to 1 if the gap is positive and 0 otherwise.
    """
    rho = model.rho
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    agg, new = model.aggregate_cut, model.newest_cut
    anchor_scale = max(1.0, float(np.max(np.abs(agg.anchor))))
    if float(np.max(np.abs(agg.anchor - new.anchor))) > 1e-9 * anchor_scale:
        raise ValueError("cut anchors do not match; model is not in canonical form")

    s, g = agg.slope, new.slope
    gap = new.anchor_value - agg.anchor_value
    diff = g - s
    diff_sq = float(diff @ diff)
    if diff_sq <= DEGENERATE_SLOPE_TOL * max(1.0, float(s @ s), float(g @ g)):
        theta = 1.0 if rho * gap > 0 else 0.0
    else:
        theta = min(1.0, max(0.0, rho * gap / diff_sq))

    slope = (1.0 - theta) * s + theta * g
    minimizer = model.center - slope / rho
    d = minimizer - model.center
    optimum = model.value_at(minimizer) + 0.5 * rho * float(d @ d)
    return ProxStepOutcome(minimizer, theta, optimum, rho * (model.center - minimizer))


def model_update(model: EssentialModel, step: ProxStepOutcome, new_cut: Cut) -> EssentialModel:
    """Advance the model after a null step at ``step.minimizer``.

    The old model is compressed into the aggregation cut at the minimizer and
    ``new_cut`` (the subgradient cut at the same point) becomes the newest
    cut.  The result again minorizes the convexified function at the same
    center.
    """
    y = step.minimizer
    scale = max(1.0, float(np.max(np.abs(y))))
    if float(np.max(np.abs(np.asarray(new_cut.anchor) - y))) > 1e-9 * scale:
        raise ValueError("new cut is not anchored at the prox-step minimizer")
    aggregate = aggregate_cut_from_step(model.value_at(y), y, model.center, model.rho)
    return EssentialModel(model.center, model.rho, model.m, aggregate, new_cut)
