"""Moreau-envelope reference computations and stationarity certificates.

The envelope of an m-weakly convex f at parameter rho_env > m,

    env(x) = min_y f(y) + (rho_env/2) ||y - x||^2,

is computed here by a certified cutting-plane loop on the convexified
function: affine cuts collected at evaluated points form a lower model, any
convex combination of cuts yields a dual-feasible lower bound on the
envelope, and every evaluated point yields an upper bound.  The loop runs
until the sandwich closes to a requested gap; strong convexity then converts
the gap into a prox-point distance bound.  Unlike the solver's inner loop the
reference model keeps several cuts, which is what lets it certify gaps near
machine precision even when the prox point sits on a kink.

All conversions between inexact-subgradient certificates (eta, eps),
envelope-gradient bounds, and the proximal gap live here as pure formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .oracles import FirstOrderOracle, Vector, as_point


class ReferenceSolveError(RuntimeError):
    """The certified envelope solve did not reach the requested gap."""

    def __init__(self, message, achieved_gap=None):
        self.achieved_gap = achieved_gap
        super().__init__(message)


@dataclass
class MoreauResult:
    """Certified envelope solve at one query point.

    ``gradient`` is rho_env * (x - prox_point) for the best evaluated point;
    ``certified_gap`` bounds envelope_value - true envelope from above, and by
    (rho_env - m)-strong convexity the prox point is within
    sqrt(2 gap / (rho_env - m)) of the exact one.
    """

    prox_point: Vector
    envelope_value: float
    gradient: Vector
    certified_gap: float
    lower_bound: float
    center_value: float
    iterations: int
    evaluations: int

    def prox_distance_bound(self, rho_env: float, m: float) -> float:
        return float(np.sqrt(2.0 * max(self.certified_gap, 0.0) / (rho_env - m)))


class _CutBank:
    """Pruned collection of affine cuts of the convexified function.

    Cut i is y -> offsets[i] + <slopes[i], y>.  The dual of the proximal
    subproblem over the cut-max model is a concave quadratic over the
    simplex; ANY feasible weight vector certifies a lower bound on the
    envelope, so inexact dual solves only slow convergence, never break
    correctness.  The dual is solved by a primal active-set method, which
    reaches the exact face optimum in finitely many steps.
    """

    def __init__(self, center: Vector, rho: float, max_cuts: int):
        self.center = center
        self.rho = rho
        self.max_cuts = max_cuts
        self.slopes: list = []
        self.offsets: list = []
        self.weights = np.zeros(0)

    def add(self, anchor: Vector, value: float, slope: Vector):
        self.slopes.append(np.asarray(slope, dtype=np.float64))
        self.offsets.append(float(value) - float(slope @ anchor))
        self.weights = np.concatenate([self.weights, [0.0]]) if self.weights.size else np.ones(1)

    def _dual_data(self):
        G = np.array(self.slopes)
        off = np.array(self.offsets)
        a = off + G @ self.center
        Q = (G @ G.T) / self.rho
        return G, a, Q

    def dual_value_from(self, a, Q, lam) -> float:
        return float(a @ lam - 0.5 * lam @ (Q @ lam))

    def improve_weights(self):
        """Maximize the dual over the simplex by greedy pairwise exchanges.

        Each exchange moves mass from the support index with the smallest
        dual gradient to the index with the largest, by the exactly optimal
        amount.  Feasibility is preserved throughout, so the best value seen
        certifies a lower bound; for a concave quadratic over the simplex,
        no improving exchange left means global optimality.
        """
        G, a, Q = self._dual_data()
        B = a.size
        if B == 1:
            self.weights = np.ones(1)
            return self.weights, self.dual_value_from(a, Q, self.weights)

        lam = np.maximum(self.weights, 0.0)
        total = lam.sum()
        lam = lam / total if total > 0 else np.full(B, 1.0 / B)

        r = a - Q @ lam
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(Q))))
        kkt_tol = 1e-14 * scale
        max_exchanges = 60 * B + 400
        for exchange in range(1, max_exchanges + 1):
            i = int(np.argmax(r))
            support = np.flatnonzero(lam > 0.0)
            j = int(support[np.argmin(r[support])])
            violation = r[i] - r[j]
            if violation <= kkt_tol or i == j:
                break
            curvature = Q[i, i] - 2.0 * Q[i, j] + Q[j, j]
            if curvature > 1e-18 * scale:
                t = min(lam[j], violation / curvature)
            else:
                t = lam[j]  # flat direction: moving all mass still ascends
            lam[i] += t
            lam[j] -= t
            if lam[j] < 1e-17:
                lam[j] = 0.0
            r -= t * (Q[:, i] - Q[:, j])
            if exchange % (2 * B) == 0:  # refresh against drift
                r = a - Q @ lam

        self.weights = lam
        return lam, self.dual_value_from(a, Q, lam)

    def trial_point(self) -> Vector:
        G = np.array(self.slopes)
        gbar = G.T @ self.weights
        return self.center - gbar / self.rho

    def prune(self):
        """Drop low-weight cuts, folding the current mix into one aggregate
        cut so the certified dual value cannot regress."""
        if len(self.slopes) <= self.max_cuts:
            return
        G = np.array(self.slopes)
        off = np.array(self.offsets)
        lam = self.weights
        agg_slope = G.T @ lam
        agg_offset = float(off @ lam)
        order = np.argsort(lam)[::-1][: self.max_cuts - 2]
        keep = sorted(set(order.tolist()) | {len(self.slopes) - 1})
        self.slopes = [self.slopes[i] for i in keep] + [agg_slope]
        self.offsets = [self.offsets[i] for i in keep] + [agg_offset]
        w = np.concatenate([lam[keep], [1.0]])
        self.weights = w / w.sum()


def moreau_reference(
    oracle: FirstOrderOracle,
    x,
    rho_env: float,
    tol: float = 1e-12,
    max_iterations: int = 10_000,
    max_cuts: Optional[int] = None,
    best_effort: bool = False,
) -> MoreauResult:
    """Envelope value, prox point and gradient at ``x``, certified to ``tol``.

    Requires rho_env > m so the subproblem is strongly convex.  Raises
    :class:`ReferenceSolveError` when the iteration budget runs out before
    the sandwich closes; with ``best_effort`` the result is returned anyway
    and ``certified_gap`` reports what was actually achieved.
    """
    m = oracle.weak_convexity_m
    if not rho_env > m:
        raise ValueError(f"rho_env must exceed the modulus m ({rho_env} <= {m})")
    if not tol > 0:
        raise ValueError("tol must be positive")
    center = as_point(x, oracle.dimension)
    rho = rho_env - m  # proximal weight left after convexification

    ev = oracle.evaluate(center)
    evaluations = 1
    center_value = ev.value
    upper = ev.value  # y = x contributes f(x) + 0
    best_point = center

    if max_cuts is None:
        max_cuts = max(64, oracle.dimension + 8)
    bank = _CutBank(center, rho, max_cuts=max_cuts)
    bank.add(center, ev.value, ev.subgradient)  # convexified cut at the center

    lower = -np.inf
    for iteration in range(1, max_iterations + 1):
        _, dual_val = bank.improve_weights()
        lower = max(lower, dual_val)
        if upper - lower <= tol:
            break

        z = bank.trial_point()
        ev = oracle.evaluate(z)
        evaluations += 1
        d = z - center
        candidate = ev.value + 0.5 * rho_env * float(d @ d)
        if candidate < upper:
            upper = candidate
            best_point = z
        conv_value = ev.value + 0.5 * m * float(d @ d)
        bank.add(z, conv_value, ev.subgradient + m * d)
        bank.prune()
    else:
        if not best_effort:
            raise ReferenceSolveError(
                f"gap {upper - lower:.3e} after {max_iterations} iterations (target {tol:.1e})",
                achieved_gap=upper - lower,
            )
        iteration = max_iterations

    return MoreauResult(
        prox_point=best_point,
        envelope_value=upper,
        gradient=rho_env * (center - best_point),
        certified_gap=upper - lower,
        lower_bound=lower,
        center_value=center_value,
        iterations=iteration,
        evaluations=evaluations,
    )


@dataclass(frozen=True)
class StationarityCertificate:
    """Inexact-stationarity pair with its envelope-gradient consequence."""

    eta: float
    eps: float
    alpha: float
    moreau_delta: Optional[float] = None


def is_to_ms_bound(eta: float, eps: float, m: float, lam: float) -> float:
    """Envelope-gradient bound implied by an (eta, eps) certificate.

    For any lam > 0,  ||grad env_{m+lam}(x)|| <= (m+lam)(2 eta/lam +
    sqrt(2 eps/lam)); with lam = m this is 4 eta + 2 sqrt(2 m eps).
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    return (m + lam) * (2.0 * eta / lam + np.sqrt(2.0 * eps / lam))


def ms_to_is_bound(delta: float, alpha: float, m: float, L: float):
    """(eta, eps) pair implied by ||grad env_alpha(x)|| <= delta for L-Lipschitz f."""
    if not alpha > m:
        raise ValueError("alpha must exceed m")
    if L < 0:
        raise ValueError("L must be nonnegative")
    eta = L * delta / alpha
    eps = np.sqrt(2.0 * (alpha - m) * L * delta / alpha)
    return eta, eps


def is_to_grad_bound(eta: float, eps: float, m: float, alpha: float, M: float) -> float:
    """Gradient-norm bound implied by an (eta, eps) certificate for M-smooth f."""
    if not alpha > m:
        raise ValueError("alpha must exceed m")
    if M < 0:
        raise ValueError("M must be nonnegative")
    lam = alpha - m
    return (1.0 + M / alpha) * alpha * (2.0 * eta / lam + np.sqrt(2.0 * eps / lam))


def prox_gap_certificate(delta_k: float, rho: float, m: float) -> StationarityCertificate:
    """Certificate carried by a proximal gap D = f(x) - env_{m+rho}(x).

    The center itself is (sqrt(2 rho D), D)-inexact stationary, and its
    envelope gradient at alpha = m + rho is at most sqrt(2 alpha^2 D / rho).
    """
    if delta_k < 0:
        raise ValueError("the proximal gap must be nonnegative")
    if not rho > 0:
        raise ValueError("rho must be positive")
    alpha = m + rho
    return StationarityCertificate(
        eta=float(np.sqrt(2.0 * rho * delta_k)),
        eps=float(delta_k),
        alpha=alpha,
        moreau_delta=float(np.sqrt(2.0 * alpha**2 * delta_k / rho)),
    )


def qg_moreau_upper_bound(f_w: float, growth_gap: float, dist_w_to_S: float, rho: float) -> float:
    """Upper bound on env_{m+rho}(w) under quadratic growth.

    ``growth_gap`` is f(w) - f* - (m/2) d^2 with d = dist(w, argmin f); the
    bound interpolates along the segment towards the nearest minimizer:
    f(w) - gap + (rho/2) d^2 when gap > rho d^2, else f(w) - gap^2/(2 rho d^2).
    """
    if growth_gap < 0:
        raise ValueError("growth_gap must be nonnegative")
    if not dist_w_to_S > 0:
        raise ValueError("dist_w_to_S must be positive")
    d_sq = dist_w_to_S**2
    if growth_gap > rho * d_sq:
        return f_w - growth_gap + 0.5 * rho * d_sq
    return f_w - growth_gap**2 / (2.0 * rho * d_sq)
