"""Reference solvers used for comparison runs.

Three baselines: the plain subgradient method, the exact proximal point
method (each update delegated to the certified envelope solver), and the
deterministic proximally guided subgradient method (a fixed number of inner
subgradient steps on the regularized subproblem per outer round).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .oracles import FirstOrderOracle, Vector, as_point
from .stationarity import moreau_reference


@dataclass(frozen=True)
class StepSchedule:
    """Step-size rule for the subgradient baselines.

    kinds:
      constant          alpha_k = value
      horizon_constant  alpha_k = sqrt(delta / (m L^2 (T+1))), fixed over the
                        horizon T; needs the oracle's modulus m at run time
      pgsg              alpha_j = 2 / (mu (j + 2 + 36 / (gamma^4 mu^4 (j+1))))
                        with j counted from 0 within each inner loop
    """

    kind: str
    value: float = 0.0
    delta: float = 0.0
    lipschitz_L: float = 0.0
    horizon: int = 0
    mu: float = 0.0
    gamma: float = 0.0

    @classmethod
    def constant(cls, value: float) -> "StepSchedule":
        if not value > 0:
            raise ValueError("constant step must be positive")
        return cls(kind="constant", value=float(value))

    @classmethod
    def horizon_constant(cls, delta: float, lipschitz_L: float, horizon: int) -> "StepSchedule":
        if not (delta > 0 and lipschitz_L > 0 and horizon >= 1):
            raise ValueError("horizon_constant needs delta > 0, L > 0, T >= 1")
        return cls(kind="horizon_constant", delta=float(delta), lipschitz_L=float(lipschitz_L), horizon=int(horizon))

    @classmethod
    def pgsg(cls, mu: float, gamma: float) -> "StepSchedule":
        if not (mu > 0 and gamma > 0):
            raise ValueError("pgsg schedule needs mu > 0 and gamma > 0")
        return cls(kind="pgsg", mu=float(mu), gamma=float(gamma))

    def step(self, j: int, weak_convexity_m: Optional[float] = None) -> float:
        """Step size at (0-based) index j."""
        if self.kind == "constant":
            return self.value
        if self.kind == "horizon_constant":
            if weak_convexity_m is None or weak_convexity_m <= 0:
                raise ValueError("horizon_constant schedule needs the modulus m > 0")
            return float(
                np.sqrt(self.delta / (weak_convexity_m * self.lipschitz_L**2 * (self.horizon + 1)))
            )
        if self.kind == "pgsg":
            denom = self.mu * (j + 2 + 36.0 / (self.gamma**4 * self.mu**4 * (j + 1)))
            return 2.0 / denom
        raise ValueError(f"unknown schedule kind {self.kind!r}")


@dataclass(frozen=True)
class BaselineRecord:
    index: int
    f_value: float
    stationarity: float
    cumulative_evaluations: int
    inner_count: int = 1
    elapsed_ms: float = 0.0


@dataclass
class BaselineReport:
    algorithm: str
    records: List[BaselineRecord]
    termination: str
    final_point: Vector
    total_evaluations: int
    points: List[Vector] = field(default_factory=list)


def subgradient_method(
    oracle: FirstOrderOracle, x1, schedule: StepSchedule, T: int
) -> BaselineReport:
    """Exactly T updates x <- x - alpha_k g_k.

    The recorded stationarity column is ||g_k||^2; without a proximal
    parameter there is no displacement-based proxy to report.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    started = time.perf_counter()
    x = as_point(x1, oracle.dimension)
    m = oracle.weak_convexity_m
    records = []
    points = [x.copy()]
    for k in range(1, T + 1):
        ev = oracle.evaluate(x)
        g = ev.subgradient
        records.append(
            BaselineRecord(
                index=k,
                f_value=ev.value,
                stationarity=float(g @ g),
                cumulative_evaluations=k,
                elapsed_ms=1e3 * (time.perf_counter() - started),
            )
        )
        x = x - schedule.step(k - 1, m) * g
        points.append(x.copy())
    return BaselineReport(
        algorithm="subgradient",
        records=records,
        termination="max_outer",
        final_point=x,
        total_evaluations=T,
        points=points,
    )


def ppm(
    oracle: FirstOrderOracle,
    x1,
    alpha: float,
    T: int,
    inner_tol: float = 1e-6,
    max_inner_iterations: int = 10_000,
) -> BaselineReport:
    """Proximal point method with certified inner solves.

    Each update x_{k+1} = argmin_y f(y) + (alpha/2)||y - x_k||^2 is computed
    by the reference envelope solver; ``inner_tol`` is the certified bound on
    ||x_{k+1} - exact prox point||, enforced through the duality gap and
    (alpha - m)-strong convexity.  The stationarity column records
    alpha^2 ||x_{k+1} - x_k||^2, the squared envelope gradient at x_k up to
    the inner tolerance.
    """
    m = oracle.weak_convexity_m
    if not alpha > m:
        raise ValueError(f"alpha must exceed the modulus m ({alpha} <= {m})")
    if T < 1:
        raise ValueError("T must be >= 1")
    started = time.perf_counter()
    x = as_point(x1, oracle.dimension)
    gap_tol = 0.5 * inner_tol**2 * (alpha - m)
    records = []
    points = [x.copy()]
    evaluations = 0
    for k in range(1, T + 1):
        res = moreau_reference(
            oracle, x, rho_env=alpha, tol=gap_tol, max_iterations=max_inner_iterations
        )
        evaluations += res.evaluations
        new = res.prox_point
        step = new - x
        records.append(
            BaselineRecord(
                index=k,
                f_value=res.center_value,
                stationarity=alpha**2 * float(step @ step),
                cumulative_evaluations=evaluations,
                inner_count=res.evaluations,
                elapsed_ms=1e3 * (time.perf_counter() - started),
            )
        )
        x = new
        points.append(x.copy())
    return BaselineReport(
        algorithm="ppm",
        records=records,
        termination="max_outer",
        final_point=x,
        total_evaluations=evaluations,
        points=points,
    )


def pgsg(
    oracle: FirstOrderOracle,
    x1,
    rho: float,
    T: int,
    J: int,
    paper_sign: bool = False,
) -> BaselineReport:
    """Deterministic proximally guided subgradient method.

    Each outer round runs exactly J subgradient steps on the regularized
    objective f(.) + (rho/2)||. - x_k||^2 with the pgsg schedule
    (mu = rho, gamma = 1/(rho + m)), then recenters at the last inner
    iterate.  The update direction is the descent direction x - alpha v;
    ``paper_sign`` flips it to the ascent form x + alpha v for auditing.
    The stationarity column records (rho + m)^2 ||x_{k+1} - x_k||^2.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    if T < 1 or J < 1:
        raise ValueError("T and J must be >= 1")
    m = oracle.weak_convexity_m
    schedule = StepSchedule.pgsg(mu=rho, gamma=1.0 / (rho + m))
    sign = 1.0 if paper_sign else -1.0

    started = time.perf_counter()
    x = as_point(x1, oracle.dimension)
    records = []
    points = [x.copy()]
    evaluations = 0
    for k in range(1, T + 1):
        y = x.copy()
        f_center = None
        for j in range(J):
            ev = oracle.evaluate(y)
            evaluations += 1
            if j == 0:
                f_center = ev.value
            v = ev.subgradient + rho * (y - x)
            y = y + sign * schedule.step(j) * v
        step = y - x
        records.append(
            BaselineRecord(
                index=k,
                f_value=f_center,
                stationarity=(rho + m) ** 2 * float(step @ step),
                cumulative_evaluations=evaluations,
                inner_count=J,
                elapsed_ms=1e3 * (time.perf_counter() - started),
            )
        )
        x = y
        points.append(x.copy())
    return BaselineReport(
        algorithm="pgsg",
        records=records,
        termination="max_outer",
        final_point=x,
        total_evaluations=evaluations,
        points=points,
    )
