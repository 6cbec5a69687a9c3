"""First-order oracle abstraction for weakly convex functions.

A function f is m-weakly convex when f + (m/2)||.||^2 is convex.  Every
subgradient of such a function supplies a global concave-quadratic
under-estimator,

    f(y) >= f(x) + <g, y - x> - (m/2) ||y - x||^2    for all y,

which is the contract the solvers in this package rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Vector = np.ndarray


@dataclass(frozen=True)
class Evaluation:
    """Function value and one subgradient at a query point."""

    value: float
    subgradient: Vector


def as_point(x, dimension: Optional[int] = None) -> Vector:
    """Coerce ``x`` to a finite float64 vector, optionally checking its length."""
    p = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"point must be a 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    if dimension is not None and p.size != dimension:
        raise ValueError(f"dimension mismatch: expected {dimension}, got {p.size}")
    return p


class FirstOrderOracle:
    """Black-box access to an m-weakly convex function.

    ``func`` maps a point to ``(value, subgradient)``.  Evaluation must be
    deterministic: identical input yields an identical pair.  The declared
    modulus ``weak_convexity_m`` promises the minorant inequality above for
    every returned subgradient.

    Optional constants (``lipschitz_L``, ``smoothness_M``,
    ``optimal_value_hint``) are metadata used by schedules, certificates and
    tests; they do not change evaluation.
    """

    def __init__(
        self,
        dimension: int,
        func: Callable[[Vector], tuple],
        weak_convexity_m: float,
        *,
        lipschitz_L: Optional[float] = None,
        smoothness_M: Optional[float] = None,
        optimal_value_hint: Optional[float] = None,
        name: str = "",
    ):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        if weak_convexity_m < 0:
            raise ValueError("weak_convexity_m must be nonnegative")
        if lipschitz_L is not None and lipschitz_L < 0:
            raise ValueError("lipschitz_L must be nonnegative")
        if smoothness_M is not None and smoothness_M < 0:
            raise ValueError("smoothness_M must be nonnegative")
        self.dimension = int(dimension)
        self.weak_convexity_m = float(weak_convexity_m)
        self.lipschitz_L = lipschitz_L
        self.smoothness_M = smoothness_M
        self.optimal_value_hint = optimal_value_hint
        self.name = name
        self._func = func

    def evaluate(self, x) -> Evaluation:
        """Return f(x) and one subgradient of f at x."""
        p = as_point(x, self.dimension)
        value, subgradient = self._func(p)
        value = float(value)
        g = np.asarray(subgradient, dtype=np.float64)
        if not np.isfinite(value):
            raise ValueError(f"oracle '{self.name}' returned a non-finite value at {p}")
        if g.shape != (self.dimension,) or not np.all(np.isfinite(g)):
            raise ValueError(f"oracle '{self.name}' returned a bad subgradient at {p}")
        return Evaluation(value, g)

    def __repr__(self):
        return (
            f"FirstOrderOracle(name={self.name!r}, dimension={self.dimension}, "
            f"m={self.weak_convexity_m})"
        )


def convexify(oracle: FirstOrderOracle, center) -> FirstOrderOracle:
    """Shift ``oracle`` into the convex function f(.) + (m/2)||. - center||^2.

    The returned oracle declares modulus zero.  Its value at y equals
    f(y) + (m/2)||y - center||^2 and its subgradient equals g + m (y - center)
    for g a subgradient of f at y.
    """
    c = as_point(center, oracle.dimension)
    m = oracle.weak_convexity_m

    def shifted(y: Vector):
        ev = oracle.evaluate(y)
        d = y - c
        return ev.value + 0.5 * m * float(d @ d), ev.subgradient + m * d

    smooth = None if oracle.smoothness_M is None else oracle.smoothness_M + m
    return FirstOrderOracle(
        oracle.dimension,
        shifted,
        weak_convexity_m=0.0,
        smoothness_M=smooth,
        name=f"convexified({oracle.name})",
    )
