"""Benchmark problem generators and toy test functions.

The generated instances are interpolation problems (the objective vanishes at
the planted signal) with exact weak-convexity moduli:

  phase retrieval      f(x)    = mean_i |<a_i, x>^2 - b_i|,   m = 2 mean ||a_i||^2
  blind deconvolution  f(x, y) = mean_i |<u_i, x><v_i, y> - b_i|,
                                 m = mean |<u_i, v_i>|

Blind deconvolution treats (x, y) as one stacked vector of length 2d, so
every solver applies unchanged.  Instances can be written to and read back
from a flat text format so runs are replayable without re-drawing data.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .oracles import FirstOrderOracle, Vector
from .rng import RngStream


@dataclass(frozen=True)
class PhaseRetrievalInstance:
    vectors: np.ndarray  # (n, d), row i is a_i
    measurements: np.ndarray  # (n,)
    ground_truth: Vector  # (d,), drawn from the unit sphere
    weak_convexity: float
    seed: int

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class BlindDeconvInstance:
    left_vectors: np.ndarray  # (n, d), row i is u_i
    right_vectors: np.ndarray  # (n, d), row i is v_i
    measurements: np.ndarray  # (n,)
    ground_truth: Vector  # (2d,), stacked (x_bar, y_bar)
    weak_convexity: float
    seed: int

    @property
    def d(self) -> int:
        return self.left_vectors.shape[1]

    @property
    def n(self) -> int:
        return self.left_vectors.shape[0]


def phase_retrieval_oracle(instance: PhaseRetrievalInstance) -> FirstOrderOracle:
    A = instance.vectors
    b = instance.measurements
    n = instance.n

    def fn(x: Vector):
        ax = A @ x
        residual = ax * ax - b
        signs = np.sign(residual)  # 0 at exact fit: a valid selection at the kink
        value = float(np.abs(residual).mean())
        grad = (2.0 / n) * (A.T @ (signs * ax))
        return value, grad

    return FirstOrderOracle(
        instance.d,
        fn,
        weak_convexity_m=instance.weak_convexity,
        optimal_value_hint=0.0,
        name=f"phase_retrieval(d={instance.d},n={n},seed={instance.seed})",
    )


def blind_deconv_oracle(instance: BlindDeconvInstance) -> FirstOrderOracle:
    U = instance.left_vectors
    V = instance.right_vectors
    b = instance.measurements
    n, d = instance.n, instance.d

    def fn(z: Vector):
        x, y = z[:d], z[d:]
        ux = U @ x
        vy = V @ y
        residual = ux * vy - b
        signs = np.sign(residual)
        value = float(np.abs(residual).mean())
        grad = np.concatenate([U.T @ (signs * vy), V.T @ (signs * ux)]) / n
        return value, grad

    return FirstOrderOracle(
        2 * d,
        fn,
        weak_convexity_m=instance.weak_convexity,
        optimal_value_hint=0.0,
        name=f"blind_deconv(d={d},n={n},seed={instance.seed})",
    )


def gen_phase_retrieval(d: int, n: int, seed: int):
    """Gaussian data, unit-sphere ground truth, exact measurements b_i = <a_i, x*>^2."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    stream = RngStream(seed)
    A = stream.standard_normal(n * d).reshape(n, d)
    truth = stream.unit_sphere(d)
    b = (A @ truth) ** 2
    m = 2.0 * float(np.mean(np.sum(A * A, axis=1)))
    instance = PhaseRetrievalInstance(A, b, truth, m, int(seed))
    return instance, phase_retrieval_oracle(instance)


def gen_blind_deconv(d: int, n: int, seed: int):
    """Gaussian data, unit-sphere ground-truth pair, b_i = <u_i, x*><v_i, y*>."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    stream = RngStream(seed)
    U = stream.standard_normal(n * d).reshape(n, d)
    V = stream.standard_normal(n * d).reshape(n, d)
    xbar = stream.unit_sphere(d)
    ybar = stream.unit_sphere(d)
    b = (U @ xbar) * (V @ ybar)
    m = float(np.mean(np.abs(np.sum(U * V, axis=1))))
    instance = BlindDeconvInstance(U, V, b, np.concatenate([xbar, ybar]), m, int(seed))
    return instance, blind_deconv_oracle(instance)


@dataclass(frozen=True)
class ToyFunction:
    """Closed-form test function with its declared constants.

    ``qg_modulus`` is a quadratic-growth constant valid around the minimizer
    set; ``minimizers`` describes that set.
    """

    kind: str
    dimension: int
    mu: float
    m: float
    lipschitz_L: Optional[float]
    smoothness_M: Optional[float]
    optimal_value: float
    qg_modulus: Optional[float]
    minimizers: str

    def oracle(self) -> FirstOrderOracle:
        fn = _TOY_FUNCS[self.kind](self.dimension, self.mu)
        return FirstOrderOracle(
            self.dimension,
            fn,
            weak_convexity_m=self.m,
            lipschitz_L=self.lipschitz_L,
            smoothness_M=self.smoothness_M,
            optimal_value_hint=self.optimal_value,
            name=f"toy:{self.kind}(d={self.dimension})",
        )


def _abs_fn(dimension, mu):
    def fn(x):
        t = float(x[0])
        return abs(t), np.array([np.sign(t)])

    return fn


def _abs_quadratic_fn(dimension, mu):
    def fn(x):
        t = float(x[0])
        r = t * t - 1.0
        return abs(r), np.array([2.0 * t * np.sign(r)])

    return fn


def _quadratic_fn(dimension, mu):
    def fn(x):
        return 0.5 * mu * float(x @ x), mu * x

    return fn


def _smooth_qg_fn(dimension, mu):
    def fn(x):
        g = 10.0 * x.copy()
        g[0] -= np.sin(x[0])
        return 5.0 * float(x @ x) + float(np.cos(x[0])), g

    return fn


_TOY_FUNCS = {
    "abs": _abs_fn,
    "abs_quadratic": _abs_quadratic_fn,
    "quadratic": _quadratic_fn,
    "smooth_qg": _smooth_qg_fn,
}


def toy_function(kind: str, dimension: int = 1, mu: float = 1.0) -> ToyFunction:
    """Descriptor for one of the built-in test functions.

    abs            |t|                         m=0, L=1,  f*=0, argmin {0}
    abs_quadratic  |t^2 - 1|                   m=2,       f*=0, argmin {-1, 1}
    quadratic      (mu/2)||x||^2               m=0, M=mu, f*=0, argmin {0}
    smooth_qg      5||x||^2 + cos(x_1)         m=1, M=11, f*=1, argmin {0}

    The one-dimensional kinds ignore ``dimension``; smooth_qg grows
    quadratically with modulus 9 and abs/abs_quadratic are listed without a
    quadratic-growth constant (their growth near the minimizers is sharp).
    """
    if kind in ("abs", "abs_quadratic"):
        dimension = 1
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if kind == "abs":
        return ToyFunction(kind, 1, mu, 0.0, 1.0, None, 0.0, None, "{0}")
    if kind == "abs_quadratic":
        return ToyFunction(kind, 1, mu, 2.0, None, None, 0.0, None, "{-1, +1}")
    if kind == "quadratic":
        if not mu > 0:
            raise ValueError("quadratic kind needs mu > 0")
        return ToyFunction(kind, dimension, mu, 0.0, None, mu, 0.0, mu, "{0}")
    if kind == "smooth_qg":
        return ToyFunction(kind, dimension, 1.0, 1.0, None, 11.0, 1.0, 9.0, "{0}")
    raise ValueError(f"unknown toy kind {kind!r}")


def toy(kind: str, dimension: int = 1, mu: float = 1.0) -> FirstOrderOracle:
    """Oracle for a built-in test function; see :func:`toy_function`."""
    return toy_function(kind, dimension, mu).oracle()


def box_subgradient_estimate(
    oracle: FirstOrderOracle, radius: float, samples: int, stream: RngStream
) -> float:
    """Largest sampled subgradient norm over the centered box [-radius, radius]^d.

    Diagnostic only: phase retrieval and blind deconvolution are not globally
    Lipschitz, so this box-restricted estimate stands in where a scale for L
    is useful (plots, schedule sanity checks), never for correctness.
    """
    top = 0.0
    for _ in range(samples):
        x = radius * (2.0 * stream.uniform(oracle.dimension) - 1.0)
        g = oracle.evaluate(x).subgradient
        top = max(top, float(np.linalg.norm(g)))
    return top


# ---------------------------------------------------------------------------
# Flat text export / import, %.17g so float64 round-trips exactly.

def _fmt_row(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.atleast_1d(values))


def save_instance(path, instance) -> None:
    """Write an instance to a flat key/value + array text file."""
    lines = []
    if isinstance(instance, PhaseRetrievalInstance):
        lines.append("family phase_retrieval")
        lines.append(f"d {instance.d}")
        lines.append(f"n {instance.n}")
        lines.append(f"seed {instance.seed}")
        lines.append(f"weak_convexity {instance.weak_convexity:.17g}")
        lines.append("ground_truth " + _fmt_row(instance.ground_truth))
        lines.append("measurements " + _fmt_row(instance.measurements))
        for row in instance.vectors:
            lines.append("vector " + _fmt_row(row))
    elif isinstance(instance, BlindDeconvInstance):
        lines.append("family blind_deconvolution")
        lines.append(f"d {instance.d}")
        lines.append(f"n {instance.n}")
        lines.append(f"seed {instance.seed}")
        lines.append(f"weak_convexity {instance.weak_convexity:.17g}")
        lines.append("ground_truth " + _fmt_row(instance.ground_truth))
        lines.append("measurements " + _fmt_row(instance.measurements))
        for row in instance.left_vectors:
            lines.append("left " + _fmt_row(row))
        for row in instance.right_vectors:
            lines.append("right " + _fmt_row(row))
    else:
        raise TypeError(f"cannot save instance of type {type(instance).__name__}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_instance(path):
    """Read an instance written by :func:`save_instance`."""
    fields = {}
    arrays = {"vector": [], "left": [], "right": []}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        if key in arrays:
            arrays[key].append(np.array([float(v) for v in rest.split()]))
        else:
            fields[key] = rest
    family = fields.get("family")
    seed = int(fields["seed"])
    m = float(fields["weak_convexity"])
    truth = np.array([float(v) for v in fields["ground_truth"].split()])
    b = np.array([float(v) for v in fields["measurements"].split()])
    if family == "phase_retrieval":
        return PhaseRetrievalInstance(np.array(arrays["vector"]), b, truth, m, seed)
    if family == "blind_deconvolution":
        return BlindDeconvInstance(
            np.array(arrays["left"]), np.array(arrays["right"]), b, truth, m, seed
        )
    raise ValueError(f"unknown instance family {family!r} in {path}")


def oracle_for_instance(instance) -> FirstOrderOracle:
    if isinstance(instance, PhaseRetrievalInstance):
        return phase_retrieval_oracle(instance)
    if isinstance(instance, BlindDeconvInstance):
        return blind_deconv_oracle(instance)
    raise TypeError(f"no oracle for {type(instance).__name__}")
