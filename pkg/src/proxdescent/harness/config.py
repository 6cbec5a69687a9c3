"""Experiment configuration: one YAML file describes problem, algorithm, budget.

Example::

    experiment_id: pr20          # optional, derived when absent
    seed: 1
    problem:
      family: phase_retrieval    # phase_retrieval | blind_deconvolution | toy
      d: 20
      n: 60
    algorithm:
      name: prox_descent         # prox_descent | subgradient | ppm | pgsg
      beta: 0.5
      rho: 1.0
    budget: 20000                # total oracle evaluations
    x1: [3.0]                    # optional explicit start
    output_dir: runs             # PROXDESCENT_OUTPUT_DIR overrides
    pgsg_splits: [[100, 1000], [250, 400]]   # used by `compare`

All randomness (data, ground truth, default start point) derives from
``seed``, so re-running a config reproduces every non-timing output exactly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from ..oracles import FirstOrderOracle
from ..problems import gen_blind_deconv, gen_phase_retrieval, toy_function
from ..rng import RngStream

OUTPUT_DIR_ENV = "PROXDESCENT_OUTPUT_DIR"

_FAMILIES = ("phase_retrieval", "blind_deconvolution", "toy")
_ALGORITHMS = ("prox_descent", "subgradient", "ppm", "pgsg")


@dataclass
class ExperimentConfig:
    seed: int
    problem: dict
    algorithm: dict
    budget: int
    experiment_id: str = ""
    x1: Optional[list] = None
    output_dir: str = "runs"
    plots: bool = True
    pgsg_splits: list = field(default_factory=list)

    def __post_init__(self):
        family = self.problem.get("family")
        if family not in _FAMILIES:
            raise ValueError(f"problem.family must be one of {_FAMILIES}, got {family!r}")
        name = self.algorithm.get("name")
        if name not in _ALGORITHMS:
            raise ValueError(f"algorithm.name must be one of {_ALGORITHMS}, got {name!r}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if family == "toy":
            if "kind" not in self.problem:
                raise ValueError("toy problems need problem.kind")
        else:
            for key in ("d", "n"):
                if int(self.problem.get(key, 0)) < 1:
                    raise ValueError(f"problem.{key} must be >= 1")
        for T, J in self.pgsg_splits:
            if int(T) < 1 or int(J) < 1:
                raise ValueError("pgsg splits must be pairs of positive integers")
        if not self.experiment_id:
            self.experiment_id = f"{family}-{name}-s{self.seed}"

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {k: raw[k] for k in (
            "seed", "problem", "algorithm", "budget", "experiment_id",
            "x1", "output_dir", "plots", "pgsg_splits",
        ) if k in raw}
        unknown = set(raw) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for req in ("seed", "problem", "algorithm", "budget"):
            if req not in known:
                raise ValueError(f"config is missing required key {req!r}")
        return cls(**known)

    # -- derived objects ----------------------------------------------------

    def make_oracle(self) -> FirstOrderOracle:
        family = self.problem["family"]
        if family == "phase_retrieval":
            _, oracle = gen_phase_retrieval(
                int(self.problem["d"]), int(self.problem["n"]), int(self.seed)
            )
            return oracle
        if family == "blind_deconvolution":
            _, oracle = gen_blind_deconv(
                int(self.problem["d"]), int(self.problem["n"]), int(self.seed)
            )
            return oracle
        spec = toy_function(
            self.problem["kind"],
            dimension=int(self.problem.get("dimension", 1)),
            mu=float(self.problem.get("mu", 1.0)),
        )
        return spec.oracle()

    def start_point(self, oracle: FirstOrderOracle) -> np.ndarray:
        if self.x1 is not None:
            x = np.asarray(self.x1, dtype=np.float64)
            if x.shape != (oracle.dimension,):
                raise ValueError(
                    f"x1 has dimension {x.size}, problem needs {oracle.dimension}"
                )
            return x
        if self.problem["family"] == "toy":
            return np.full(oracle.dimension, 1.5)
        return RngStream(self.seed).spawn(1).unit_sphere(oracle.dimension)

    def resolve_output_dir(self, override: Optional[str] = None) -> Path:
        chosen = override or os.environ.get(OUTPUT_DIR_ENV) or self.output_dir
        path = Path(chosen)
        path.mkdir(parents=True, exist_ok=True)
        return path


def load_config(path) -> ExperimentConfig:
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} does not contain a mapping")
    return ExperimentConfig.from_dict(raw)
