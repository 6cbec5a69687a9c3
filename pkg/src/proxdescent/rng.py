"""Deterministic, seedable random streams for data generation.

All randomness in experiments flows through :class:`RngStream` so that a run
is reproducible bit-for-bit from its seed on a given build.  Normal draws are
produced by the Box-Muller transform applied to PCG64 uniforms; the transform
is fixed here rather than delegated to the generator's own normal sampler so
the draw sequence is pinned by this module alone.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """Single-owner random stream identified by (seed, spawn key).

    The same seed always reproduces the same draw sequence.  Parallel or
    per-cell work should not share one stream; derive an independent child
    with :meth:`spawn` instead.
    """

    def __init__(self, seed: int, spawn_key: tuple = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, index: int) -> "RngStream":
        """Independent child stream for cell ``index`` of this stream's seed."""
        return RngStream(self.seed, self.spawn_key + (int(index),))

    def uniform(self, n: int) -> np.ndarray:
        """n uniform draws in [0, 1)."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return self._gen.random(int(n))

    def standard_normal(self, n: int) -> np.ndarray:
        """n independent standard-normal draws via Box-Muller.

        Uses pairs (u1, u2) of uniforms with u1 shifted into (0, 1] so the
        logarithm is finite; odd n discards the last sine component.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        half = (int(n) + 1) // 2
        u1 = 1.0 - self._gen.random(half)
        u2 = self._gen.random(half)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        return np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]

    def unit_sphere(self, n: int) -> np.ndarray:
        """A point drawn uniformly from the unit sphere in R^n."""
        while True:
            v = self.standard_normal(n)
            norm = float(np.linalg.norm(v))
            if norm > 1e-12:
                return v / norm

    def integers(self, low: int, high: int, size=None):
        """Integer draws in [low, high), delegated to the generator."""
        return self._gen.integers(low, high, size=size)


def standard_normal_vector(rng: RngStream, n: int) -> np.ndarray:
    """Functional alias for :meth:`RngStream.standard_normal`."""
    return rng.standard_normal(n)
