"""Seeded random stream.

All randomness comes from numpy's PCG64 bit generator (PCG-XSL-RR 128/64)
seeded with a single unsigned 64-bit integer.  Draws are made only through
the methods below, so a seed fixes every random choice of a run.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

MAX_SEED = 2**64 - 1


class Rng:
    def __init__(self, seed: int = 0):
        seed = int(seed)
        if not 0 <= seed <= MAX_SEED:
            raise InvalidInputError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def index(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n < 1:
            raise InvalidInputError("cannot draw from an empty range")
        return int(self._gen.integers(n))

    def uniform(self, high: float) -> float:
        """Uniform real in ``[0, high)``."""
        r = float(self._gen.random()) * high
        # the product can round up to ``high`` itself
        return r if r < high else float(np.nextafter(high, 0.0))

    def sample_distinct(self, n: int, k: int) -> np.ndarray:
        return self._gen.choice(n, size=k, replace=False)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def uniform_array(self, low, high, size) -> np.ndarray:
        return self._gen.uniform(low, high, size)

    def __repr__(self):
        return f"Rng(seed={self.seed})"


def as_rng(rng) -> Rng:
    if isinstance(rng, Rng):
        return rng
    if rng is None:
        return Rng(0)
    if isinstance(rng, (int, np.integer)):
        return Rng(int(rng))
    # duck-typed stand-ins (tests inject scripted draws)
    return rng
