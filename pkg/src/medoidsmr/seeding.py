"""k-medoids++ initialization.

The first medoid is uniform over the dataset.  Each further medoid is drawn
with probability proportional to a point's distance D(p) to its nearest
already-chosen medoid: draw R uniformly in ``[0, S)`` with ``S = sum D(p)``
and walk the running sum of D(p) in ascending id order; the point whose
half-open interval contains R is chosen.  Chosen points (and exact
duplicates of them) have zero width and can never be drawn again.

``weight="d2"`` swaps D(p) for D(p)**2, the classical k-means++ weighting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MedoidSet, as_array, sq_dists
from .errors import DegenerateDatasetError, InvalidInputError
from .rng import as_rng

WEIGHTS = ("d", "d2")


@dataclass(frozen=True, eq=False)
class SeedingState:
    points: np.ndarray
    chosen: tuple
    d_cache: np.ndarray
    s_total: float
    weight: str = "d"

    @property
    def weights(self) -> np.ndarray:
        return self.d_cache if self.weight == "d" else self.d_cache * self.d_cache

    @classmethod
    def from_chosen(cls, points, chosen, weight="d") -> "SeedingState":
        """State after ``chosen`` (row ids) have been picked, D(p) from scratch."""
        X = as_array(points)
        chosen = tuple(int(i) for i in chosen)
        if not chosen:
            raise InvalidInputError("need at least one chosen medoid")
        d2 = sq_dists(X, X[chosen[0]])
        for i in chosen[1:]:
            np.minimum(d2, sq_dists(X, X[i]), out=d2)
        return _state(X, chosen, np.sqrt(d2), weight)


def _state(X, chosen, d_cache, weight):
    w = d_cache if weight == "d" else d_cache * d_cache
    return SeedingState(X, chosen, d_cache, float(np.sum(w)), weight)


def _check_weight(weight):
    if weight not in WEIGHTS:
        raise InvalidInputError(f"seeding weight must be one of {WEIGHTS}, got {weight!r}")


def select_by_weight(weights: np.ndarray, r: float) -> int:
    """Index whose interval ``[cum[i-1], cum[i])`` of the running sum contains ``r``."""
    cum = np.cumsum(weights)
    if not 0.0 <= r < cum[-1]:
        raise InvalidInputError(f"draw {r} outside [0, {cum[-1]})")
    return int(np.searchsorted(cum, r, side="right"))


def seed_first_medoid(points, rng=None, weight: str = "d") -> SeedingState:
    _check_weight(weight)
    X = as_array(points)
    if len(X) == 0:
        raise InvalidInputError("cannot seed an empty dataset")
    first = as_rng(rng).index(len(X))
    return _state(X, (first,), np.sqrt(sq_dists(X, X[first])), weight)


def seed_next_medoid(state: SeedingState, rng=None) -> SeedingState:
    weights = state.weights
    total = float(np.sum(weights))
    if not total > 0.0:
        raise DegenerateDatasetError(
            f"only {len(state.chosen)} distinct points; cannot choose another medoid"
        )
    cum_total = float(np.cumsum(weights)[-1])
    r = as_rng(rng).uniform(cum_total)
    pick = select_by_weight(weights, r)
    X = state.points
    d_cache = np.minimum(state.d_cache, np.sqrt(sq_dists(X, X[pick])))
    return _state(X, state.chosen + (pick,), d_cache, state.weight)


def initialize_medoids(points, k: int, rng=None, weight: str = "d") -> MedoidSet:
    """Choose ``k`` medoids; cluster ids follow selection order."""
    k = int(k)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    X = as_array(points)
    if k > len(X):
        raise DegenerateDatasetError(f"k={k} exceeds the {len(X)} points available")
    rng = as_rng(rng)
    state = seed_first_medoid(X, rng, weight)
    while len(state.chosen) < k:
        state = seed_next_medoid(state, rng)
    return MedoidSet.from_ids(X, state.chosen)


def random_medoids(points, k: int, rng=None) -> MedoidSet:
    """``k`` uniformly random medoids with pairwise distinct coordinates."""
    k = int(k)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    X = as_array(points)
    _, first_ids = np.unique(X, axis=0, return_index=True)
    first_ids.sort()
    if k > len(first_ids):
        raise DegenerateDatasetError(
            f"k={k} exceeds the {len(first_ids)} distinct points available"
        )
    picks = first_ids[as_rng(rng).sample_distinct(len(first_ids), k)]
    return MedoidSet.from_ids(X, picks)
