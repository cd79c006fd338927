"""Serial reference algorithms: PAM, CLARANS, and an exhaustive optimum.

PAM and CLARANS both move between medoid sets by single swaps: medoid
``O_i`` leaves and non-medoid ``O_h`` takes its place.  The change in cost of
a swap is accumulated point by point from the nearest and second-nearest
medoid distances, so no full reassignment is needed to score it:

* p belonged to ``O_i`` and its next-nearest medoid beats ``O_h``: p moves there.
* p belonged to ``O_i`` and ``O_h`` is at least as close: p moves to ``O_h``.
* p belonged to another medoid still closer than ``O_h``: nothing changes.
* p belonged to another medoid but ``O_h`` is closer: p moves to ``O_h``.

These baselines are single-threaded on purpose; they are the timing
references for the parallel driver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, islice
from typing import Optional

import numpy as np

from .core import (Assignment, Medoid, MedoidSet, Point, as_array, assign_nearest,
                   check_metric, clustered_cost, point_costs, sq_dists)
from .errors import CapacityError, InvalidInputError
from .job import ClusteringResult, kmedoids_random_init
from .rng import as_rng
from .seeding import random_medoids

# a swap must beat the current cost by this relative margin to count as improving
REL_TOL = 1e-12


@dataclass(frozen=True)
class SwapProposal:
    out_medoid: Medoid
    in_candidate: Point
    delta_cost: Optional[float] = None


class _SwapState:
    """Medoid ids plus cached nearest / second-nearest per-point costs."""

    def __init__(self, X, ids, metric):
        self.X = X
        self.metric = metric
        self.ids = np.array(ids, dtype=np.int64)
        self.refresh()

    def refresh(self):
        X, k = self.X, len(self.ids)
        n = len(X)
        D = np.empty((n, k))
        for j, pid in enumerate(self.ids):
            D[:, j] = point_costs(sq_dists(X, X[pid]), self.metric)
        self.labels, _ = assign_nearest(X, X[self.ids])
        rows = np.arange(n)
        self.own = D[rows, self.labels]
        if k > 1:
            D[rows, self.labels] = np.inf
            self.second = D.min(axis=1)
        else:
            self.second = np.full(n, np.inf)
        self.cost = clustered_cost(X, self.labels, X[self.ids], self.metric)

    def delta(self, i: int, h: int) -> float:
        dh = point_costs(sq_dists(self.X, self.X[h]), self.metric)
        lost = self.labels == i
        after = np.where(lost, np.minimum(self.second, dh), np.minimum(self.own, dh))
        return float(np.sum(after - self.own))

    def all_deltas(self, h: int) -> np.ndarray:
        """Delta of swapping ``h`` in for each medoid at once."""
        dh = point_costs(sq_dists(self.X, self.X[h]), self.metric)
        stay = np.minimum(dh - self.own, 0.0)
        moved = np.minimum(self.second, dh) - self.own
        per_cluster = np.bincount(self.labels, weights=moved - stay, minlength=len(self.ids))
        return float(np.sum(stay)) + per_cluster

    def try_swap(self, i: int, h: int) -> bool:
        """Apply the swap if it strictly lowers the recomputed cost."""
        old_ids, old_cost = self.ids.copy(), self.cost
        self.ids[i] = h
        self.refresh()
        if self.cost < old_cost:
            return True
        self.ids = old_ids
        self.refresh()
        return False

    def non_medoids(self) -> np.ndarray:
        mask = np.ones(len(self.X), dtype=bool)
        mask[self.ids] = False
        return np.flatnonzero(mask)

    def result(self, trace, initial, converged=True) -> ClusteringResult:
        medoids = MedoidSet.from_ids(self.X, self.ids)
        return ClusteringResult(medoids, Assignment(self.labels), tuple(trace), len(trace),
                                converged, self.cost, initial)


def _check_k(X, k):
    k = int(k)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if len(X) == 0:
        raise InvalidInputError("cannot cluster an empty dataset")
    return k


def swap_delta(proposal: SwapProposal, dataset, medoids: MedoidSet, assignment: Assignment,
               metric: str = "squared") -> float:
    """Change in total cost if ``proposal`` is applied and points re-join their nearest medoid.

    ``assignment`` must be the nearest-medoid assignment for ``medoids``.
    """
    check_metric(metric)
    X = as_array(dataset)
    cid = proposal.out_medoid.cluster_id
    if not 0 <= cid < medoids.k:
        raise InvalidInputError(f"cluster {cid} is not in the medoid set")
    h = np.asarray(proposal.in_candidate.coords, dtype=np.float64)
    centers = medoids.coords
    labels = assignment.labels
    if len(labels) != len(X):
        raise InvalidInputError("assignment does not cover the dataset")

    rows = np.arange(len(X))
    D = np.column_stack([point_costs(sq_dists(X, c), metric) for c in centers])
    own = D[rows, labels]
    D[:, cid] = np.inf
    others = D.min(axis=1)
    dh = point_costs(sq_dists(X, h), metric)
    lost = labels == cid
    after = np.where(lost, np.minimum(others, dh), np.minimum(own, dh))
    return float(np.sum(after - own))


def pam(dataset, k: int, rng=None, *, metric: str = "squared", max_swaps: int = 10_000,
        initial_medoids: Optional[MedoidSet] = None) -> ClusteringResult:
    """Steepest-descent PAM from random initial medoids.

    Each pass scores every (medoid, non-medoid) swap and applies the best one
    if it improves the cost; stops when none does.  ``cost_trace`` holds the
    initial cost followed by the cost after each applied swap.
    """
    check_metric(metric)
    X = as_array(dataset)
    k = _check_k(X, k)
    initial = initial_medoids or random_medoids(X, k, as_rng(rng))
    state = _SwapState(X, initial.ids, metric)
    trace = [state.cost]
    converged = False
    for _ in range(max_swaps):
        best = (0.0, -1, -1)
        for h in state.non_medoids():
            deltas = state.all_deltas(h)
            i = int(np.argmin(deltas))
            if deltas[i] < best[0]:
                best = (float(deltas[i]), i, int(h))
        delta, i, h = best
        if i < 0 or delta >= -REL_TOL * max(state.cost, 1e-300) or not state.try_swap(i, h):
            converged = True
            break
        trace.append(state.cost)
    return state.result(trace, initial, converged)


def default_maxneighbor(n: int, k: int) -> int:
    return max(250, int(0.0125 * k * (n - k)))


def clarans(dataset, k: int, numlocal: int = 2, maxneighbor: Optional[int] = None, rng=None,
            *, metric: str = "squared") -> ClusteringResult:
    """Randomised swap search with ``numlocal`` restarts.

    From each random start, neighbours (single swaps) are sampled without
    replacement; the first improving one is taken and sampling restarts.  A
    start ends after ``maxneighbor`` consecutive non-improving samples or
    when every neighbour has been tried.  The cheapest end state wins.
    """
    check_metric(metric)
    X = as_array(dataset)
    k = _check_k(X, k)
    if numlocal < 1:
        raise InvalidInputError(f"numlocal must be >= 1, got {numlocal}")
    n = len(X)
    if maxneighbor is None:
        maxneighbor = default_maxneighbor(n, k)
    if maxneighbor < 1:
        raise InvalidInputError(f"maxneighbor must be >= 1, got {maxneighbor}")
    rng = as_rng(rng)

    best = None
    for _ in range(numlocal):
        initial = random_medoids(X, k, rng)
        state = _SwapState(X, initial.ids, metric)
        trace = [state.cost]
        moved = True
        while moved:
            moved = False
            others = state.non_medoids()
            total = k * len(others)
            if total == 0:
                break
            budget = min(maxneighbor, total)
            if budget >= total // 2:
                order = iter(rng.permutation(total)[:budget])
            else:
                order = _distinct_draws(rng, total, budget)
            for idx in order:
                i, h = divmod(int(idx), len(others))
                h = int(others[h])
                delta = state.delta(i, h)
                if delta < -REL_TOL * max(state.cost, 1e-300) and state.try_swap(i, h):
                    trace.append(state.cost)
                    moved = True
                    break
        if best is None or state.cost < best.cost:
            best = state.result(trace, initial)
    return best


def _distinct_draws(rng, total, count):
    seen = set()
    while len(seen) < count:
        idx = rng.index(total)
        if idx not in seen:
            seen.add(idx)
            yield idx


def brute_force_optimum(dataset, k: int, metric: str = "squared",
                        max_subsets: int = 10**6):
    """Global optimum over every k-subset of points; returns ``(MedoidSet, cost)``.

    Ties go to the lexicographically smallest id set.
    """
    check_metric(metric)
    X = as_array(dataset)
    k = _check_k(X, k)
    n = len(X)
    if k > n:
        raise InvalidInputError(f"k={k} exceeds n={n}")
    count = math.comb(n, k)
    if count > max_subsets:
        raise CapacityError(f"C({n},{k}) = {count} subsets exceeds the limit of {max_subsets}")

    C = np.column_stack([point_costs(sq_dists(X, X[j]), metric) for j in range(n)])
    chunk = max(1, 2_000_000 // (n * k))
    subsets = combinations(range(n), k)
    best_cost, best_ids = np.inf, None
    while True:
        block = np.array(list(islice(subsets, chunk)), dtype=np.int64)
        if len(block) == 0:
            break
        costs = C[:, block].min(axis=2).sum(axis=0)
        j = int(np.argmin(costs))
        if costs[j] < best_cost:
            best_cost, best_ids = float(costs[j]), block[j]
    medoids = MedoidSet.from_ids(X, best_ids)
    labels, _ = assign_nearest(X, medoids.coords)
    return medoids, clustered_cost(X, labels, medoids.coords, metric)


__all__ = [
    "SwapProposal", "swap_delta", "pam", "clarans", "brute_force_optimum",
    "kmedoids_random_init", "default_maxneighbor",
]
