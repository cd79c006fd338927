"""Points, medoids, assignments, and the clustering objective.

The objective is the within-cluster sum of squared Euclidean distances
between each point and its cluster's medoid.  A ``metric="plain"`` switch
sums unsquared distances instead; assignment is identical under both since
the nearest medoid does not depend on squaring.

Every distance in the package goes through :func:`sq_dists` so the
vectorised map phase, the reducers, and the oracles all round identically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

METRICS = ("squared", "plain")


@dataclass(frozen=True, order=True)
class Point:
    """A row of the dataset: integer id plus coordinates.

    Points order by id, which is the value ordering used by the shuffle.
    """

    id: int
    coords: tuple = field(compare=False)

    def __post_init__(self):
        if int(self.id) < 0:
            raise InvalidInputError(f"point id must be non-negative, got {self.id}")
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidInputError("a point needs at least one coordinate")
        if not all(np.isfinite(coords)):
            raise InvalidInputError(f"point {self.id} has non-finite coordinates {coords}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Medoid:
    cluster_id: int
    point: Point


@dataclass(frozen=True)
class MedoidSet:
    """k medoids ordered by cluster id, which runs 0..k-1."""

    medoids: tuple

    def __post_init__(self):
        medoids = tuple(self.medoids)
        if not medoids:
            raise InvalidInputError("a medoid set needs k >= 1")
        for i, m in enumerate(medoids):
            if m.cluster_id != i:
                raise InvalidInputError(
                    f"cluster ids must be 0..k-1 in order; position {i} holds {m.cluster_id}"
                )
        ids = [m.point.id for m in medoids]
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f"medoids share a point id: {ids}")
        dims = {m.point.dim for m in medoids}
        if len(dims) != 1:
            raise InvalidInputError(f"medoids disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "medoids", medoids)
        object.__setattr__(self, "_ids", np.array(ids, dtype=np.int64))
        object.__setattr__(
            self, "_coords", np.array([m.point.coords for m in medoids], dtype=np.float64)
        )

    @classmethod
    def from_ids(cls, X, ids) -> "MedoidSet":
        """Build from row ids into the ``(n, d)`` coordinate array ``X``."""
        X = np.asarray(X, dtype=np.float64)
        medoids = []
        for cid, pid in enumerate(ids):
            pid = int(pid)
            if not 0 <= pid < len(X):
                raise InvalidInputError(f"medoid point id {pid} is not a dataset row")
            medoids.append(Medoid(cid, Point(pid, tuple(X[pid]))))
        return cls(tuple(medoids))

    @property
    def k(self) -> int:
        return len(self.medoids)

    @property
    def ids(self) -> np.ndarray:
        return self._ids.copy()

    @property
    def coords(self) -> np.ndarray:
        return self._coords.copy()

    def __len__(self):
        return len(self.medoids)

    def __iter__(self):
        return iter(self.medoids)

    def __getitem__(self, cluster_id):
        return self.medoids[cluster_id]

    def __eq__(self, other):
        if not isinstance(other, MedoidSet):
            return NotImplemented
        return np.array_equal(self._ids, other._ids) and np.array_equal(
            self._coords, other._coords
        )

    def __hash__(self):
        return hash(tuple(self._ids.tolist()))


@dataclass(frozen=True, eq=False)
class Assignment:
    """``labels[i]`` is the cluster id of point ``i``."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def nearest(cls, points, medoids: MedoidSet) -> "Assignment":
        labels, _ = assign_nearest(as_array(points), medoids.coords)
        return cls(labels)

    def validate(self, medoids: MedoidSet, n: int) -> None:
        if len(self.labels) != n:
            raise InvalidInputError(
                f"assignment labels {len(self.labels)} points, dataset has {n}"
            )
        if n and (self.labels.min() < 0 or self.labels.max() >= medoids.k):
            raise InvalidInputError(f"labels fall outside cluster ids 0..{medoids.k - 1}")
        own = self.labels[medoids.ids]
        if not np.array_equal(own, np.arange(medoids.k)):
            raise InvalidInputError("a medoid is not labeled with its own cluster id")

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster_id)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None


def check_metric(metric: str) -> str:
    if metric not in METRICS:
        raise InvalidInputError(f"metric must be one of {METRICS}, got {metric!r}")
    return metric


def as_array(points) -> np.ndarray:
    """Coerce a dataset to a finite ``(n, d)`` float64 array.

    Accepts an array-like of coordinates, a row store, or a sequence of
    :class:`Point` whose ids are exactly ``0..n-1`` (in any order).
    """
    if hasattr(points, "coords") and isinstance(getattr(points, "coords"), np.ndarray):
        return points.coords
    if isinstance(points, np.ndarray):
        X = np.asarray(points, dtype=np.float64)
    else:
        points = list(points)
        if points and isinstance(points[0], Point):
            ordered = sorted(points)
            if [p.id for p in ordered] != list(range(len(ordered))):
                raise InvalidInputError("point ids must be exactly 0..n-1")
            dims = {p.dim for p in ordered}
            if len(dims) > 1:
                raise InvalidInputError(f"points disagree on dimension: {sorted(dims)}")
            X = np.array([p.coords for p in ordered], dtype=np.float64)
        else:
            X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1 and X.size == 0:
        X = X.reshape(0, 2)
    if X.ndim != 2 or X.shape[1] < 1:
        raise InvalidInputError(f"expected an (n, d) coordinate array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("coordinates must be finite")
    return X


def _coords_of(p) -> np.ndarray:
    if isinstance(p, Point):
        return np.asarray(p.coords, dtype=np.float64)
    return np.atleast_1d(np.asarray(p, dtype=np.float64))


def sq_dists(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from every row of ``X`` to ``c``.

    Dimensions are accumulated left to right; all callers rely on this
    exact rounding sequence.
    """
    out = X[:, 0] - c[0]
    out *= out
    for t in range(1, X.shape[1]):
        diff = X[:, t] - c[t]
        diff *= diff
        out += diff
    return out


def squared_distance(a, b) -> float:
    a, b = _coords_of(a), _coords_of(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.size} vs {b.size}")
    return float(sq_dists(a[None, :], b)[0])


def distance(a, b) -> float:
    return float(np.sqrt(squared_distance(a, b)))


def point_costs(d2: np.ndarray, metric: str = "squared") -> np.ndarray:
    """Per-point objective terms from squared distances."""
    return d2 if metric == "squared" else np.sqrt(d2)


def group_cost(Xg: np.ndarray, center: np.ndarray, metric: str = "squared") -> float:
    """Objective contribution of one cluster whose rows are ``Xg``."""
    if len(Xg) == 0:
        return 0.0
    return float(np.sum(point_costs(sq_dists(Xg, center), metric)))


def assign_nearest(X: np.ndarray, centers: np.ndarray):
    """Label each row of ``X`` with its nearest center.

    Returns ``(labels, best_d2)``.  Ties go to the smallest center index.
    """
    n = len(X)
    labels = np.zeros(n, dtype=np.int64)
    if len(centers) == 0:
        raise InvalidInputError("need at least one center")
    if X.shape[1] != centers.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: points are {X.shape[1]}-d, medoids {centers.shape[1]}-d"
        )
    best = sq_dists(X, centers[0])
    for j in range(1, len(centers)):
        d2 = sq_dists(X, centers[j])
        closer = d2 < best
        np.copyto(best, d2, where=closer)
        labels[closer] = j
    return labels, best


def nearest_medoid(p, medoids: MedoidSet):
    """Return ``(cluster_id, distance)`` of the medoid nearest to ``p``."""
    c = _coords_of(p)
    coords = medoids._coords
    if c.size != coords.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {c.size} vs {coords.shape[1]}")
    d2 = sq_dists(coords, c)
    j = int(np.argmin(d2))
    return j, float(np.sqrt(d2[j]))


def clustered_cost(X: np.ndarray, labels: np.ndarray, centers: np.ndarray,
                   metric: str = "squared") -> float:
    """Objective summed cluster by cluster, members in ascending id order.

    This summation order matches what the reducers compute, so a converged
    run's trace ends on exactly this value.
    """
    total = 0.0
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(len(centers) + 1))
    for j in range(len(centers)):
        ids = order[bounds[j]:bounds[j + 1]]
        total += group_cost(X[ids], centers[j], metric)
    return total


def total_cost(points, medoids: MedoidSet, assignment: Assignment,
               metric: str = "squared") -> float:
    """The clustering objective for an explicit assignment."""
    check_metric(metric)
    X = as_array(points)
    if len(assignment) != len(X):
        raise InvalidInputError(
            f"assignment covers {len(assignment)} points, dataset has {len(X)}"
        )
    labels = assignment.labels
    if len(X) and (labels.min() < 0 or labels.max() >= medoids.k):
        raise InvalidInputError("assignment references an unknown cluster id")
    if X.shape[1] != medoids._coords.shape[1]:
        raise InvalidInputError("dimension mismatch between points and medoids")
    return clustered_cost(X, labels, medoids._coords, metric)


def cost_of_medoids(points, medoid_ids: Sequence[int], metric: str = "squared") -> float:
    """Objective when every point joins its nearest medoid."""
    X = as_array(points)
    centers = X[np.asarray(medoid_ids, dtype=np.int64)]
    labels, _ = assign_nearest(X, centers)
    return clustered_cost(X, labels, centers, metric)
