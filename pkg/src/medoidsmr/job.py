"""Iterative k-medoids as a sequence of MapReduce jobs.

Each iteration is one job.  The map phase labels every row with its nearest
medoid (ties to the smallest cluster id) and emits ``(cluster_id, point)``.
The reduce phase receives one cluster's members in ascending id order and
picks as new medoid the member with the strictly smallest within-cluster
cost, keeping the current medoid on ties.  The driver stops once a job
leaves every medoid in place, or after ``max_iterations`` jobs.

Under the squared objective the within-cluster cost of candidate ``c`` is
``m * |c - mean|**2`` plus a constant, so the reducer ranks candidates by
distance to the cluster mean in O(m) and confirms the winner against the
incumbent with a direct cost sum.  Under ``metric="plain"`` every candidate's
cost is summed directly, which is O(m**2).
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (Assignment, Medoid, MedoidSet, Point, as_array, assign_nearest,
                   check_metric, clustered_cost, group_cost, sq_dists)
from .engine import (InputSplit, JobConfig, JobDefinition, KeyedRecord, RecordBatch,
                     make_splits, run_job, thread_count)
from .errors import InvalidInputError, MedoidsError, ParseError
from .rng import as_rng
from .seeding import initialize_medoids, random_medoids

INITS = ("kmpp", "random")


@dataclass(frozen=True, eq=False)
class MedoidsFile:
    """The medoids shared by every task of one iteration.

    ``entries`` holds ``(cluster_id, point_id, coords)`` ordered by cluster id.
    On disk: a ``#iteration=<n>`` header, then ``cluster_id,point_id,x1,...,xd``
    per line.
    """

    entries: tuple
    iteration: int = 0

    def __post_init__(self):
        entries = tuple((int(c), int(p), tuple(float(x) for x in xs)) for c, p, xs in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(
            self, "_coords", np.array([e[2] for e in entries], dtype=np.float64)
        )

    @classmethod
    def from_medoids(cls, medoids: MedoidSet, iteration: int = 0) -> "MedoidsFile":
        return cls(tuple((m.cluster_id, m.point.id, m.point.coords) for m in medoids), iteration)

    def to_medoid_set(self) -> MedoidSet:
        return MedoidSet(tuple(Medoid(c, Point(p, xs)) for c, p, xs in self.entries))

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def point_ids(self) -> tuple:
        return tuple(e[1] for e in self.entries)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    def write(self, path) -> None:
        lines = [f"#iteration={self.iteration}"]
        for c, p, xs in self.entries:
            lines.append(",".join([str(c), str(p)] + [repr(x) for x in xs]))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path) -> "MedoidsFile":
        iteration = 0
        entries = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].partition("=")
                    if key.strip() == "iteration":
                        try:
                            iteration = int(val)
                        except ValueError:
                            raise ParseError(f"bad iteration header {line!r}", lineno) from None
                    continue
                fields = line.split(",")
                if len(fields) < 3:
                    raise ParseError("expected cluster_id,point_id,x1,...,xd", lineno)
                try:
                    entries.append((int(fields[0]), int(fields[1]),
                                    tuple(float(x) for x in fields[2:])))
                except ValueError:
                    raise ParseError(f"non-numeric field in {line!r}", lineno) from None
        entries.sort(key=lambda e: e[0])
        if [e[0] for e in entries] != list(range(len(entries))):
            raise ParseError("cluster ids must be exactly 0..k-1")
        return cls(tuple(entries), iteration)


def has_converged(prev: MedoidsFile, next: MedoidsFile) -> bool:
    """Same medoid point per cluster id; the iteration counter is ignored."""
    if prev.k != next.k:
        raise InvalidInputError(f"medoid files disagree on k: {prev.k} vs {next.k}")
    return prev.point_ids == next.point_ids


def _parse_row(row):
    if isinstance(row, Point):
        return row
    try:
        pid, coords = row
        if isinstance(coords, str):
            coords = [float(x) for x in coords.split(",")]
        return Point(int(pid), tuple(coords))
    except (TypeError, ValueError, MedoidsError) as exc:
        rid = row[0] if isinstance(row, (tuple, list)) and row else row
        raise ParseError(f"row {rid}: malformed record ({exc})") from None


def map_assign(row, snapshot: MedoidsFile) -> KeyedRecord:
    """Emit ``(nearest cluster_id, point)`` for one ``(point_id, coords)`` row.

    ``coords`` may be a sequence of numbers or a comma-separated string.
    """
    point = _parse_row(row)
    centers = snapshot.coords
    if point.dim != centers.shape[1]:
        raise ParseError(
            f"row {point.id}: {point.dim}-d point against {centers.shape[1]}-d medoids"
        )
    d2 = sq_dists(centers, np.asarray(point.coords))
    return KeyedRecord(int(np.argmin(d2)), point)


def candidate_costs(Xg: np.ndarray, metric: str = "squared") -> np.ndarray:
    """Within-cluster cost of every member of ``Xg`` as medoid, summed directly."""
    return np.array([group_cost(Xg, c, metric) for c in Xg], dtype=np.float64)


def choose_medoid(Xg: np.ndarray, incumbent: int, metric: str = "squared"):
    """Position of the new medoid among the rows ``Xg`` of one cluster.

    ``incumbent`` is the current medoid's position.  Returns
    ``(position, incumbent_cost)``; rows must be in ascending id order so the
    first minimum is also the smallest id.
    """
    inc_cost = group_cost(Xg, Xg[incumbent], metric)
    if metric == "squared":
        score = sq_dists(Xg, Xg.mean(axis=0))
        best = int(np.argmin(score))
        if score[best] < score[incumbent]:
            if group_cost(Xg, Xg[best], metric) < inc_cost:
                return best, inc_cost
        return incumbent, inc_cost
    costs = candidate_costs(Xg, metric)
    costs[incumbent] = inc_cost
    best = int(np.argmin(costs))
    if costs[best] < inc_cost:
        return best, inc_cost
    return incumbent, inc_cost


def _incumbent_position(ids: np.ndarray, medoid_id: int, cluster_id) -> int:
    pos = int(np.searchsorted(ids, medoid_id))
    if pos >= len(ids) or ids[pos] != medoid_id:
        raise MedoidsError(f"cluster {cluster_id}: medoid {medoid_id} missing from its own group")
    return pos


def reduce_update(cluster_id, points, snapshot: MedoidsFile, metric: str = "squared"):
    """Return ``(cluster_id, new Medoid)`` for one cluster's member points."""
    points = sorted(points)
    if not points:
        raise MedoidsError(f"cluster {cluster_id}: empty reduce group")
    ids = np.array([p.id for p in points], dtype=np.int64)
    Xg = np.array([p.coords for p in points], dtype=np.float64)
    inc = _incumbent_position(ids, snapshot.entries[cluster_id][1], cluster_id)
    best, _ = choose_medoid(Xg, inc, metric)
    return cluster_id, Medoid(cluster_id, points[best])


@dataclass(frozen=True)
class _Context:
    X: np.ndarray
    snapshot: MedoidsFile
    metric: str


def _map_split(split: InputSplit, ctx: _Context) -> RecordBatch:
    labels, _ = assign_nearest(ctx.X[split.start:split.stop], ctx.snapshot.coords)
    return RecordBatch(labels, np.arange(split.start, split.stop, dtype=np.int64))


def _reduce_group(key, ids, Xg, ctx: _Context):
    inc = _incumbent_position(ids, ctx.snapshot.entries[key][1], key)
    best, inc_cost = choose_medoid(Xg, inc, ctx.metric)
    return KeyedRecord(key, (int(ids[best]), inc_cost, ids))


def _reduce_ids(key, ids, ctx: _Context):
    return _reduce_group(key, ids, ctx.X[ids], ctx)


def _reduce_points(key, points, ctx: _Context):
    ids = np.array([p.id for p in points], dtype=np.int64)
    return _reduce_group(key, ids, np.array([p.coords for p in points]), ctx)


def _map_row(row, ctx: _Context) -> KeyedRecord:
    return map_assign(row, ctx.snapshot)


def _row_reader(X):
    def read(split: InputSplit):
        for i in split.rows:
            yield (i, X[i])
    return read


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    medoids: MedoidSet
    assignment: Assignment
    cost_trace: tuple
    iterations: int
    converged: bool
    cost: float
    initial_medoids: Optional[MedoidSet] = None
    timings: dict = field(default_factory=dict)

    def same_clustering(self, other: "ClusteringResult") -> bool:
        """Bit-level equality of medoids, labels, trace, and iteration count."""
        return (
            np.array_equal(self.medoids.ids, other.medoids.ids)
            and np.array_equal(self.medoids.coords, other.medoids.coords)
            and np.array_equal(self.assignment.labels, other.assignment.labels)
            and self.cost_trace == other.cost_trace
            and self.iterations == other.iterations
            and self.converged == other.converged
        )


def _initial(X, k, rng, init, seeding_weight):
    if init == "kmpp":
        return initialize_medoids(X, k, rng, weight=seeding_weight)
    if init == "random":
        return random_medoids(X, k, rng)
    raise InvalidInputError(f"init must be one of {INITS}, got {init!r}")


def run_clustering(dataset, k: int, rng=None, config: Optional[JobConfig] = None, *,
                   init: str = "kmpp", metric: str = "squared", seeding_weight: str = "d",
                   initial_medoids: Optional[MedoidSet] = None,
                   row_wise: bool = False) -> ClusteringResult:
    """Seed, then iterate MapReduce assign/update jobs until the medoids stop moving.

    ``cost_trace[i]`` is the objective of the medoids entering job ``i + 1``
    with every point at its nearest medoid.  ``row_wise=True`` runs the
    per-record map and reduce functions instead of the vectorised ones;
    results are identical, only slower.
    """
    config = config or JobConfig()
    check_metric(metric)
    X = as_array(dataset)
    k = int(k)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if len(X) == 0:
        raise InvalidInputError("cannot cluster an empty dataset")

    t0 = time.perf_counter()
    if initial_medoids is None:
        initial_medoids = _initial(X, k, as_rng(rng), init, seeding_weight)
    elif initial_medoids.k != k:
        raise InvalidInputError(f"initial medoids have k={initial_medoids.k}, expected {k}")
    t1 = time.perf_counter()

    splits = make_splits(len(X), config.splits)
    threads = thread_count(config.num_workers)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    current = MedoidsFile.from_medoids(initial_medoids, 0)
    trace, converged, last_labels = [], False, None
    job_metrics = []
    try:
        for it in range(1, config.max_iterations + 1):
            ctx = _Context(X, current, metric)
            if row_wise:
                job = JobDefinition(reduce_fn=_reduce_points, map_fn=_map_row,
                                    read_split=_row_reader(X), shared_context=ctx)
            else:
                job = JobDefinition(reduce_fn=_reduce_ids, map_split_fn=_map_split,
                                    shared_context=ctx)
            out = run_job(job, splits, config, executor=pool)
            job_metrics.append(out.metrics)
            if list(out) != list(range(k)):
                raise MedoidsError(f"reduce produced clusters {list(out)}, expected 0..{k - 1}")

            new_ids, cost = [], 0.0
            labels = np.empty(len(X), dtype=np.int64)
            for j in range(k):
                new_id, inc_cost, ids = out[j][0].value
                new_ids.append(new_id)
                cost += inc_cost
                labels[ids] = j
            trace.append(cost)
            last_labels = labels

            nxt = MedoidsFile(
                tuple((j, pid, tuple(X[pid])) for j, pid in enumerate(new_ids)), it
            )
            if has_converged(current, nxt):
                converged = True
                break
            current = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    t2 = time.perf_counter()

    medoids = current.to_medoid_set()
    if converged:
        labels = last_labels
    else:
        labels, _ = assign_nearest(X, medoids.coords)
    final_cost = clustered_cost(X, labels, medoids.coords, metric)
    timings = {
        "seeding_ms": (t1 - t0) * 1e3,
        "job_ms": (t2 - t1) * 1e3,
        "map_ms": sum(m.map_ms for m in job_metrics),
        "shuffle_ms": sum(m.shuffle_ms for m in job_metrics),
        "reduce_ms": sum(m.reduce_ms for m in job_metrics),
    }
    return ClusteringResult(medoids, Assignment(labels), tuple(trace), len(trace),
                            converged, final_cost, initial_medoids, timings)


def kmedoids_random_init(dataset, k: int, rng=None, config: Optional[JobConfig] = None,
                         **kwargs) -> ClusteringResult:
    """The same driver started from uniformly random distinct medoids."""
    return run_clustering(dataset, k, rng, config, init="random", **kwargs)


def write_result(result: ClusteringResult, out_dir) -> dict:
    """Write ``medoids.csv``, ``assignments.csv`` and ``trace.csv``; return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "medoids": out / "medoids.csv",
        "assignments": out / "assignments.csv",
        "trace": out / "trace.csv",
    }
    MedoidsFile.from_medoids(result.medoids, result.iterations).write(paths["medoids"])
    labels = result.assignment.labels
    table = np.column_stack([np.arange(len(labels)), labels])
    np.savetxt(paths["assignments"], table, fmt="%d", delimiter=",")
    with open(paths["trace"], "w") as fh:
        for i, c in enumerate(result.cost_trace, 1):
            fh.write(f"{i},{c!r}\n")
    return paths


def read_assignments(path) -> np.ndarray:
    table = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    labels = np.empty(len(table), dtype=np.int64)
    labels[table[:, 0]] = table[:, 1]
    return labels


def read_trace(path) -> list:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                _, cost = line.split(",")
                rows.append(float(cost))
    return rows


__all__ = [
    "MedoidsFile", "ClusteringResult", "map_assign", "reduce_update", "has_converged",
    "choose_medoid", "candidate_costs", "run_clustering", "kmedoids_random_init",
    "write_result", "read_assignments", "read_trace",
]

