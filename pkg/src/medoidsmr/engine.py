"""In-process MapReduce: split, map, shuffle, reduce.

Map tasks run over input splits and reduce tasks over keys, both on a
thread pool whose size stands in for the number of cluster nodes.  Each map
task partitions its own output by key; the shuffle hands every reduce task
the runs for its key in split order, and the values are sorted before the
reducer sees them.  Because of that sort, the output does not depend on the
worker count, the split count, or task completion order.

A job supplies either a per-row ``map_fn`` (with ``read_split`` to produce
the rows of a split) or a vectorised ``map_split_fn`` that maps a whole
split at once and returns a :class:`RecordBatch` of parallel key/value
arrays.  Vectorised jobs are what make the thread pool useful: numpy
releases the GIL inside its array kernels.

No fault tolerance or speculative execution: a failing task fails the job.
"""
from __future__ import annotations

import os
import time
from collections import defaultdict
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import chain
from typing import Any, Callable, Iterable, Optional

import numpy as np

from .errors import InvalidInputError, JobFailure

THREADS_ENV = "MEDOIDSMR_THREADS"


@dataclass(frozen=True)
class InputSplit:
    split_id: int
    start: int
    stop: int

    @property
    def rows(self) -> range:
        return range(self.start, self.stop)

    def __len__(self):
        return self.stop - self.start


@dataclass(frozen=True)
class KeyedRecord:
    key: Any
    value: Any


@dataclass(frozen=True, eq=False)
class RecordBatch:
    """Columnar map output: ``keys[i]`` pairs with ``values[i]``."""

    keys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.keys) != len(self.values):
            raise InvalidInputError("keys and values must have equal length")

    def records(self):
        return [KeyedRecord(k, v) for k, v in zip(self.keys.tolist(), self.values.tolist())]


@dataclass(frozen=True)
class JobConfig:
    num_workers: int = 1
    num_splits: Optional[int] = None
    max_iterations: int = 100

    def __post_init__(self):
        if int(self.num_workers) < 1:
            raise InvalidInputError(f"num_workers must be >= 1, got {self.num_workers}")
        if self.num_splits is not None and int(self.num_splits) < 1:
            raise InvalidInputError(f"num_splits must be >= 1, got {self.num_splits}")
        if int(self.max_iterations) < 1:
            raise InvalidInputError(f"max_iterations must be >= 1, got {self.max_iterations}")

    @property
    def splits(self) -> int:
        return self.num_workers if self.num_splits is None else self.num_splits


@dataclass(frozen=True)
class JobDefinition:
    reduce_fn: Callable
    map_fn: Optional[Callable] = None
    map_split_fn: Optional[Callable] = None
    read_split: Optional[Callable[[InputSplit], Iterable]] = None
    shared_context: Any = None
    value_key: Optional[Callable] = None

    def __post_init__(self):
        if (self.map_fn is None) == (self.map_split_fn is None):
            raise InvalidInputError("a job needs exactly one of map_fn or map_split_fn")
        if self.map_fn is not None and self.read_split is None:
            raise InvalidInputError("a per-row map_fn needs read_split to produce rows")


@dataclass
class JobMetrics:
    map_ms: float = 0.0
    shuffle_ms: float = 0.0
    reduce_ms: float = 0.0
    total_ms: float = 0.0
    map_tasks: int = 0
    reduce_tasks: int = 0
    records: int = 0
    threads: int = 1


@dataclass(eq=False)
class JobResult(Mapping):
    """Reduce output, ``key -> list of KeyedRecord``, keys ascending."""

    outputs: dict
    metrics: JobMetrics = field(default_factory=JobMetrics)

    def __getitem__(self, key):
        return self.outputs[key]

    def __iter__(self):
        return iter(self.outputs)

    def __len__(self):
        return len(self.outputs)


def make_splits(row_count: int, num_splits: int) -> list[InputSplit]:
    """Contiguous ranges covering ``[0, row_count)``; the first splits take the remainder."""
    if row_count < 0:
        raise InvalidInputError(f"row_count must be >= 0, got {row_count}")
    if num_splits < 1:
        raise InvalidInputError(f"num_splits must be >= 1, got {num_splits}")
    base, extra = divmod(row_count, num_splits)
    splits, start = [], 0
    for i in range(num_splits):
        stop = start + base + (1 if i < extra else 0)
        splits.append(InputSplit(i, start, stop))
        start = stop
    return splits


def thread_count(num_workers: int) -> int:
    """Threads actually used: ``num_workers``, capped by ``$MEDOIDSMR_THREADS``."""
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            return max(1, min(num_workers, int(cap)))
        except ValueError:
            raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return num_workers


def _as_records(out):
    if out is None:
        return ()
    if isinstance(out, KeyedRecord):
        return (out,)
    return out


def _sort_values(values, value_key=None):
    if isinstance(values, np.ndarray):
        return np.sort(values, kind="stable")
    return sorted(values, key=value_key)


def shuffle(records: Iterable[KeyedRecord], value_key=None) -> dict:
    """Group records by key; keys ascending, each group's values sorted."""
    groups = defaultdict(list)
    for rec in records:
        groups[rec.key].append(rec.value)
    return {key: _sort_values(groups[key], value_key) for key in sorted(groups)}


def _partition_batch(batch: RecordBatch) -> dict:
    keys = np.asarray(batch.keys)
    if len(keys) == 0:
        return {}
    if keys.dtype.kind in "iu" and keys.min() >= 0 and keys.max() < 2**16:
        # 16-bit keys get numpy's radix sort
        keys = keys.astype(np.uint16)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    uniq, starts = np.unique(sorted_keys, return_index=True)
    stops = np.append(starts[1:], len(order))
    values = np.asarray(batch.values)
    return {
        k.item(): values[order[a:b]] for k, a, b in zip(uniq, starts, stops)
    }


def _map_task(job: JobDefinition, split: InputSplit):
    try:
        if job.map_split_fn is not None:
            batch = job.map_split_fn(split, job.shared_context)
            return _partition_batch(batch), len(batch.keys)
        parts = defaultdict(list)
        n = 0
        for row in job.read_split(split):
            for rec in _as_records(job.map_fn(row, job.shared_context)):
                parts[rec.key].append(rec.value)
                n += 1
        return dict(parts), n
    except JobFailure:
        raise
    except Exception as exc:
        raise JobFailure(f"map task failed: {exc}", split_id=split.split_id) from exc


def _reduce_task(job: JobDefinition, key, runs):
    try:
        if all(isinstance(r, np.ndarray) for r in runs):
            values = _sort_values(np.concatenate(runs))
        else:
            values = _sort_values(list(chain.from_iterable(runs)), job.value_key)
        return list(_as_records(job.reduce_fn(key, values, job.shared_context)))
    except JobFailure:
        raise
    except Exception as exc:
        raise JobFailure(f"reduce task failed: {exc}", key=key) from exc


def run_job(job: JobDefinition, splits: list[InputSplit], config: JobConfig,
            executor: Optional[ThreadPoolExecutor] = None) -> JobResult:
    threads = thread_count(config.num_workers)
    metrics = JobMetrics(map_tasks=len(splits), threads=threads)
    own_pool = executor is None and threads > 1
    pool = ThreadPoolExecutor(max_workers=threads) if own_pool else executor
    t0 = time.perf_counter()
    try:
        if pool is None:
            mapped = [_map_task(job, s) for s in splits]
        else:
            # results are collected in split order, never completion order
            futures = [pool.submit(_map_task, job, s) for s in splits]
            mapped = [f.result() for f in futures]
        t1 = time.perf_counter()

        groups = defaultdict(list)
        for parts, n in mapped:
            metrics.records += n
            for key, run in parts.items():
                groups[key].append(run)
        keys = sorted(groups)
        t2 = time.perf_counter()

        if pool is None:
            reduced = [_reduce_task(job, k, groups[k]) for k in keys]
        else:
            futures = [pool.submit(_reduce_task, job, k, groups[k]) for k in keys]
            reduced = [f.result() for f in futures]
        t3 = time.perf_counter()
    finally:
        if own_pool:
            pool.shutdown()

    metrics.reduce_tasks = len(keys)
    metrics.map_ms = (t1 - t0) * 1e3
    metrics.shuffle_ms = (t2 - t1) * 1e3
    metrics.reduce_ms = (t3 - t2) * 1e3
    metrics.total_ms = (t3 - t0) * 1e3
    return JobResult(dict(zip(keys, reduced)), metrics)
