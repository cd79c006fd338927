"""Speedup benchmarks: fixed datasets, growing worker counts.

Every cell of a dataset starts from the same seeded medoids, so all cells
do identical work; a cell whose clustering differs from the others aborts
the run, since its timing would be meaningless.  Wall time covers the
iterative job only; seeding is timed once per dataset and reported apart.
Speedup is relative to the smallest worker count in the plan.
"""
from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .core import as_array
from .engine import JobConfig
from .errors import DeterminismError, InvalidInputError
from .job import run_clustering
from .rng import Rng
from .seeding import initialize_medoids

BENCH_COLUMNS = ("dataset", "workers", "time_ms", "iterations", "cost", "speedup")


def compute_speedup(t_base: float, t_n: float) -> float:
    if not (t_base > 0 and t_n > 0):
        raise InvalidInputError(f"timings must be positive, got {t_base} and {t_n}")
    return t_base / t_n


@dataclass(frozen=True)
class BenchPlan:
    datasets: Sequence  # (label, dataset) pairs
    worker_counts: Sequence[int]
    k: int
    seed: int = 0
    repetitions: int = 3
    max_iterations: int = 100
    num_splits: int | None = None

    def __post_init__(self):
        counts = list(self.worker_counts)
        if not counts or any(w < 1 for w in counts):
            raise InvalidInputError(f"worker counts must be positive, got {counts}")
        if counts != sorted(set(counts)):
            raise InvalidInputError(f"worker counts must be ascending and distinct, got {counts}")
        if self.repetitions < 1:
            raise InvalidInputError(f"repetitions must be >= 1, got {self.repetitions}")
        labels = [label for label, _ in self.datasets]
        if len(set(labels)) != len(labels):
            raise InvalidInputError(f"dataset labels must be unique, got {labels}")


@dataclass(frozen=True)
class BenchRow:
    dataset: str
    workers: int
    time_ms: float
    iterations: int
    cost: float
    speedup: float = 1.0


@dataclass
class BenchReport:
    rows: list
    seeding_ms: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)

    @property
    def baseline_workers(self) -> dict:
        base = {}
        for r in self.rows:
            base[r.dataset] = min(base.get(r.dataset, r.workers), r.workers)
        return base

    def with_speedups(self) -> "BenchReport":
        base_time = {}
        for label, w in self.baseline_workers.items():
            base_time[label] = next(
                r.time_ms for r in self.rows if r.dataset == label and r.workers == w
            )
        rows = [
            BenchRow(r.dataset, r.workers, r.time_ms, r.iterations, r.cost,
                     compute_speedup(base_time[r.dataset], r.time_ms))
            for r in self.rows
        ]
        return BenchReport(rows, dict(self.seeding_ms), dict(self.timings_ms))

    def speedup(self, dataset: str, workers: int) -> float:
        return next(r.speedup for r in self.rows if r.dataset == dataset and r.workers == workers)

    def times(self, dataset: str) -> dict:
        return {r.workers: r.time_ms for r in self.rows if r.dataset == dataset}


def run_benchmark(plan: BenchPlan, progress=None) -> BenchReport:
    rows, seeding_ms, all_times = [], {}, {}
    for label, dataset in plan.datasets:
        X = as_array(dataset)
        initial = initialize_medoids(X, plan.k, Rng(plan.seed))
        reference = None
        for workers in plan.worker_counts:
            config = JobConfig(num_workers=workers, num_splits=plan.num_splits,
                               max_iterations=plan.max_iterations)
            times = []
            for _ in range(plan.repetitions):
                result = run_clustering(X, plan.k, config=config, initial_medoids=initial)
                if reference is None:
                    reference = result
                elif not result.same_clustering(reference):
                    raise DeterminismError(
                        f"dataset {label!r}: {workers} workers produced a different clustering "
                        f"({result.iterations} iterations, cost {result.cost!r}) than the "
                        f"reference ({reference.iterations} iterations, cost {reference.cost!r})"
                    )
                times.append(result.timings["job_ms"])
            all_times[(label, workers)] = times
            rows.append(BenchRow(label, workers, statistics.median(times),
                                 reference.iterations, reference.cost))
            if progress:
                progress(rows[-1])
        seeding_ms[label] = reference.timings["seeding_ms"] if reference else 0.0
    return BenchReport(rows, seeding_ms, all_times).with_speedups()


def emit_report(report: BenchReport, out_dir, formats=("csv", "json")) -> dict:
    """Write ``bench.csv`` and the plot-ready ``bench.json``; return their paths."""
    if not report.rows:
        raise InvalidInputError("nothing to emit: the report has no rows")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if "csv" in formats:
        paths["csv"] = out / "bench.csv"
        with open(paths["csv"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(BENCH_COLUMNS)
            for r in report.rows:
                writer.writerow([r.dataset, r.workers, repr(r.time_ms), r.iterations,
                                 repr(r.cost), repr(r.speedup)])
    if "json" in formats:
        paths["json"] = out / "bench.json"
        series = []
        for label, base in report.baseline_workers.items():
            mine = [r for r in report.rows if r.dataset == label]
            series.append({
                "dataset": label,
                "baseline_workers": base,
                "workers": [r.workers for r in mine],
                "time_ms": [r.time_ms for r in mine],
                "speedup": [r.speedup for r in mine],
                "iterations": mine[0].iterations,
                "cost": mine[0].cost,
                "seeding_ms": report.seeding_ms.get(label),
            })
        paths["json"].write_text(json.dumps({"series": series}, indent=2))
    return paths


def read_bench_csv(path) -> BenchReport:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != BENCH_COLUMNS:
            raise InvalidInputError(f"unexpected bench.csv header {header}")
        rows = [
            BenchRow(d, int(w), float(t), int(i), float(c), float(s))
            for d, w, t, i, c, s in reader
        ]
    return BenchReport(rows)
