"""
Scaling with worker count
=========================

Every cell of the benchmark starts from the same seeded medoids, so the
clusterings must match exactly; only the time may differ.  Speedup is
measured against the smallest worker count.  Real gains need as many
physical cores as workers.
"""
# %%
import os
import tempfile

from medoidsmr import BenchPlan, BlobSpec, emit_report, generate_blobs, run_benchmark

print("usable cores:", len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count())
datasets = [(f"n={n}", generate_blobs(BlobSpec(n, 16, seed=i))) for i, n in enumerate((50_000, 200_000))]
report = run_benchmark(BenchPlan(datasets, [1, 2, 4], k=16, repetitions=3))
for row in report.rows:
    print(f"{row.dataset:10s} workers={row.workers}  {row.time_ms:8.1f} ms  speedup {row.speedup:.2f}")

# %%
with tempfile.TemporaryDirectory() as out:
    paths = emit_report(report, out)
    print(paths["csv"].read_text())
