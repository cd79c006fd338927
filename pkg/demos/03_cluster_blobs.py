"""
Clustering synthetic blobs
==========================

``run_clustering`` seeds k medoids and then alternates two MapReduce
phases until the medoids stop changing: map assigns each point to its
nearest medoid, reduce picks the member of each cluster with the smallest
within-cluster squared distance as the new medoid.
"""
# %%
import numpy as np

from medoidsmr import BlobSpec, JobConfig, Rng, generate_blobs, run_clustering

data = generate_blobs(BlobSpec(50_000, 6, stddev=25.0, seed=11))
result = run_clustering(data, 6, Rng(42), JobConfig(num_workers=4))
print(f"converged={result.converged} after {result.iterations} iterations")
print("cost per iteration:", [f"{c:.4g}" for c in result.cost_trace])
print("cluster sizes:", np.bincount(result.assignment.labels))

# %%
# Random initial medoids usually need more iterations to settle.
random_start = run_clustering(data, 6, Rng(42), init="random")
print("random init iterations:", random_start.iterations,
      "cost ratio:", random_start.cost / result.cost)

# %%
# Results can be written out and inspected later.
import tempfile

from medoidsmr import write_result

with tempfile.TemporaryDirectory() as out:
    for path in write_result(result, out).values():
        print(path.name, path.read_text().splitlines()[:2])

# %%
# Plot if matplotlib happens to be installed.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    X = data.coords[::10]
    plt.scatter(X[:, 0], X[:, 1], c=result.assignment.labels[::10], s=2, cmap="tab10")
    plt.scatter(*result.medoids.coords.T, c="k", marker="x", s=80)
    plt.title("medoids over blobs")
    plt.savefig("blobs.png", dpi=100)
    print("saved blobs.png")
