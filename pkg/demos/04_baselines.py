"""
Serial baselines and the exhaustive optimum
===========================================

PAM tries every (medoid, non-medoid) swap and applies the best one until
none helps.  CLARANS samples swaps at random and takes the first that
helps, restarting a few times.  On tiny inputs every k-subset can be
scored, which gives the true optimum to compare against.
"""
# %%
import time

import numpy as np

from medoidsmr import Rng, brute_force_optimum, clarans, pam, run_clustering
from medoidsmr.baselines import SwapProposal, swap_delta
from medoidsmr.core import Assignment, MedoidSet
from medoidsmr.data_io import RowStore

X = np.random.default_rng(0).uniform(0, 100, (11, 2))
_, optimum = brute_force_optimum(X, 3)
print(f"optimum {optimum:.2f}")
for name, run in [("parallel", lambda: run_clustering(X, 3, Rng(1))),
                  ("pam", lambda: pam(X, 3, Rng(1))),
                  ("clarans", lambda: clarans(X, 3, rng=Rng(1)))]:
    print(f"{name:9s} {run().cost:.2f}")

# %%
# Scoring one swap without reassigning everything.
points = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
medoids = MedoidSet.from_ids(points, [0])
proposal = SwapProposal(medoids[0], RowStore(points).point(1))
print("delta:", swap_delta(proposal, points, medoids, Assignment.nearest(points, medoids)))

# %%
# Timing on a larger set: PAM scales badly with n.
Y = np.random.default_rng(1).normal(size=(1500, 2))
for name, run in [("parallel", lambda: run_clustering(Y, 5, Rng(2))),
                  ("pam", lambda: pam(Y, 5, Rng(2))),
                  ("clarans", lambda: clarans(Y, 5, rng=Rng(2)))]:
    t0 = time.perf_counter()
    cost = run().cost
    print(f"{name:9s} cost {cost:9.2f}  {1e3 * (time.perf_counter() - t0):8.1f} ms")
