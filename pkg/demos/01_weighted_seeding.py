"""
Weighted seeding
================

Initial medoids are drawn one at a time.  After the first uniform pick,
each point is chosen with probability proportional to its distance to the
nearest medoid already picked, so far-away points are favoured and
already-chosen points can never be drawn again.
"""
# %%
# Three points on a line.  Pin the first medoid at the origin and look at
# the weights the next draw uses.
import numpy as np

from medoidsmr import Rng, initialize_medoids
from medoidsmr.seeding import SeedingState, seed_next_medoid

line = np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 0.0]])
state = SeedingState.from_chosen(line, [0])
print("distance to nearest medoid:", state.d_cache)
print("draw probabilities:", state.weights / state.s_total)

# %%
# Drawing many times recovers those probabilities.
rng = Rng(7)
picks = [seed_next_medoid(state, rng).chosen[-1] for _ in range(5000)]
print("empirical:", np.bincount(picks, minlength=3) / len(picks))

# %%
# Squaring the weights (``weight="d2"``) makes the far point even likelier.
d2 = SeedingState.from_chosen(line, [0], weight="d2")
print("d2 probabilities:", d2.weights / d2.s_total)

# %%
# On clustered data the seeds tend to land in separate blobs.
from medoidsmr import BlobSpec, generate_blobs

blobs = generate_blobs(BlobSpec(2000, 4, stddev=15.0, seed=3))
seeds = initialize_medoids(blobs.coords, 4, Rng(1))
print("seed ids:", seeds.ids.tolist())
print("seed coordinates:\n", np.round(seeds.coords, 1))
