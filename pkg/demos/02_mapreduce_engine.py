"""
The in-process MapReduce engine
===============================

A job is a map function, a reduce function and a way to read rows for a
split.  Map tasks run on a thread pool; the shuffle groups records by key
and sorts each group's values, so the output never depends on how many
workers or splits were used.
"""
# %%
# The classic word count.
from medoidsmr.engine import JobConfig, JobDefinition, KeyedRecord, make_splits, run_job

lines = ["the quick brown fox", "the lazy dog", "quick quick", "brown dog the"]

job = JobDefinition(
    map_fn=lambda row, ctx: [KeyedRecord(word, 1) for word in row[1].split()],
    reduce_fn=lambda word, ones, ctx: KeyedRecord(word, sum(ones)),
    read_split=lambda split: ((i, lines[i]) for i in split.rows),
)
out = run_job(job, make_splits(len(lines), 2), JobConfig(num_workers=2))
print({word: records[0].value for word, records in out.items()})
print(out.metrics)

# %%
# Splits are contiguous row ranges; leftover rows go to the first splits.
for split in make_splits(10, 3):
    print(split.split_id, list(split.rows))

# %%
# Same answer with one worker or eight.
for workers in (1, 8):
    result = run_job(job, make_splits(len(lines), workers), JobConfig(num_workers=workers))
    print(workers, dict((w, r[0].value) for w, r in result.items()))
