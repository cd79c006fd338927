"""Parallel k-medoids++ spatial clustering on an in-process MapReduce engine.

Modules
-------
core       -- points, medoid sets, distances and the clustering objective
seeding    -- k-medoids++ weighted-probability initialization
engine     -- split / map / shuffle / reduce execution on a thread pool
job        -- the iterative assign/update clustering job and its driver
baselines  -- PAM, CLARANS and an exhaustive optimum
data_io    -- row store, CSV ingestion, synthetic blobs
bench      -- speedup benchmarks and report emission
cli        -- the ``medoidsmr`` command
"""
__version__ = "0.1.0"

from .baselines import SwapProposal, brute_force_optimum, clarans, pam, swap_delta
from .bench import BenchPlan, BenchReport, compute_speedup, emit_report, run_benchmark
from .core import (Assignment, Medoid, MedoidSet, Point, distance, nearest_medoid,
                   squared_distance, total_cost)
from .data_io import BlobSpec, RowStore, generate_blobs, ingest_csv, read_range
from .engine import InputSplit, JobConfig, JobDefinition, KeyedRecord, make_splits, run_job, shuffle
from .errors import (CapacityError, DegenerateDatasetError, DeterminismError, InvalidInputError,
                     JobFailure, MedoidsError, ParseError, SchemaError)
from .job import ClusteringResult, MedoidsFile, kmedoids_random_init, run_clustering, write_result
from .rng import Rng
from .seeding import initialize_medoids

__all__ = [
    "Assignment", "Medoid", "MedoidSet", "Point", "distance", "nearest_medoid",
    "squared_distance", "total_cost", "BlobSpec", "RowStore", "generate_blobs", "ingest_csv",
    "read_range", "InputSplit", "JobConfig", "JobDefinition", "KeyedRecord", "make_splits",
    "run_job", "shuffle", "CapacityError", "DegenerateDatasetError", "InvalidInputError",
    "JobFailure", "MedoidsError", "ParseError", "SchemaError", "DeterminismError",
    "ClusteringResult", "MedoidsFile", "kmedoids_random_init", "run_clustering", "write_result",
    "Rng", "initialize_medoids", "SwapProposal", "swap_delta", "pam", "clarans",
    "brute_force_optimum", "BenchPlan", "BenchReport", "compute_speedup", "run_benchmark",
    "emit_report",
]
