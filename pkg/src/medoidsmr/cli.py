"""Command line: ``medoidsmr {gen,cluster,compare,bench,oracle}``."""
from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .baselines import brute_force_optimum, clarans, default_maxneighbor, pam
from .bench import BenchPlan, emit_report, run_benchmark
from .data_io import BlobSpec, generate_blobs, load_store, save_store
from .engine import JobConfig
from .errors import MedoidsError
from .job import INITS, run_clustering, write_result
from .rng import MAX_SEED, Rng

ALGOS = ("kmpp", "kmedoids", "pam", "clarans")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medoidsmr",
        description="Parallel k-medoids++ clustering on an in-process MapReduce engine.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("--input", required=True, help="CSV (x1,...,xd or id,x1,...,xd) or .npy file")
        p.add_argument("--dim", type=_positive_int, default=2, help="point dimension (default 2)")
        p.add_argument("--k", type=_positive_int, required=True, help="number of medoids")

    g = sub.add_parser("gen", help="write a synthetic Gaussian blob dataset")
    g.add_argument("--n", type=_positive_int, required=True, help="number of points")
    g.add_argument("--centers", type=_positive_int, default=4, help="number of blobs")
    g.add_argument("--stddev", type=_positive_float, default=10.0, help="blob standard deviation")
    g.add_argument("--box", type=float, nargs=2, default=(0.0, 1000.0), metavar=("LO", "HI"),
                   help="range for blob centers on every axis")
    g.add_argument("--dim", type=_positive_int, default=2, help="point dimension")
    g.add_argument("--seed", type=_seed, default=0, help="u64 random seed")
    g.add_argument("--out", required=True, help="output path (.csv, or .npy for binary)")

    c = sub.add_parser("cluster", help="run parallel k-medoids and write result files")
    data_args(c)
    c.add_argument("--seed", type=_seed, default=0, help="u64 random seed for seeding")
    c.add_argument("--workers", type=_positive_int, default=1, help="worker threads (node analogue)")
    c.add_argument("--splits", type=_positive_int, default=None,
                   help="input splits per job (default: one per worker)")
    c.add_argument("--max-iter", type=_positive_int, default=100, help="iteration cap")
    c.add_argument("--init", choices=INITS, default="kmpp",
                   help="kmpp: weighted seeding; random: uniform distinct medoids")
    c.add_argument("--metric", choices=("squared", "plain"), default="squared",
                   help="objective: squared (default) or plain Euclidean distance")
    c.add_argument("--seeding-weight", choices=("d", "d2"), default="d",
                   help="seeding weight D(p) (default) or D(p)^2")
    c.add_argument("--out-dir", required=True,
                   help="directory for medoids.csv, assignments.csv, trace.csv")

    m = sub.add_parser("compare", help="time the parallel driver against serial baselines")
    data_args(m)
    m.add_argument("--algo", choices=ALGOS, action="append",
                   help="algorithm to run; repeatable (default: all)")
    m.add_argument("--seed", type=_seed, default=0, help="u64 random seed")
    m.add_argument("--workers", type=_positive_int, default=1,
                   help="workers for kmpp/kmedoids (baselines are single-threaded)")
    m.add_argument("--numlocal", type=_positive_int, default=2, help="CLARANS restarts")
    m.add_argument("--maxneighbor", type=_positive_int, default=None,
                   help="CLARANS neighbours per local search (default max(250, 1.25%% of k(n-k)))")

    b = sub.add_parser("bench", help="speedup benchmark over worker counts")
    b.add_argument("--input", action="append",
                   help="dataset file; repeatable (default: generate --sizes blobs)")
    b.add_argument("--sizes", type=_int_list, default=[20_000, 80_000, 200_000],
                   help="comma-separated blob sizes when no --input is given")
    b.add_argument("--dim", type=_positive_int, default=2, help="point dimension")
    b.add_argument("--workers", type=_int_list, default=[1, 2, 4],
                   help="comma-separated ascending worker counts")
    b.add_argument("--k", type=_positive_int, default=16, help="number of medoids")
    b.add_argument("--seed", type=_seed, default=0, help="u64 random seed")
    b.add_argument("--reps", type=_positive_int, default=3, help="repetitions per cell (median)")
    b.add_argument("--max-iter", type=_positive_int, default=100, help="iteration cap")
    b.add_argument("--out-dir", required=True, help="directory for bench.csv and bench.json")

    o = sub.add_parser("oracle", help="print the exhaustive global optimum cost")
    data_args(o)
    return parser


def _cmd_gen(args):
    spec = BlobSpec(args.n, args.centers, tuple(args.box), args.stddev, args.seed, args.dim)
    path = save_store(generate_blobs(spec), args.out)
    print(f"wrote {args.n} points to {path}")


def _cmd_cluster(args):
    store = load_store(args.input, args.dim)
    config = JobConfig(num_workers=args.workers, num_splits=args.splits,
                       max_iterations=args.max_iter)
    result = run_clustering(store, args.k, Rng(args.seed), config, init=args.init,
                            metric=args.metric, seeding_weight=args.seeding_weight)
    write_result(result, args.out_dir)
    state = "converged" if result.converged else "stopped at --max-iter"
    print(f"{state} after {result.iterations} iterations; cost {result.cost!r}; "
          f"job {result.timings['job_ms']:.1f} ms; results in {args.out_dir}")


def _cmd_compare(args):
    store = load_store(args.input, args.dim)
    algos = args.algo or list(ALGOS)
    print("algo,time_ms,iterations,cost")
    for algo in algos:
        t0 = time.perf_counter()
        if algo in ("kmpp", "kmedoids"):
            init = "kmpp" if algo == "kmpp" else "random"
            r = run_clustering(store, args.k, Rng(args.seed), JobConfig(num_workers=args.workers),
                               init=init)
        elif algo == "pam":
            r = pam(store, args.k, Rng(args.seed))
        else:
            maxneighbor = args.maxneighbor or default_maxneighbor(len(store), args.k)
            r = clarans(store, args.k, args.numlocal, maxneighbor, Rng(args.seed))
        ms = (time.perf_counter() - t0) * 1e3
        print(f"{algo},{ms:.1f},{r.iterations},{r.cost!r}")


def _cmd_bench(args):
    if args.input:
        datasets = [(path, load_store(path, args.dim)) for path in args.input]
    else:
        datasets = [
            (f"blobs_{n}", generate_blobs(BlobSpec(n, args.k, seed=args.seed + i, dimension=args.dim)))
            for i, n in enumerate(args.sizes)
        ]
    plan = BenchPlan(datasets, args.workers, args.k, args.seed, args.reps, args.max_iter)

    def progress(row):
        print(f"  {row.dataset}: {row.workers} workers, {row.time_ms:.1f} ms", file=sys.stderr)

    report = run_benchmark(plan, progress)
    paths = emit_report(report, args.out_dir)
    print(f"speedup baseline: {plan.worker_counts[0]} worker(s)")
    print(",".join(("dataset", "workers", "time_ms", "iterations", "cost", "speedup")))
    for r in report.rows:
        print(f"{r.dataset},{r.workers},{r.time_ms:.1f},{r.iterations},{r.cost:.6g},{r.speedup:.3f}")
    print(f"wrote {paths['csv']} and {paths['json']}")


def _cmd_oracle(args):
    store = load_store(args.input, args.dim)
    medoids, cost = brute_force_optimum(store, args.k)
    print(f"optimum cost {cost!r} with medoids {medoids.ids.tolist()}")


COMMANDS = {
    "gen": _cmd_gen,
    "cluster": _cmd_cluster,
    "compare": _cmd_compare,
    "bench": _cmd_bench,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (MedoidsError, OSError) as exc:
        print(f"medoidsmr {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
