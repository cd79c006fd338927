import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medoidsmr.core import MedoidSet, Point, assign_nearest
from medoidsmr.engine import JobConfig
from medoidsmr.errors import InvalidInputError, ParseError
from medoidsmr.job import (MedoidsFile, candidate_costs, choose_medoid, has_converged,
                           kmedoids_random_init, map_assign, read_assignments, read_trace,
                           reduce_update, run_clustering, write_result)
from medoidsmr.rng import Rng

FOUR = np.array([[0, 0], [1, 0], [10, 0], [11, 0]], dtype=float)


def py_cost(points, medoid_idx):
    """Nearest-medoid objective in plain Python."""
    return sum(min((p[0] - points[m][0]) ** 2 + (p[1] - points[m][1]) ** 2 for m in medoid_idx)
               for p in points)


def py_optimum(points, k):
    return min(py_cost(points, c) for c in itertools.combinations(range(len(points)), k))


def snapshot(X, ids):
    return MedoidsFile.from_medoids(MedoidSet.from_ids(X, ids))


def test_map_assign_examples():
    X = np.array([[0, 0], [10, 0]], dtype=float)
    snap = snapshot(X, [0, 1])
    assert map_assign((5, (3.0, 0.0)), snap).key == 0
    rec = map_assign((1, (10.0, 0.0)), snap)
    assert rec.key == 1 and rec.value == Point(1, (10.0, 0.0))
    assert map_assign((9, (5.0, 0.0)), snap).key == 0
    assert map_assign((4, "3,0"), snap).key == 0


def test_map_assign_malformed_row():
    snap = snapshot(np.array([[0.0, 0.0]]), [0])
    with pytest.raises(ParseError, match="row 17"):
        map_assign((17, "3,x"), snap)
    with pytest.raises(ParseError, match="row 3"):
        map_assign((3, (1.0, 2.0, 3.0)), snap)


def test_reduce_update_hand_enumeration():
    X = np.array([[0, 0], [1, 0], [5, 0]], dtype=float)
    assert candidate_costs(X).tolist() == [26.0, 17.0, 41.0]
    pts = [Point(i, tuple(x)) for i, x in enumerate(X)]
    cid, med = reduce_update(0, pts, snapshot(X, [0]))
    assert cid == 0 and med.point.id == 1


def test_reduce_update_single_point():
    X = np.array([[2.0, 3.0]])
    _, med = reduce_update(0, [Point(0, (2.0, 3.0))], snapshot(X, [0]))
    assert med.point.id == 0


def test_reduce_update_tie_keeps_incumbent():
    # (0,0) and (2,0) cost the same around the middle point
    X = np.array([[0, 0], [1, 0], [2, 0]], dtype=float)
    pts = [Point(i, tuple(x)) for i, x in enumerate(X)]
    # incumbent is the middle point, optimal and unique
    assert reduce_update(0, pts, snapshot(X, [1]))[1].point.id == 1
    Y = np.array([[0, 0], [2, 0]], dtype=float)
    pts = [Point(i, tuple(x)) for i, x in enumerate(Y)]
    assert reduce_update(0, pts, snapshot(Y, [1]))[1].point.id == 1
    assert reduce_update(0, pts, snapshot(Y, [0]))[1].point.id == 0


def test_reduce_update_secondary_tie_smallest_id():
    # incumbent (10,0) is worst; (0,1) and (0,-1) tie, smaller id wins
    X = np.array([[0, 1], [0, -1], [10, 0]], dtype=float)
    costs = candidate_costs(X)
    assert costs[0] == costs[1] < costs[2]
    pts = [Point(i, tuple(x)) for i, x in enumerate(X)]
    assert reduce_update(0, pts, snapshot(X, [2]))[1].point.id == 0


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1), st.sampled_from(["squared", "plain"]))
def test_choose_medoid_matches_exhaustive(m, seed, metric):
    rng = np.random.default_rng(seed)
    Xg = rng.uniform(-100, 100, (m, 2))
    inc = int(rng.integers(m))
    best, inc_cost = choose_medoid(Xg, inc, metric)
    costs = candidate_costs(Xg, metric)
    assert inc_cost == costs[inc]
    assert math.isclose(costs[best], costs.min(), rel_tol=1e-12)
    if best != inc:
        assert costs[best] < costs[inc]


def test_has_converged():
    X = FOUR
    a = MedoidsFile.from_medoids(MedoidSet.from_ids(X, [0, 2]), iteration=1)
    assert has_converged(a, a)
    assert not has_converged(a, MedoidsFile.from_medoids(MedoidSet.from_ids(X, [1, 2])))
    assert has_converged(a, MedoidsFile.from_medoids(MedoidSet.from_ids(X, [0, 2]), iteration=5))
    with pytest.raises(InvalidInputError):
        has_converged(a, MedoidsFile.from_medoids(MedoidSet.from_ids(X, [0])))


def test_medoids_file_format(tmp_path):
    X = np.array([[0.1, 2.5], [1e-17, -3.0], [7.0, 8.0]])
    f = MedoidsFile.from_medoids(MedoidSet.from_ids(X, [2, 1]), iteration=4)
    path = tmp_path / "medoids.csv"
    f.write(path)
    lines = path.read_text().splitlines()
    assert lines == ["#iteration=4", "0,2,7.0,8.0", "1,1,1e-17,-3.0"]
    g = MedoidsFile.read(path)
    assert g.entries == f.entries and g.iteration == 4
    assert g.to_medoid_set() == f.to_medoid_set()


def test_medoids_file_bad(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("#iteration=0\n0,1,x,2\n")
    with pytest.raises(ParseError, match="line 2"):
        MedoidsFile.read(p)
    p.write_text("1,1,0,2\n")
    with pytest.raises(ParseError):
        MedoidsFile.read(p)


def test_k_equals_n():
    X = np.random.default_rng(2).uniform(0, 10, (9, 2))
    r = run_clustering(X, 9, Rng(0))
    assert r.iterations == 1 and r.converged and r.cost == 0.0


def test_two_pairs_reaches_optimum():
    for seed in range(20):
        for init in ("kmpp", "random"):
            r = run_clustering(FOUR, 2, Rng(seed), init=init)
            assert r.cost == 2.0
            assert sorted(r.medoids.ids.tolist())[0] in (0, 1)
            assert sorted(r.medoids.ids.tolist())[1] in (2, 3)


@pytest.mark.parametrize("seed", range(25))
def test_small_instances_against_exhaustive_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 13))
    k = int(rng.integers(1, 4))
    X = rng.uniform(0, 100, (n, 2))
    r = run_clustering(X, k, Rng(seed))
    pts = X.tolist()
    assert r.cost >= py_optimum(pts, k) * (1 - 1e-12)
    # no single within-cluster medoid replacement helps
    ids = r.medoids.ids.tolist()
    for j in range(k):
        for q in np.flatnonzero(r.assignment.labels == j):
            members = [pts[i] for i in np.flatnonzero(r.assignment.labels == j)]
            here = sum((a - pts[ids[j]][0]) ** 2 + (b - pts[ids[j]][1]) ** 2 for a, b in members)
            there = sum((a - pts[q][0]) ** 2 + (b - pts[q][1]) ** 2 for a, b in members)
            assert there >= here * (1 - 1e-12)


def test_local_optimality_medium():
    rng = np.random.default_rng(11)
    X = np.concatenate([rng.normal(c, 3, (100, 2)) for c in ((0, 0), (30, 0), (0, 30), (30, 30))])
    X = np.concatenate([X, rng.uniform(-10, 40, (100, 2))])
    r = run_clustering(X, 5, Rng(1))
    assert r.converged
    base = r.cost
    ids = r.medoids.ids
    labels = r.assignment.labels
    for j in range(5):
        members = X[labels == j]
        here = ((members - X[ids[j]]) ** 2).sum()
        for q in np.flatnonzero(labels == j):
            # replacement with the assignment held fixed
            there = ((members - X[q]) ** 2).sum()
            assert base - here + there >= base * (1 - 1e-12)


def test_cost_trace_monotone_and_consistent():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(3000, 2)) * 4 + rng.integers(0, 5, (3000, 1)) * 15
    r = run_clustering(X, 6, Rng(2), JobConfig(num_workers=3))
    assert all(b <= a for a, b in zip(r.cost_trace, r.cost_trace[1:]))
    assert r.cost == r.cost_trace[-1]
    assert len(r.cost_trace) == r.iterations
    r.assignment.validate(r.medoids, len(X))
    labels, _ = assign_nearest(X, r.medoids.coords)
    assert np.array_equal(labels, r.assignment.labels)


def test_max_iterations_stop():
    rng = np.random.default_rng(8)
    X = rng.uniform(0, 100, (2000, 2))
    full = run_clustering(X, 10, Rng(4))
    assert full.iterations > 2
    capped = run_clustering(X, 10, Rng(4), JobConfig(max_iterations=2))
    assert not capped.converged and capped.iterations == 2
    labels, _ = assign_nearest(X, capped.medoids.coords)
    assert np.array_equal(labels, capped.assignment.labels)
    assert capped.cost <= capped.cost_trace[-1]


def test_row_wise_job_matches_vectorised():
    rng = np.random.default_rng(9)
    X = rng.uniform(0, 50, (400, 2))
    a = run_clustering(X, 4, Rng(3), JobConfig(num_workers=2))
    b = run_clustering(X, 4, Rng(3), JobConfig(num_workers=3), row_wise=True)
    assert a.same_clustering(b)


@pytest.mark.parametrize("workers", [2, 4, 8])
def test_worker_determinism(workers):
    rng = np.random.default_rng(10)
    X = rng.normal(size=(5000, 2)) * 10
    a = run_clustering(X, 7, Rng(6))
    b = run_clustering(X, 7, Rng(6), JobConfig(num_workers=workers))
    c = run_clustering(X, 7, Rng(6), JobConfig(num_workers=workers, num_splits=4 * workers))
    assert a.same_clustering(b) and a.same_clustering(c)


def test_plain_metric_runs():
    rng = np.random.default_rng(12)
    X = rng.uniform(0, 10, (200, 2))
    r = run_clustering(X, 3, Rng(0), metric="plain")
    assert r.converged
    assert all(b <= a for a, b in zip(r.cost_trace, r.cost_trace[1:]))
    labels, d2 = assign_nearest(X, r.medoids.coords)
    assert math.isclose(r.cost, np.sqrt(d2).sum(), rel_tol=1e-12)


def test_random_init_driver():
    X = np.random.default_rng(1).uniform(0, 10, (6, 2))
    r = kmedoids_random_init(X, 6, Rng(0))
    assert r.iterations == 1 and r.cost == 0.0


def test_run_clustering_errors():
    with pytest.raises(InvalidInputError):
        run_clustering(FOUR, 0, Rng(0))
    with pytest.raises(InvalidInputError):
        run_clustering(np.empty((0, 2)), 1, Rng(0))
    with pytest.raises(InvalidInputError):
        run_clustering(FOUR, 2, Rng(0), init="bogus")


def test_result_files(tmp_path):
    r = run_clustering(FOUR, 2, Rng(3))
    paths = write_result(r, tmp_path)
    assert read_assignments(paths["assignments"]).tolist() == r.assignment.labels.tolist()
    assert tuple(read_trace(paths["trace"])) == r.cost_trace
    assert MedoidsFile.read(paths["medoids"]).point_ids == tuple(r.medoids.ids.tolist())
    first = paths["trace"].read_text().splitlines()[0]
    assert first.startswith("1,")
    assert paths["assignments"].read_text().splitlines()[0] == "0," + str(r.assignment.labels[0])


def relabel_by_cases(labels, own, second_idx, second, dh, i, n_medoids):
    """Per-point outcome of swapping medoid i for candidate h, case by case."""
    out = labels.copy()
    for p in range(len(labels)):
        if labels[p] == i:
            # lost its medoid: next-nearest existing medoid or the newcomer
            out[p] = second_idx[p] if second[p] < dh[p] else i
        elif dh[p] < own[p]:
            out[p] = i  # newcomer is closer
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(5, 40), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_swap_cases_match_full_reassignment(n, k, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 100, (n, 2))
    ids = rng.choice(n, k, replace=False)
    labels, own = assign_nearest(X, X[ids])
    i = int(rng.integers(k))
    h = int(rng.choice(np.setdiff1d(np.arange(n), ids)))
    D = np.column_stack([((X - X[m]) ** 2).sum(axis=1) for m in ids])
    D[np.arange(n), labels] = np.inf
    D[:, i] = np.inf
    second_idx = D.argmin(axis=1)
    second = D.min(axis=1)
    dh = ((X - X[h]) ** 2).sum(axis=1)
    by_cases = relabel_by_cases(labels, own, second_idx, second, dh, i, k)
    swapped = ids.copy()
    swapped[i] = h
    full, _ = assign_nearest(X, X[swapped])
    assert np.array_equal(by_cases, full)
