"""Experiment-scale checks on seeded uniform instances. Run with ``pytest -m slow``."""
import math

import numpy as np
import pytest

from agents.bench_agent import BenchConfig, InstanceSpec, run_bench, scaling_slope
from agents.greedy_agent import run_greedy
from agents.local_search_agent import run_local_search
from agents.merge_agent import bridge_weight, compute_bridges, merge_all, partition_solve, prim_tree
from agents.planner_agent import DIVIDE_AND_CONQUER
from main import create_and_run_solver, solve
from models.errors import ContractViolation
from models.instance import Objective
from models.params import SolveParams
from utils.generators import generate_instance
from utils.verification import brute_force_optimum, hull_area2, score

pytestmark = pytest.mark.slow

SEEDS = range(10)


def greedy_score(instance, params):
    return abs(run_greedy(instance, params).doubled_area) / hull_area2(instance)


def test_small_cases_are_optimal(square_center, square_notch):
    for instance, objective, expected in ((square_center, Objective.MIN, 0.75), (square_notch, Objective.MAX, 0.95)):
        state = create_and_run_solver(instance, SolveParams(objective=objective))
        assert state["report"].score == pytest.approx(expected)
        assert brute_force_optimum(instance, objective).score == pytest.approx(expected)


def test_uniform_score_band():
    best, worst = [], []
    for seed in SEEDS:
        instance = generate_instance(500, seed=seed)
        for objective, scores in ((Objective.MAX, best), (Objective.MIN, worst)):
            state = create_and_run_solver(instance, SolveParams(objective=objective, hood=2))
            assert state["report"].valid
            assert state["greedy_score"] is not None
            scores.append(state["report"].score)
    assert np.mean(best) >= 0.84
    assert np.mean(worst) <= 0.18


def test_edge_penalty_helps_greedy():
    wins = 0
    for seed in SEEDS:
        instance = generate_instance(1000, seed=100 + seed)
        with_penalty = greedy_score(instance, SolveParams(pen=90, hops=0))
        without = greedy_score(instance, SolveParams(pen=math.inf, hops=0))
        wins += with_penalty > without
    assert wins >= 8


def test_longer_paths_help_local_search():
    wins = 0
    for seed in SEEDS:
        instance = generate_instance(1000, seed=200 + seed)
        start = run_greedy(instance, SolveParams())
        short = run_local_search(start.copy(), SolveParams(hops=1))
        long = run_local_search(start.copy(), SolveParams(hops=10))
        wins += score(long, instance).score >= score(short, instance).score
    assert wins >= 8


def test_large_divide_and_conquer_uses_every_point():
    instance = generate_instance(50_000, seed=7)
    partition = partition_solve(instance, SolveParams(), g=8)
    covered = sorted(v for polygon in partition.polygons.values() for v in polygon.vertices())
    assert covered == list(range(instance.n))
    merged = merge_all(partition, Objective.MAX)
    report = score(merged, instance)
    assert report.valid


def kruskal_weight(cells, bridges, objective):
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            c = parent[c]
        return c

    total = 0
    for bridge in sorted(bridges, key=lambda b: bridge_weight(b, objective)):
        x, y = find(bridge.cells[0]), find(bridge.cells[1])
        if x != y:
            parent[x] = y
            total += bridge_weight(bridge, objective)
    return total


@pytest.mark.parametrize("seed", range(20))
def test_merge_area_identity_and_spanning_tree(seed):
    instance = generate_instance(20_000, seed=seed)
    objective = Objective.MAX if seed % 2 == 0 else Objective.MIN
    partition = partition_solve(instance, SolveParams(objective=objective), g=8)
    order = partition.order()
    bridges = compute_bridges(partition, objective)
    tree = prim_tree(order, bridges, objective)
    assert len(tree) == len(order) - 1
    assert sum(bridge_weight(b, objective) for b in tree) == kruskal_weight(order, bridges, objective)

    merged = merge_all(partition, objective)
    cells_area = sum(partition.polygons[c].doubled_area for c in order)
    assert merged.doubled_area == cells_area + sum(b.delta for b in tree)
    report = score(merged, instance)
    assert report.valid
    assert sorted(merged.vertices()) == list(range(instance.n))


def test_forced_divide_and_conquer_pipeline():
    instance = generate_instance(5000, seed=3)
    state = create_and_run_solver(instance, SolveParams(), strategy=DIVIDE_AND_CONQUER, dnc_grid=4)
    assert state["report"].valid


def test_alpha_sweep_records():
    config = BenchConfig(experiment="alpha-sweep", instances=[InstanceSpec(n=500, seed=1)])
    frame = run_bench(config, progress=False)
    assert len(frame) == 8
    assert frame["error"].isna().all()
    assert (frame["final_score"] >= frame["greedy_score"]).all()


def test_ten_thousand_points_within_a_minute():
    instance = generate_instance(10_000, seed=11)
    state = create_and_run_solver(instance, SolveParams())
    assert state["report"].valid
    assert sum(state["timings"].values()) < 60


def test_greedy_time_is_subquadratic():
    config = BenchConfig(experiment="scaling", instances=[InstanceSpec(n=n, seed=5) for n in (2000, 4000, 8000)],
                         hops=[0], workers=1)
    frame = run_bench(config, progress=False)
    assert scaling_slope(frame) < 2.0


def test_small_instances_are_bracketed_by_the_oracle(random_instance):
    matched = total_small = 0
    for k in range(200):
        n = 4 + k % 6
        instance = random_instance(n, seed=1000 + k, extent=30)
        try:
            optimum = {objective: brute_force_optimum(instance, objective).score for objective in Objective}
        except ContractViolation:
            continue
        for objective in Objective:
            result = solve(instance, SolveParams(objective=objective), restarts=20)["report"]
            assert result.valid
            assert optimum[Objective.MIN] - 1e-12 <= result.score <= optimum[Objective.MAX] + 1e-12
            if n <= 6:
                total_small += 1
                matched += result.score == pytest.approx(optimum[objective])
    assert matched >= 0.9 * total_small
