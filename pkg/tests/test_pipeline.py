import pytest

import agents.greedy_agent as greedy_module
from agents.planner_agent import DIVIDE_AND_CONQUER
from main import create_and_run_solver, solve, solve_summary
from models.errors import GreedyFailure, SolveFailure, UnsolvableInstance
from models.instance import Instance, Objective
from models.params import SolveParams
from models.polygon import Polygon
from utils.verification import verify_simple


def nodes(state):
    return [entry["node"] for entry in state["trace"]]


@pytest.mark.parametrize("objective", list(Objective))
def test_standard_pipeline(random_instance, objective):
    instance = random_instance(50, seed=21, extent=800)
    state = create_and_run_solver(instance, SolveParams(objective=objective))
    assert nodes(state) == ["PLANNER", "GREEDY_AGENT", "LOCAL_SEARCH_AGENT", "VERIFY_AGENT"]
    assert state["failure"] is None
    report = state["report"]
    assert report.valid
    if objective is Objective.MAX:
        assert state["greedy_score"] <= report.score
    else:
        assert state["greedy_score"] >= report.score
    assert verify_simple(state["polygon"], instance, naive=True)
    assert set(state["timings"]) == {"greedy", "local_search", "verify"}


def test_divide_and_conquer_pipeline(random_instance):
    instance = random_instance(300, seed=4, extent=5000)
    state = create_and_run_solver(instance, SolveParams(), strategy=DIVIDE_AND_CONQUER, dnc_grid=2)
    assert nodes(state) == ["PLANNER", "MERGE_AGENT", "VERIFY_AGENT"]
    assert state["report"].valid
    assert sorted(state["polygon"].vertices()) == list(range(300))
    assert solve_summary(state)["strategy"] == DIVIDE_AND_CONQUER


def test_restarts_keep_the_best(random_instance):
    instance = random_instance(70, seed=13, extent=900)
    single = solve(instance, SolveParams(hops=2))
    best = solve(instance, SolveParams(hops=2), restarts=4, workers=2)
    assert best["report"].score >= single["report"].score
    again = solve(instance, SolveParams(hops=2), restarts=4, workers=1)
    assert again["polygon"].vertices() == best["polygon"].vertices()


def test_min_restarts_keep_the_smallest(random_instance):
    instance = random_instance(40, seed=2, extent=500)
    params = SolveParams(objective=Objective.MIN)
    single = solve(instance, params)
    best = solve(instance, params, restarts=3)
    assert best["report"].score <= single["report"].score


def test_unsolvable_instance_raises():
    line = Instance.from_coordinates("line", [(0, 0), (2, 1), (4, 2), (6, 3)])
    with pytest.raises(UnsolvableInstance):
        solve(line, SolveParams())


def test_exhausted_greedy_surfaces_as_solve_failure(monkeypatch, square_center):
    def always_fail(instance, params):
        raise GreedyFailure(Polygon(instance.xs, instance.ys, [0, 1, 2]), {3, 4})

    monkeypatch.setattr(greedy_module, "greedy_attempt", always_fail)
    state = create_and_run_solver(square_center, SolveParams())
    assert isinstance(state["failure"], SolveFailure)
    assert nodes(state) == ["PLANNER", "GREEDY_AGENT"]
    with pytest.raises(SolveFailure):
        solve(square_center, SolveParams(), restarts=2)


def test_summary_fields(square_center):
    summary = solve_summary(solve(square_center, SolveParams(objective=Objective.MIN)))
    assert summary["instance"] == "square-center"
    assert summary["score"] == pytest.approx(0.75)
    assert set(summary["timings"]) == {"greedy", "local_search", "verify"}
