import logging
import traceback
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from langgraph.graph import END, StateGraph

from agents.greedy_agent import greedy_agent
from agents.local_search_agent import local_search_agent
from agents.merge_agent import merge_agent
from agents.planner_agent import planner_agent
from agents.verify_agent import verify_agent
from models.instance import Instance
from models.params import SolveParams
from models.solve_state import SolveState
from utils.helpers import RESTART_SIGMA, worker_count
from utils.verification import better

logger = logging.getLogger(__name__)


def route_after_planning(state: SolveState) -> str:
    return "MERGE_AGENT" if state.get("next_action") == "MERGE_AGENT" else "GREEDY_AGENT"


def route_after_greedy(state: SolveState) -> str:
    return "END" if state.get("failure") is not None else "LOCAL_SEARCH_AGENT"


def route_after_merge(state: SolveState) -> str:
    return "END" if state.get("failure") is not None else "VERIFY_AGENT"


@lru_cache(maxsize=1)
def build_solver_graph():
    workflow = StateGraph(SolveState)
    workflow.add_node("PLANNER", planner_agent)
    workflow.add_node("GREEDY_AGENT", greedy_agent)
    workflow.add_node("LOCAL_SEARCH_AGENT", local_search_agent)
    workflow.add_node("MERGE_AGENT", merge_agent)
    workflow.add_node("VERIFY_AGENT", verify_agent)
    workflow.set_entry_point("PLANNER")
    workflow.add_conditional_edges("PLANNER", route_after_planning,
                                   {"GREEDY_AGENT": "GREEDY_AGENT", "MERGE_AGENT": "MERGE_AGENT"})
    workflow.add_conditional_edges("GREEDY_AGENT", route_after_greedy,
                                   {"LOCAL_SEARCH_AGENT": "LOCAL_SEARCH_AGENT", "END": END})
    workflow.add_conditional_edges("MERGE_AGENT", route_after_merge, {"VERIFY_AGENT": "VERIFY_AGENT", "END": END})
    workflow.add_edge("LOCAL_SEARCH_AGENT", "VERIFY_AGENT")
    workflow.add_edge("VERIFY_AGENT", END)
    return workflow.compile()


def create_and_run_solver(instance: Instance, params: SolveParams, strategy: Optional[str] = None,
                          dnc_grid: Optional[int] = None, dnc_threshold: Optional[int] = None) -> SolveState:
    """
    One pass through the pipeline.

    Failures of the solver stages are returned in ``state["failure"]``;
    invalid input (unsolvable instances) raises.
    """
    initial: SolveState = {
        "instance": instance,
        "params": params,
        "strategy": strategy,
        "dnc_grid": dnc_grid,
        "dnc_threshold": dnc_threshold,
        "failure": None,
        "timings": {},
        "trace": [],
    }
    return build_solver_graph().invoke(initial)


def restart_params(params: SolveParams, restarts: int) -> List[SolveParams]:
    """Attempt 0 keeps ``params``; later attempts are randomized with spawned seeds."""
    if restarts <= 1:
        return [params]
    children = np.random.SeedSequence(params.seed).spawn(restarts)
    sigma = params.sigma if params.sigma > 0 else RESTART_SIGMA
    out = [params]
    for child in children[1:]:
        seed = int(child.generate_state(1, dtype=np.uint32)[0])
        out.append(params.model_copy(update={"sigma": sigma, "seed": seed}))
    return out


def solve(instance: Instance, params: SolveParams, restarts: int = 1, strategy: Optional[str] = None,
          dnc_grid: Optional[int] = None, dnc_threshold: Optional[int] = None,
          workers: Optional[int] = None) -> SolveState:
    """
    Best final state over ``restarts`` independent pipeline runs.

    Runs execute on a thread pool; the winner is the best valid polygon, the
    lowest attempt index on ties. When every run fails, the first run's
    failure is raised.
    """
    attempts = restart_params(params, restarts)

    def run_attempt(index: int, attempt: SolveParams) -> Tuple[int, Optional[SolveState], Optional[BaseException]]:
        try:
            return index, create_and_run_solver(instance, attempt, strategy, dnc_grid, dnc_threshold), None
        except Exception as exc:
            logger.debug("Attempt %d raised:\n%s", index, traceback.format_exc())
            return index, None, exc

    if len(attempts) == 1:
        results = [run_attempt(0, attempts[0])]
    else:
        with ThreadPoolExecutor(max_workers=worker_count(workers, len(attempts))) as pool:
            results = list(pool.map(lambda item: run_attempt(*item), enumerate(attempts)))

    best: Optional[SolveState] = None
    first_error: Optional[BaseException] = None
    for index, state, error in results:
        error = error or (state or {}).get("failure")
        if error is not None:
            logger.info("Attempt %d failed: %s", index, error)
            first_error = first_error or error
            continue
        if best is None or better(state["polygon"], best["polygon"], params.objective):
            best = state
    if best is None:
        raise first_error
    if len(attempts) > 1:
        logger.info("Best of %d attempts: score %.6f", len(attempts), best["report"].score)
    return best


def solve_summary(state: SolveState) -> Dict[str, Any]:
    report = state["report"]
    return {
        "instance": state["instance"].name,
        "strategy": state.get("strategy"),
        "score": report.score,
        "greedy_score": state.get("greedy_score"),
        "timings": dict(state.get("timings", {})),
    }
