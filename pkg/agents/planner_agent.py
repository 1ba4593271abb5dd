import logging
from typing import Any, Dict, Optional

from models.instance import Instance
from models.solve_state import SolveState
from utils.helpers import DNC_GRID, DNC_THRESHOLD

logger = logging.getLogger(__name__)

STANDARD = "STANDARD"
DIVIDE_AND_CONQUER = "DIVIDE_AND_CONQUER"


def choose_strategy(instance: Instance, strategy: Optional[str] = None, threshold: Optional[int] = None) -> str:
    """Divide and conquer above ``threshold`` points unless a strategy is forced."""
    if strategy in (STANDARD, DIVIDE_AND_CONQUER):
        return strategy
    limit = DNC_THRESHOLD if threshold is None else threshold
    return DIVIDE_AND_CONQUER if instance.n > limit else STANDARD


def planner_agent(state: SolveState) -> Dict[str, Any]:
    instance = state["instance"]
    strategy = choose_strategy(instance, state.get("strategy"), state.get("dnc_threshold"))
    grid = state.get("dnc_grid") or DNC_GRID
    if strategy == DIVIDE_AND_CONQUER:
        logger.info("[Planner] %s: %d points, divide and conquer on a %dx%d grid", instance.name, instance.n, grid, grid)
    else:
        logger.info("[Planner] %s: %d points, single greedy run", instance.name, instance.n)
    return {
        "strategy": strategy,
        "dnc_grid": grid,
        "next_action": "MERGE_AGENT" if strategy == DIVIDE_AND_CONQUER else "GREEDY_AGENT",
        "trace": [{"node": "PLANNER", "strategy": strategy, "n": instance.n}],
    }
