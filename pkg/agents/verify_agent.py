import logging
import time
from typing import Any, Dict

from models.errors import VerificationError
from models.solve_state import SolveState
from utils.verification import score

logger = logging.getLogger(__name__)


def verify_agent(state: SolveState) -> Dict[str, Any]:
    """Score the finished polygon; an invalid one is reported as the run's failure."""
    instance, polygon = state["instance"], state["polygon"]
    started = time.perf_counter()
    report = score(polygon, instance)
    elapsed = time.perf_counter() - started
    out: Dict[str, Any] = {
        "report": report,
        "timings": {**state.get("timings", {}), "verify": elapsed},
        "next_action": "END",
        "trace": [{"node": "VERIFY_AGENT", "score": report.score, "simple": report.simple,
                   "complete": report.uses_all_points}],
    }
    if not report.valid:
        logger.error("[Verify] %s: polygon is %s", instance.name,
                     "not simple" if not report.simple else "missing points")
        out["failure"] = VerificationError(f"solver produced an invalid polygon for {instance.name}", report)
    else:
        logger.info("[Verify] %s: score %.6f", instance.name, report.score)
    return out
