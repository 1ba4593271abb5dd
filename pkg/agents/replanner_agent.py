import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from models.params import SolveParams
from utils.helpers import DEFAULT_PEN, RETRY_ALPHA_FACTORS, RETRY_SIGMA, RETRY_SIGMA_ATTEMPTS

logger = logging.getLogger(__name__)

Attempt = Tuple[str, SolveParams]


def _fresh_seed(seed: int, attempt: int) -> int:
    return int(np.random.SeedSequence([seed, attempt]).generate_state(1, dtype=np.uint32)[0])


def build_retry_plan(params: SolveParams) -> List[Attempt]:
    """
    Ordered parameter sets for one greedy solve.

    The first entry is the caller's parameters. On failure the alpha value is
    rescaled by each retry factor in turn, then the weights are randomized with
    fresh seeds. With ``params.retry`` unset the plan has a single entry.
    """
    plan: List[Attempt] = [("initial", params)]
    if not params.retry:
        return plan
    base_alpha = params.alpha if params.alpha > 0 else 1.0 / DEFAULT_PEN
    for factor in RETRY_ALPHA_FACTORS:
        plan.append((f"alpha x {factor:.4g}", params.with_alpha(base_alpha * factor)))
    sigma = max(params.sigma, RETRY_SIGMA)
    for attempt in range(1, RETRY_SIGMA_ATTEMPTS + 1):
        seed = _fresh_seed(params.seed, attempt)
        plan.append((f"sigma {sigma:g} seed {seed}", params.model_copy(update={"sigma": sigma, "seed": seed})))
    return plan


def replanner_agent(failure_context: Dict[str, Any], plan: List[Attempt], attempt: int) -> Optional[Attempt]:
    """
    Next entry of the retry plan after ``attempt`` failed, or None when the plan is spent.

    ``failure_context`` carries the failed attempt's label and the number of
    points left unconnected; it is only logged.
    """
    label = failure_context.get("label", plan[attempt][0] if attempt < len(plan) else "?")
    unconnected = failure_context.get("unconnected")
    if attempt + 1 >= len(plan):
        logger.warning("[Replanner] %s failed (%s unconnected); no retries left", label, unconnected)
        return None
    following = plan[attempt + 1]
    logger.info("[Replanner] %s failed (%s unconnected); retrying with %s", label, unconnected, following[0])
    return following
