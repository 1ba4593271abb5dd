import operator
from typing import Annotated, Any, Dict, List, Optional, TypedDict

from models.instance import Instance
from models.params import SolveParams
from models.polygon import Polygon
from models.reports import ScoreReport


class SolveState(TypedDict, total=False):
    instance: Instance
    params: SolveParams
    strategy: str
    dnc_grid: int
    dnc_threshold: Optional[int]
    polygon: Optional[Polygon]
    greedy_polygon: Optional[Polygon]
    greedy_score: float
    report: ScoreReport
    failure: Optional[Exception]
    timings: Dict[str, float]
    next_action: str
    trace: Annotated[List[Dict[str, Any]], operator.add]
