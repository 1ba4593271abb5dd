import logging
from itertools import permutations
from typing import List, Optional, Sequence, Tuple, Union

from models.errors import ContractViolation, InputError, VerificationError
from models.instance import Instance, Objective
from models.polygon import Polygon
from models.reports import ScoreReport
from utils.geometry import convex_hull_ids, ids_interact, shoelace2
from utils.helpers import BRUTE_FORCE_LIMIT, SCORE_TOLERANCE
from utils.spatial_grid import EdgeGrid

logger = logging.getLogger(__name__)

Cycle = Sequence[int]


def _as_cycle(polygon: Union[Polygon, Cycle]) -> List[int]:
    return polygon.vertices() if isinstance(polygon, Polygon) else list(polygon)


def check_ids(cycle: Cycle, instance: Instance) -> None:
    n = instance.n
    for v in cycle:
        if not isinstance(v, int) or v < 0 or v >= n:
            raise InputError(f"vertex id {v!r} is out of range for {instance.name} (n={n})")


def is_simple_naive(xs: Sequence[int], ys: Sequence[int], cycle: Cycle) -> bool:
    """
    Pairwise test of every edge pair, with edges swept by x-extent so that only
    pairs whose x-ranges overlap are compared. Shares no code with EdgeGrid.
    """
    m = len(cycle)
    if m < 3 or len(set(cycle)) != m:
        return False
    edges = []
    for i in range(m):
        u, v = cycle[i], cycle[(i + 1) % m]
        edges.append((min(xs[u], xs[v]), max(xs[u], xs[v]), min(ys[u], ys[v]), max(ys[u], ys[v]), u, v))
    edges.sort()
    for i in range(m):
        x_lo, x_hi, y_lo, y_hi, a, b = edges[i]
        for j in range(i + 1, m):
            ox_lo, _, oy_lo, oy_hi, c, d = edges[j]
            if ox_lo > x_hi:
                break
            if oy_lo > y_hi or oy_hi < y_lo:
                continue
            if ids_interact(xs, ys, a, b, c, d):
                return False
    return True


def is_simple_grid(xs: Sequence[int], ys: Sequence[int], cycle: Cycle) -> bool:
    m = len(cycle)
    if m < 3 or len(set(cycle)) != m:
        return False
    grid = EdgeGrid(xs, ys, ids=cycle)
    for i in range(m):
        u, v = cycle[i], cycle[(i + 1) % m]
        if grid.any_interaction(u, v):
            return False
        grid.add_edge(u, v)
    return True


def verify_simple(polygon: Union[Polygon, Cycle], instance: Instance, naive: bool = False) -> bool:
    cycle = _as_cycle(polygon)
    check_ids(cycle, instance)
    check = is_simple_naive if naive else is_simple_grid
    return check(instance.xs, instance.ys, cycle)


def hull_area2(instance: Instance) -> int:
    return abs(shoelace2(instance.xs, instance.ys, convex_hull_ids(instance.points)))


def score(polygon: Union[Polygon, Cycle], instance: Instance, naive: bool = False) -> ScoreReport:
    cycle = _as_cycle(polygon)
    check_ids(cycle, instance)
    area2 = abs(shoelace2(instance.xs, instance.ys, cycle))
    hull2 = hull_area2(instance)
    simple = verify_simple(cycle, instance, naive=naive)
    complete = len(cycle) == instance.n and len(set(cycle)) == instance.n
    return ScoreReport(
        score=area2 / hull2,
        polygon_area2=area2,
        hull_area2=hull2,
        simple=simple,
        uses_all_points=complete,
    )


def brute_force_polygon(instance: Instance, objective: Objective) -> Tuple[List[int], ScoreReport]:
    """Exact optimum over all vertex cycles (first id fixed, one orientation per cycle)."""
    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise ContractViolation(f"brute force is limited to {BRUTE_FORCE_LIMIT} points, got {n}")
    xs, ys = instance.xs, instance.ys
    candidates = []
    for rest in permutations(range(1, n)):
        if rest[0] > rest[-1]:
            continue
        cycle = (0,) + rest
        candidates.append((abs(shoelace2(xs, ys, cycle)), cycle))
    reverse = objective is Objective.MAX
    candidates.sort(key=lambda c: (-c[0], c[1]) if reverse else (c[0], c[1]))
    for area2, cycle in candidates:
        if area2 > 0 and is_simple_naive(xs, ys, cycle):
            return list(cycle), score(cycle, instance, naive=True)
    raise ContractViolation(f"no simple polygon exists on {instance.name}")


def brute_force_optimum(instance: Instance, objective: Objective) -> ScoreReport:
    return brute_force_polygon(instance, objective)[1]


def better(a: Optional[Polygon], b: Optional[Polygon], objective: Objective) -> bool:
    """True when ``a`` strictly beats ``b`` for the objective."""
    if a is None:
        return False
    if b is None:
        return True
    if objective is Objective.MAX:
        return abs(a.doubled_area) > abs(b.doubled_area)
    return abs(a.doubled_area) < abs(b.doubled_area)


def check_solution(instance: Instance, cycle: Cycle, stored_score: Optional[float] = None) -> ScoreReport:
    """
    Independent check of a solution: every point exactly once, simple by the
    naive test, and a stored score matching the exact recomputation.
    """
    cycle = list(cycle)
    check_ids(cycle, instance)
    if len(cycle) < 3:
        raise VerificationError(f"solution has only {len(cycle)} vertices")
    report = score(cycle, instance, naive=True)
    if not report.uses_all_points:
        missing = instance.n - len(set(cycle))
        raise VerificationError(f"solution is not a permutation of the {instance.n} points ({missing} missing)", report)
    if not report.simple:
        raise VerificationError("solution polygon is not simple", report)
    if stored_score is not None and abs(stored_score - report.score) > SCORE_TOLERANCE:
        raise VerificationError(f"stored score {stored_score!r} does not match recomputed {report.score!r}", report)
    return report
