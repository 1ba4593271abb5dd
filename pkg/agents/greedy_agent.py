"""
Greedy insertion phase.

Every live polygon edge owns a queue of candidate points ordered by insertion
weight; a top-level heap holds the head of each edge queue. A step pops the
globally cheapest triple and inserts its point unless one of the two new edges
would touch the polygon, in which case the triple is parked on the blocking
edge and comes back once that edge is replaced.

Each unused point also carries its side of the polygon (inside, outside or on
the boundary). A point strictly inside can only enter through an edge that
faces it from the inside, and a point strictly outside only through an edge
that faces it from the outside; triples on the wrong side are never queued.
The side of a point changes only when an insertion triangle covers it, and
at that moment its triples on the now-reachable edges are created.
"""
import logging
import time
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from agents.replanner_agent import build_retry_plan, replanner_agent
from models.errors import ContractViolation, GreedyFailure, SolveFailure
from models.instance import Instance, Objective, Point
from models.params import SolveParams, WeightVariant
from models.polygon import Polygon
from models.solve_state import SolveState
from utils.geometry import convex_hull, convex_hull_ids, dist, ids_interact, signed_area2
from utils.helpers import POLYG_DEBUG
from utils.spatial_grid import EdgeGrid, EdgeKey, build_grid, edge_key
from utils.verification import better, hull_area2, is_simple_naive

logger = logging.getLogger(__name__)

Triangle = Tuple[int, int, int]


class CandidateTriple(NamedTuple):
    """Heap entry; tuple order is the tie rule (weight, point id, edge origin)."""

    weight: float
    q: int
    origin: int
    target: int
    noise_factor: float = 1.0

    @property
    def edge(self) -> Tuple[int, int]:
        return self.origin, self.target


@dataclass(frozen=True)
class InsertionResult:
    q: int
    edge: Tuple[int, int]
    weight: float
    delta: int


def penalty(d1: float, d2: float, d12: float, variant: WeightVariant) -> float:
    if variant is WeightVariant.MINUS:
        return d1 + d2 - d12
    return d1 + d2 + d12


def weight(p1: Point, p2: Point, q: Point, params: SolveParams, noise_factor: float = 1.0,
           unit: float = 1.0) -> float:
    """
    Insertion weight of q into edge p1 -> p2; smaller is better.

    The area term is the oriented area the polygon loses. Polygons are CCW when
    maximizing and CW when minimizing, so the same formula serves both
    objectives. Areas and lengths are expressed in ``unit`` (the greedy phase
    passes the instance span, so alpha means the same at every coordinate
    scale); the default keeps raw coordinates.
    """
    base = 0.5 * float(signed_area2(p1, p2, q)) / (unit * unit) + params.alpha * penalty(
        dist(q, p1), dist(q, p2), dist(p1, p2), params.weight_variant
    ) / unit
    return noise_factor * base


def edge_weights(instance: Instance, u: int, v: int, cand: np.ndarray, params: SolveParams,
                 unit: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Unnoised weights of every candidate on edge u -> v plus their exact doubled areas."""
    xs, ys = instance.xs, instance.ys
    x1, y1, x2, y2 = xs[u], ys[u], xs[v], ys[v]
    sa2 = (x2 - x1) * (instance.yi[cand] - y1) - (y2 - y1) * (instance.xi[cand] - x1)
    dx1 = instance.xf[cand] - float(x1)
    dy1 = instance.yf[cand] - float(y1)
    dx2 = instance.xf[cand] - float(x2)
    dy2 = instance.yf[cand] - float(y2)
    d1 = np.sqrt(dx1 * dx1 + dy1 * dy1)
    d2 = np.sqrt(dx2 * dx2 + dy2 * dy2)
    d12 = dist(instance.points[u], instance.points[v])
    area = 0.5 * sa2.astype(np.float64) / (unit * unit)
    base = area + params.alpha * penalty(d1, d2, d12, params.weight_variant) / unit
    return base, sa2


def point_sides(instance: Instance, polygon: Polygon) -> np.ndarray:
    """+1 strictly inside ``polygon``, -1 strictly outside, 0 on its boundary; exact crossing number."""
    px, py = instance.xi, instance.yi
    inside = np.zeros(instance.n, dtype=bool)
    boundary = np.zeros(instance.n, dtype=bool)
    xs, ys = instance.xs, instance.ys
    for u, v in polygon.edges():
        x1, y1, x2, y2 = xs[u], ys[u], xs[v], ys[v]
        cross = np.asarray((x2 - x1) * (py - y1) - (y2 - y1) * (px - x1))
        boundary |= ((cross == 0) & (px >= min(x1, x2)) & (px <= max(x1, x2))
                     & (py >= min(y1, y2)) & (py <= max(y1, y2)))
        straddle = (py < y1) != (py < y2)
        inside ^= straddle & ((cross > 0) == (y2 > y1))
    side = np.where(inside, 1, -1).astype(np.int8)
    side[boundary] = 0
    return side


class EdgeQueue:
    """Candidates of one edge: a presorted array walked by a cursor, plus a heap of re-queued triples."""

    __slots__ = ("weights", "ids", "noise", "pos", "extra", "listed")

    def __init__(self, weights: np.ndarray, ids: np.ndarray, noise: Optional[np.ndarray] = None):
        order = np.lexsort((ids, weights))
        self.weights = weights[order]
        self.ids = ids[order]
        self.noise = None if noise is None else noise[order]
        self.pos = 0
        self.extra: List[Tuple[float, int, float]] = []
        self.listed: Optional[Tuple[float, int]] = None

    def _sorted_head(self, used: np.ndarray) -> Optional[Tuple[float, int, float]]:
        ids, size = self.ids, len(self.ids)
        while self.pos < size and used[ids[self.pos]]:
            self.pos += 1
        if self.pos == size:
            return None
        p = self.pos
        return float(self.weights[p]), int(ids[p]), 1.0 if self.noise is None else float(self.noise[p])

    def peek(self, used: np.ndarray) -> Optional[Tuple[float, int, float]]:
        while self.extra and used[self.extra[0][1]]:
            heappop(self.extra)
        head = self._sorted_head(used)
        if self.extra and (head is None or self.extra[0][:2] < head[:2]):
            return self.extra[0]
        return head

    def pop(self, used: np.ndarray) -> Optional[Tuple[float, int, float]]:
        head = self.peek(used)
        if head is None:
            return None
        if self.extra and self.extra[0] is head:
            heappop(self.extra)
        else:
            self.pos += 1
        return head

    def push(self, w: float, q: int, noise_factor: float) -> None:
        heappush(self.extra, (w, q, noise_factor))

    def __len__(self) -> int:
        return len(self.ids) - self.pos + len(self.extra)


class GreedyRun:
    """State of one greedy completion: polygon, edge grid, point sides and the heap system."""

    def __init__(self, instance: Instance, params: SolveParams, polygon: Polygon,
                 rng: Optional[np.random.Generator] = None, grid: Optional[EdgeGrid] = None):
        self.instance = instance
        self.params = params
        self.sign = params.objective.sign
        self.kappa = params.kappa_for(instance.n)
        self.unit = float(instance.span)
        self.polygon = polygon
        self.grid = grid if grid is not None else build_grid(instance)
        self.rng = rng if params.sigma > 0 else None
        if self.rng is None and params.sigma > 0:
            self.rng = np.random.default_rng(params.seed)

        self.used = np.zeros(instance.n, dtype=bool)
        for u in polygon.nxt:
            self.used[u] = True
        self.side = point_sides(instance, polygon)
        self.remaining = instance.n - len(polygon)
        self.queues: Dict[Tuple[int, int], EdgeQueue] = {}
        self.top: List[CandidateTriple] = []
        self.blocked: Dict[EdgeKey, List[CandidateTriple]] = {}
        self.history: List[InsertionResult] = []
        self.attempts = 0

        edges = list(polygon.edges())
        if grid is None:
            self.grid.add_polygon(edges)
        for u, v in edges:
            self._build_queue(u, v)

    def reachable(self, q: int, sa2: int) -> bool:
        """Whether q's side of the polygon agrees with the side of the edge it would enter through."""
        side = self.side[q]
        if side == 0 or sa2 == 0:
            return True
        return (side > 0) == (self.sign * sa2 > 0)

    def _noise(self, size: int) -> Optional[np.ndarray]:
        if self.rng is None:
            return None
        return 1.0 + np.abs(self.rng.normal(0.0, self.params.sigma, size))

    def _build_queue(self, u: int, v: int) -> None:
        cand = self.grid.candidate_points(u, v, self.kappa)
        cand = cand[~self.used[cand]]
        if cand.size == 0:
            return
        base, sa2 = edge_weights(self.instance, u, v, cand, self.params, self.unit)
        side = self.side[cand]
        keep = (side == 0) | (sa2 == 0) | ((side > 0) == (self.sign * sa2 > 0))
        if self.params.objective is Objective.MIN:
            keep &= sa2 > 0
        if not keep.any():
            return
        cand, base = cand[keep], base[keep]
        noise = self._noise(cand.size)
        if noise is not None:
            base = noise * base
        self.queues[(u, v)] = EdgeQueue(base, cand, noise)
        self._refresh(u, v)

    def _refresh(self, u: int, v: int) -> None:
        queue = self.queues.get((u, v))
        if queue is None:
            return
        head = queue.peek(self.used)
        if head is None:
            queue.listed = None
            return
        if queue.listed != head[:2]:
            queue.listed = head[:2]
            heappush(self.top, CandidateTriple(head[0], head[1], u, v, head[2]))

    def _push(self, u: int, v: int, w: float, q: int, noise_factor: float) -> None:
        queue = self.queues.get((u, v))
        if queue is None:
            queue = self.queues[(u, v)] = EdgeQueue(np.empty(0), np.empty(0, dtype=np.int64))
        queue.push(w, q, noise_factor)
        self._refresh(u, v)

    def _requeue_blocked(self, key: EdgeKey) -> None:
        points = self.instance.points
        for triple in self.blocked.pop(key, ()):
            u, v = triple.edge
            if self.polygon.nxt.get(u) != v or self.used[triple.q]:
                continue
            if not self.reachable(triple.q, signed_area2(points[u], points[v], points[triple.q])):
                continue
            self._push(u, v, triple.weight, triple.q, triple.noise_factor)

    def _blocker(self, u: int, v: int, q: int) -> Optional[EdgeKey]:
        skip = (edge_key(u, v),)
        return self.grid.find_interaction(u, q, skip) or self.grid.find_interaction(q, v, skip)

    def _cover(self, u: int, v: int, q: int, sa2: int) -> None:
        """Update point sides after q was inserted into u -> v, reopening points that changed side."""
        if sa2 == 0:
            return
        instance = self.instance
        cand = self.grid.points_in_box((u, v, q))
        cand = cand[~self.used[cand]]
        if cand.size == 0:
            return
        xs, ys = instance.xs, instance.ys
        px, py = instance.xi[cand], instance.yi[cand]
        s = 1 if sa2 > 0 else -1

        def orient(a: int, b: int) -> np.ndarray:
            return np.asarray(s * ((xs[b] - xs[a]) * (py - ys[a]) - (ys[b] - ys[a]) * (px - xs[a])))

        o1, o2, o3 = orient(u, v), orient(v, q), orient(q, u)
        closed = (o1 >= 0) & (o2 >= 0) & (o3 >= 0)
        if not closed.any():
            return
        strict = closed & (o1 > 0) & (o2 > 0) & (o3 > 0)
        on_base = closed & (o1 == 0)
        on_new = closed & ~strict & ~on_base
        old = self.side[cand]
        new = old.copy()
        new[strict] = -old[strict]
        # the old edge is interior once the triangle is cut away, exterior once it is added
        new[on_base] = -1 if self.sign * sa2 > 0 else 1
        new[on_new] = 0
        changed = np.nonzero(new != old)[0]
        self.side[cand] = new
        for i in changed.tolist():
            if old[i] != 0:
                self._reopen(int(cand[i]), int(old[i]), skip={(u, q), (q, v)})

    def _reopen(self, p: int, was: int, skip: Set[Tuple[int, int]]) -> None:
        """Queue p on every live edge that reaches it now but did not under its previous side."""
        points, nxt = self.instance.points, self.polygon.nxt
        for a, b in self.grid.edges_near(self.grid.cell_of(p), self.kappa):
            u, v = (a, b) if nxt[a] == b else (b, a)
            if (u, v) in skip:
                continue
            sa2 = signed_area2(points[u], points[v], points[p])
            if sa2 == 0 or (self.params.objective is Objective.MIN and sa2 < 0):
                continue
            facing_inside = self.sign * sa2 > 0
            if not self.reachable(p, sa2) or (was > 0) == facing_inside:
                continue
            base, _ = edge_weights(self.instance, u, v, np.asarray([p], dtype=np.int64), self.params, self.unit)
            noise = self._noise(1)
            factor = 1.0 if noise is None else float(noise[0])
            self._push(u, v, factor * float(base[0]), p, factor)

    def _attempt(self, triple: CandidateTriple) -> Optional[InsertionResult]:
        self.attempts += 1
        u, v, q = triple.origin, triple.target, triple.q
        xs, ys = self.instance.xs, self.instance.ys
        points = self.instance.points
        sa2 = signed_area2(points[u], points[v], points[q])
        if not self.reachable(q, sa2):
            return None
        if self.sign * (self.polygon.doubled_area - sa2) <= 0:
            return None
        if ids_interact(xs, ys, u, q, q, v):
            return None
        blocker = self._blocker(u, v, q)
        if blocker is not None:
            self.blocked.setdefault(blocker, []).append(triple)
            return None

        delta = self.polygon.insert_vertex(u, q)
        self.used[q] = True
        self.remaining -= 1
        self.grid.remove_edge(u, v)
        self.grid.add_edge(u, q)
        self.grid.add_edge(q, v)
        self.queues.pop((u, v), None)
        self._cover(u, v, q, sa2)
        self._requeue_blocked(edge_key(u, v))
        self._build_queue(u, q)
        self._build_queue(q, v)

        result = InsertionResult(q=q, edge=(u, v), weight=triple.weight, delta=delta)
        self.history.append(result)
        if POLYG_DEBUG and not is_simple_naive(xs, ys, self.polygon.vertices()):
            raise ContractViolation(f"greedy step inserting {q} into ({u}, {v}) broke simplicity")
        return result

    def step(self) -> InsertionResult:
        """Insert the cheapest valid triple; GreedyFailure when no heap holds one."""
        while self.top:
            triple = heappop(self.top)
            u, v = triple.edge
            queue = self.queues.get((u, v))
            if queue is None or queue.listed != (triple.weight, triple.q):
                continue
            queue.listed = None
            head = queue.peek(self.used)
            if head is None or head[:2] != (triple.weight, triple.q):
                self._refresh(u, v)
                continue
            queue.pop(self.used)
            result = self._attempt(triple)
            if result is not None:
                return result
            self._refresh(u, v)
        unconnected = {i for i in range(self.instance.n) if not self.used[i]}
        raise GreedyFailure(self.polygon.copy(), unconnected)

    def run(self) -> Polygon:
        while self.remaining:
            self.step()
            if len(self.history) % 10_000 == 0:
                logger.debug("[Greedy] %s: %d points left", self.instance.name, self.remaining)
        return self.polygon


def greedy_step(run: GreedyRun) -> InsertionResult:
    return run.step()


def init_max(instance: Instance) -> Polygon:
    return convex_hull(instance.points, instance.xs, instance.ys)


def _block_candidates(grid: EdgeGrid, cell: Tuple[int, int], k: int) -> Tuple[np.ndarray, bool]:
    ci, cj = cell
    last = grid.columns - 1
    whole = ci - k <= 0 and cj - k <= 0 and ci + k >= last and cj + k >= last
    cells = [(i, j) for i in range(max(0, ci - k), min(last, ci + k) + 1)
             for j in range(max(0, cj - k), min(last, cj + k) + 1)]
    return grid.points_in_cells(cells), whole


def _smallest_triangle_from(instance: Instance, grid: EdgeGrid, p1: int) -> Optional[Triangle]:
    """p2 = nearest neighbour of p1, p3 = cheapest non-collinear completion; None if all collinear."""
    xi, yi, xf, yf = instance.xi, instance.yi, instance.xf, instance.yf
    x1, y1 = instance.xs[p1], instance.ys[p1]
    k = 1
    while True:
        cand, whole = _block_candidates(grid, grid.cell_of(p1), k)
        cand = cand[cand != p1]
        reach = k * grid.cell_size
        if cand.size >= 2:
            sq = (xi[cand] - x1) ** 2 + (yi[cand] - y1) ** 2
            j = int(np.argmin(sq))
            p2 = int(cand[j])
            x2, y2 = instance.xs[p2], instance.ys[p2]
            d12 = dist(instance.points[p1], instance.points[p2])
            sa2 = (x2 - x1) * (yi[cand] - y1) - (y2 - y1) * (xi[cand] - x1)
            d13 = np.sqrt((xf[cand] - float(x1)) ** 2 + (yf[cand] - float(y1)) ** 2)
            d23 = np.sqrt((xf[cand] - float(x2)) ** 2 + (yf[cand] - float(y2)) ** 2)
            cost = np.where(sa2 != 0, d13 + d23, np.inf)
            best = int(np.argmin(cost))
            if np.isfinite(cost[best]) and (whole or (d12 < reach and cost[best] < reach)):
                return p1, p2, int(cand[best])
        if whole:
            return None
        k += 1


def _perimeter(instance: Instance, tri: Sequence[int]) -> float:
    a, b, c = (instance.points[i] for i in tri)
    return dist(a, b) + dist(b, c) + dist(a, c)


def init_min_triangles(instance: Instance) -> List[Triangle]:
    """
    One start triangle per point, deduplicated and ordered by perimeter.

    Triangles are returned clockwise, the orientation minimization runs on.
    """
    grid = build_grid(instance)
    found: Dict[Triangle, float] = {}
    for p1 in range(instance.n):
        tri = _smallest_triangle_from(instance, grid, p1)
        if tri is None:
            continue
        key = tuple(sorted(tri))
        if key not in found:
            found[key] = _perimeter(instance, key)
    ordered = sorted(found, key=lambda t: (found[t], t))
    points = instance.points
    out = []
    for a, b, c in ordered:
        out.append((a, b, c) if signed_area2(points[a], points[b], points[c]) < 0 else (a, c, b))
    return out


def greedy_attempt(instance: Instance, params: SolveParams) -> Polygon:
    """One completion with fixed parameters; raises GreedyFailure."""
    if params.objective is Objective.MAX:
        rng = np.random.default_rng(params.seed) if params.sigma > 0 else None
        return GreedyRun(instance, params, init_max(instance), rng=rng).run()

    convex_hull_ids(instance.points)
    starts = init_min_triangles(instance)[: params.start_triangle_count]
    best: Optional[Polygon] = None
    failure: Optional[GreedyFailure] = None
    for index, tri in enumerate(starts):
        rng = np.random.default_rng([params.seed, index]) if params.sigma > 0 else None
        start = Polygon(instance.xs, instance.ys, tri)
        try:
            polygon = GreedyRun(instance, params, start, rng=rng).run()
        except GreedyFailure as exc:
            logger.debug("[Greedy] start %s left %d point(s) unconnected", tri, len(exc.unconnected))
            if failure is None or len(exc.unconnected) < len(failure.unconnected):
                failure = exc
            continue
        if better(polygon, best, Objective.MIN):
            best = polygon
    if best is None:
        raise failure
    return best


def run_greedy(instance: Instance, params: SolveParams, attempts: Optional[List[Dict[str, Any]]] = None) -> Polygon:
    """
    Greedy completion under the retry plan.

    Each failed attempt is recorded in ``attempts`` (when given). Raises
    SolveFailure once every planned attempt has failed.
    """
    records = attempts if attempts is not None else []
    plan = build_retry_plan(params)
    index, current = 0, plan[0]
    while current is not None:
        label, attempt_params = current
        try:
            polygon = greedy_attempt(instance, attempt_params)
        except GreedyFailure as exc:
            record = {"label": label, "unconnected": len(exc.unconnected), "params": attempt_params.describe()}
            records.append(record)
            current = replanner_agent(record, plan, index)
            index += 1
            continue
        if index:
            logger.info("[Greedy] %s completed on retry '%s'", instance.name, label)
        return polygon
    raise SolveFailure(f"greedy failed on {instance.name} after {len(records)} attempt(s)", records)


def greedy_agent(state: SolveState) -> Dict[str, Any]:
    instance, params = state["instance"], state["params"]
    started = time.perf_counter()
    attempts: List[Dict[str, Any]] = []
    try:
        polygon = run_greedy(instance, params, attempts)
    except SolveFailure as exc:
        logger.error("[Greedy] %s", exc)
        return {
            "failure": exc,
            "next_action": "END",
            "trace": [{"node": "GREEDY_AGENT", "status": "failed", "attempts": attempts}],
        }
    elapsed = time.perf_counter() - started
    greedy_score = abs(polygon.doubled_area) / hull_area2(instance)
    logger.info("[Greedy] %s: score %.6f in %.2fs", instance.name, greedy_score, elapsed)
    return {
        "polygon": polygon,
        "greedy_polygon": polygon.copy(),
        "greedy_score": greedy_score,
        "timings": {**state.get("timings", {}), "greedy": elapsed},
        "next_action": "LOCAL_SEARCH_AGENT",
        "trace": [{"node": "GREEDY_AGENT", "status": "ok", "retries": len(attempts), "score": greedy_score}],
    }
