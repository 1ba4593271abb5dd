import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.errors import ContractViolation
from models.instance import Point
from models.params import SolveParams
from models.polygon import Polygon
from models.solve_state import SolveState
from utils.geometry import convex_hull_ids, ids_interact, shoelace2
from utils.helpers import POLYG_DEBUG
from utils.spatial_grid import Cell, EdgeGrid, edge_key, polygon_grid
from utils.verification import is_simple_naive

logger = logging.getLogger(__name__)

# Shifted coordinates up to this span keep every vectorized gain inside int64.
INT64_GAIN_SPAN = 2 ** 26


@dataclass(frozen=True)
class Move:
    """Reversed relocation of ``path`` onto the edge ``u1 -> u2``."""

    path: Tuple[int, ...]
    u1: int
    u2: int
    gain: int

    @property
    def v1(self) -> int:
        return self.path[0]

    @property
    def vk(self) -> int:
        return self.path[-1]


def move_gain(polygon: Polygon, path: Sequence[int], u1: int) -> int:
    """
    Exact doubled-area improvement of moving ``path`` onto edge u1 -> next(u1).

    Polygons are counterclockwise when maximizing and clockwise when
    minimizing, so a positive value is an improvement for either objective.
    """
    polygon.check_move(path, u1)
    return polygon.move_delta(path, u1)


def _move_is_simple(polygon: Polygon, grid: EdgeGrid, path: Sequence[int], u1: int, u2: int) -> bool:
    v1, vk = path[0], path[-1]
    a, b = polygon.prv[v1], polygon.nxt[vk]
    xs, ys = polygon.xs, polygon.ys
    added = ((a, b), (u1, vk), (v1, u2))
    for i in range(3):
        for j in range(i + 1, 3):
            if ids_interact(xs, ys, *added[i], *added[j]):
                return False
    skip = {edge_key(a, v1), edge_key(vk, b), edge_key(u1, u2)}
    return not any(grid.any_interaction(p, q, skip) for p, q in added)


class _EdgeTable:
    """Directed polygon edges as arrays, with cached per-cell neighborhoods."""

    def __init__(self, polygon: Polygon, grid: EdgeGrid, kappa: Optional[int]):
        self.grid = grid
        self.kappa = kappa
        edges = list(polygon.edges())
        ids = list(polygon.nxt)
        xs, ys = polygon.xs, polygon.ys
        self.min_x = min(xs[i] for i in ids)
        self.min_y = min(ys[i] for i in ids)
        span = max(max(xs[i] for i in ids) - self.min_x, max(ys[i] for i in ids) - self.min_y)
        dtype = np.int64 if span <= INT64_GAIN_SPAN else object
        self.sx = {i: xs[i] - self.min_x for i in ids}
        self.sy = {i: ys[i] - self.min_y for i in ids}
        self.eu = np.asarray([u for u, _ in edges], dtype=np.int64)
        self.ev = np.asarray([v for _, v in edges], dtype=np.int64)
        self.ux = np.asarray([self.sx[u] for u, _ in edges], dtype=dtype)
        self.uy = np.asarray([self.sy[u] for u, _ in edges], dtype=dtype)
        self.vx = np.asarray([self.sx[v] for _, v in edges], dtype=dtype)
        self.vy = np.asarray([self.sy[v] for _, v in edges], dtype=dtype)
        self.cross = self.ux * self.vy - self.vx * self.uy
        self.index = {edge_key(u, v): i for i, (u, v) in enumerate(edges)}
        self.all = np.arange(len(edges), dtype=np.int64)
        self.long = np.asarray(sorted(self.index[k] for k in grid.long_edges), dtype=np.int64)
        self._near: Dict[Cell, np.ndarray] = {}

    def _cell_block(self, cell: Cell) -> np.ndarray:
        found = self._near.get(cell)
        if found is None:
            keys = set()
            for near in self.grid.block_cells(cell, self.kappa):
                keys |= self.grid.cells.get(near, set())
            found = np.union1d(np.asarray([self.index[k] for k in keys], dtype=np.int64), self.long)
            self._near[cell] = found
        return found

    def targets(self, vertices: Sequence[int]) -> np.ndarray:
        if self.kappa is None:
            return self.all
        cells = {self.grid.cell_of(v) for v in vertices}
        blocks = [self._cell_block(c) for c in sorted(cells)]
        return blocks[0] if len(blocks) == 1 else np.unique(np.concatenate(blocks))

    def cross_of(self, u: int, v: int) -> int:
        return self.sx[u] * self.sy[v] - self.sx[v] * self.sy[u]


def collect_moves(polygon: Polygon, params: SolveParams, grid: Optional[EdgeGrid] = None) -> List[Move]:
    """
    Improving path relocations of the current polygon, best first.

    Every path of up to ``params.hops`` vertices is paired with every edge in
    the hood of the cells holding the path's endpoints and outer neighbours
    (every edge when the hood is unrestricted); each pair that gains area and
    keeps the polygon simple is returned.
    """
    n = len(polygon)
    longest = min(params.hops, n - 3)
    if longest < 1:
        return []
    grid = grid if grid is not None else polygon_grid(polygon)
    table = _EdgeTable(polygon, grid, params.kappa_for(n))
    sign = polygon.orientation
    doubled = polygon.doubled_area
    cycle = polygon.vertices()
    moves: List[Move] = []

    for start in range(n):
        v1 = cycle[start]
        a = polygon.prv[v1]
        v1x, v1y = table.sx[v1], table.sy[v1]
        inner = 0
        path: List[int] = []
        for k in range(1, longest + 1):
            vk = cycle[(start + k - 1) % n]
            if path:
                inner += table.cross_of(path[-1], vk)
            path.append(vk)
            b = polygon.nxt[vk]
            base = table.cross_of(a, b) - table.cross_of(a, v1) - table.cross_of(vk, b) - 2 * inner

            idx = table.targets((a, v1, vk, b))
            members = np.asarray(path, dtype=np.int64)
            idx = idx[~(np.isin(table.eu[idx], members) | np.isin(table.ev[idx], members))]
            if idx.size == 0:
                continue
            vkx, vky = table.sx[vk], table.sy[vk]
            gains = base + (table.ux[idx] * vky - vkx * table.uy[idx]
                            + v1x * table.vy[idx] - table.vx[idx] * v1y - table.cross[idx])
            hits = np.nonzero(gains > 0)[0]
            if hits.size == 0:
                continue
            for gain, u1, u2 in zip(gains[hits].tolist(), table.eu[idx[hits]].tolist(), table.ev[idx[hits]].tolist()):
                if sign * (doubled + gain) <= 0:
                    continue
                if not _move_is_simple(polygon, grid, path, u1, u2):
                    continue
                moves.append(Move(tuple(path), u1, u2, int(gain)))

    moves.sort(key=lambda m: (-m.gain, m.v1, m.u1, len(m.path)))
    return moves


def apply_move(polygon: Polygon, grid: EdgeGrid, move: Move) -> int:
    """Re-test ``move`` against the current polygon and apply it; returns the gain, 0 if skipped."""
    path = move.path
    nxt = polygon.nxt
    for i in range(len(path) - 1):
        if nxt.get(path[i]) != path[i + 1]:
            return 0
    if nxt.get(move.u1) != move.u2 or move.u1 in path or move.u2 in path:
        return 0
    if len(polygon) - len(path) < 3:
        return 0
    gain = move_gain(polygon, path, move.u1)
    if gain <= 0 or polygon.orientation * (polygon.doubled_area + gain) <= 0:
        return 0
    if not _move_is_simple(polygon, grid, path, move.u1, move.u2):
        return 0

    v1, vk = path[0], path[-1]
    a, b = polygon.prv[v1], polygon.nxt[vk]
    grid.remove_edge(a, v1)
    grid.remove_edge(vk, b)
    grid.remove_edge(move.u1, move.u2)
    polygon.move_path(path, move.u1)
    grid.add_edge(a, b)
    grid.add_edge(move.u1, vk)
    grid.add_edge(v1, move.u2)
    if POLYG_DEBUG and not is_simple_naive(polygon.xs, polygon.ys, polygon.vertices()):
        raise ContractViolation(f"moving {list(path)} onto ({move.u1}, {move.u2}) broke simplicity")
    return gain


def _hull_area2(polygon: Polygon) -> int:
    xs, ys = polygon.xs, polygon.ys
    hull = convex_hull_ids([Point(xs[i], ys[i], i) for i in polygon.nxt])
    return abs(shoelace2(xs, ys, hull))


def run_local_search(polygon: Polygon, params: SolveParams, grid: Optional[EdgeGrid] = None) -> Polygon:
    """
    Improve ``polygon`` in place by rounds of path moves.

    A round collects every improving move, then applies them in order after
    re-testing each against the current polygon. Rounds stop once a round
    improves the score by less than ``params.ls_epsilon``.
    """
    if params.hops == 0 or len(polygon) < 4:
        return polygon
    grid = grid if grid is not None else polygon_grid(polygon)
    hull2 = _hull_area2(polygon)
    rounds = 0
    while True:
        moves = collect_moves(polygon, params, grid)
        if not moves:
            break
        total = sum(apply_move(polygon, grid, move) for move in moves)
        rounds += 1
        logger.debug("[LocalSearch] round %d: %d candidate moves, score +%.6f", rounds, len(moves), total / hull2)
        if total / hull2 < params.ls_epsilon:
            break
    return polygon


def local_search_agent(state: SolveState) -> Dict[str, Any]:
    polygon, params = state["polygon"], state["params"]
    started = time.perf_counter()
    run_local_search(polygon, params)
    elapsed = time.perf_counter() - started
    logger.info("[LocalSearch] %s: %d vertices in %.2fs", state["instance"].name, len(polygon), elapsed)
    return {
        "polygon": polygon,
        "timings": {**state.get("timings", {}), "local_search": elapsed},
        "next_action": "VERIFY_AGENT",
        "trace": [{"node": "LOCAL_SEARCH_AGENT", "status": "ok", "seconds": elapsed}],
    }
