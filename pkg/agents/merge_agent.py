"""
Divide and conquer for large instances.

The bounding box is cut into a g x g grid, every cell is solved on its own,
and the cell polygons are joined through bridges: quadrilaterals spanning one
edge of each of two neighbouring cell polygons. A minimum spanning tree over
the candidate bridges picks which ones get spliced in.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from agents.greedy_agent import run_greedy
from agents.local_search_agent import run_local_search
from models.errors import MergeFailure, SolveFailure
from models.instance import Instance, Objective
from models.params import SolveParams
from models.polygon import Polygon
from models.solve_state import SolveState
from utils.geometry import ids_interact, orient_xy, point_in_ring
from utils.helpers import DNC_GRID, worker_count
from utils.spatial_grid import EdgeGrid, edge_key

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
Edge = Tuple[int, int]


@dataclass
class Partition:
    instance: Instance
    g: int
    cells: Dict[Cell, List[int]]
    polygons: Dict[Cell, Polygon] = field(default_factory=dict)

    def order(self) -> List[Cell]:
        """Solved cells in row-major order."""
        return sorted(self.polygons, key=lambda c: (c[1], c[0]))


@dataclass(frozen=True)
class Bridge:
    """Quadrilateral (a, d, c, b) replacing edge a -> b of one cell polygon and c -> d of another."""

    source: Edge
    target: Edge
    cells: Tuple[Cell, Cell]
    delta: int

    @property
    def quad(self) -> Tuple[int, int, int, int]:
        (a, b), (c, d) = self.source, self.target
        return a, d, c, b

    @property
    def area2(self) -> int:
        return abs(self.delta)


def cell_index(instance: Instance, g: int) -> Dict[Cell, List[int]]:
    min_x, min_y, _, _ = instance.bbox
    span = instance.span
    cells: Dict[Cell, List[int]] = {}
    for p in instance.points:
        cell = (min((p.x - min_x) * g // span, g - 1), min((p.y - min_y) * g // span, g - 1))
        cells.setdefault(cell, []).append(p.id)
    return cells


def _degenerate(instance: Instance, ids: Sequence[int]) -> bool:
    if len(ids) < 3:
        return True
    xs, ys = instance.xs, instance.ys
    a, b = ids[0], ids[1]
    return all(orient_xy(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) == 0 for c in ids[2:])


def assign_cells(instance: Instance, g: int) -> Dict[Cell, List[int]]:
    """
    Point ids per cell, with the points of cells that cannot hold a polygon
    moved to the nearest cell that can (Chebyshev, then Manhattan distance,
    then row-major order).
    """
    cells = cell_index(instance, g)
    solid = sorted((c for c, ids in cells.items() if not _degenerate(instance, ids)), key=lambda c: (c[1], c[0]))
    if not solid:
        return {(0, 0): list(range(instance.n))}
    out = {c: list(cells[c]) for c in solid}
    for cell, ids in sorted(cells.items(), key=lambda item: (item[0][1], item[0][0])):
        if cell in out:
            continue
        nearest = min(solid, key=lambda s: (max(abs(s[0] - cell[0]), abs(s[1] - cell[1])),
                                            abs(s[0] - cell[0]) + abs(s[1] - cell[1]), s[1], s[0]))
        logger.debug("[Merge] cell %s (%d point(s)) folded into %s", cell, len(ids), nearest)
        out[nearest].extend(ids)
    for ids in out.values():
        ids.sort()
    return out


def solve_cell(instance: Instance, params: SolveParams) -> Polygon:
    polygon = run_greedy(instance, params)
    return run_local_search(polygon, params)


def partition_solve(instance: Instance, params: SolveParams, g: int = DNC_GRID,
                    workers: Optional[int] = None) -> Partition:
    if g < 1:
        raise ValueError(f"grid size must be >= 1, got {g}")
    cells = assign_cells(instance, g)
    order = sorted(cells, key=lambda c: (c[1], c[0]))

    def run(cell: Cell) -> Polygon:
        sub, mapping = instance.subset(f"{instance.name}[{cell[0]},{cell[1]}]", cells[cell])
        try:
            local = solve_cell(sub, params)
        except SolveFailure as exc:
            raise SolveFailure(f"cell {cell} of {instance.name}: {exc}", exc.attempts) from exc
        return Polygon(instance.xs, instance.ys, [mapping[v] for v in local.vertices()])

    with ThreadPoolExecutor(max_workers=worker_count(workers, len(order))) as pool:
        polygons = list(pool.map(run, order))
    logger.info("[Merge] %s: solved %d cell(s) on a %dx%d grid", instance.name, len(order), g, g)
    return Partition(instance=instance, g=g, cells=cells, polygons=dict(zip(order, polygons)))


class BridgeIndex:
    """What a new bridge must avoid: every cell polygon edge, earlier bridge sides and edges already bridged."""

    def __init__(self, xs: Sequence[int], ys: Sequence[int], polygons: Iterable[Polygon]):
        self.xs, self.ys = xs, ys
        self.edges = EdgeGrid(xs, ys)
        for polygon in polygons:
            self.edges.add_polygon(polygon.edges())
        self.sides = EdgeGrid(xs, ys, columns=self.edges.columns)
        self.used: Set[Edge] = set()
        min_x, min_y = min(xs), min(ys)
        self.origin = (min_x, min_y)
        self.dtype = np.int64 if max(max(xs) - min_x, max(ys) - min_y) <= 2 ** 26 else object

    def valid(self, a: int, b: int, c: int, d: int) -> bool:
        if (a, b) in self.used or (c, d) in self.used:
            return False
        xs, ys = self.xs, self.ys
        if ids_interact(xs, ys, a, d, c, b):
            return False
        skip = (edge_key(a, b), edge_key(c, d))
        for p, q in ((a, d), (c, b)):
            if self.edges.any_interaction(p, q, skip) or self.sides.any_interaction(p, q):
                return False
        ring = [(xs[v], ys[v]) for v in (a, d, c, b)]
        corners = {a, b, c, d}
        for p in self.edges.points_in_box((a, b, c, d)).tolist():
            if p not in corners and point_in_ring(xs[p], ys[p], ring) >= 0:
                return False
        return True

    def accept(self, bridge: "Bridge") -> None:
        (a, b), (c, d) = bridge.source, bridge.target
        self.used.add((a, b))
        self.used.add((c, d))
        self.sides.add_edge(a, d)
        self.sides.add_edge(c, b)

    def edge_arrays(self, polygon: Polygon):
        edges = list(polygon.edges())
        (min_x, min_y), dtype, xs, ys = self.origin, self.dtype, self.xs, self.ys
        ux = np.asarray([xs[u] - min_x for u, _ in edges], dtype=dtype)
        uy = np.asarray([ys[u] - min_y for u, _ in edges], dtype=dtype)
        vx = np.asarray([xs[v] - min_x for _, v in edges], dtype=dtype)
        vy = np.asarray([ys[v] - min_y for _, v in edges], dtype=dtype)
        return edges, ux, uy, vx, vy


def best_bridge(p1: Polygon, p2: Polygon, objective: Objective, index: Optional[BridgeIndex] = None,
                cells: Tuple[Cell, Cell] = ((0, 0), (1, 0))) -> Optional[Bridge]:
    """
    Extremal valid bridge between two vertex-disjoint polygons, or None.

    Edge pairs are ranked by area (largest first when maximizing, smallest
    when minimizing), ties by the edges' positions in each polygon's vertex
    order; the first pair passing every validity test wins.
    """
    if index is None:
        index = BridgeIndex(p1.xs, p1.ys, (p1, p2))
    e1, ax, ay, bx, by = index.edge_arrays(p1)
    e2, cx, cy, dx, dy = index.edge_arrays(p2)
    ax, ay, bx, by = ax[:, None], ay[:, None], bx[:, None], by[:, None]
    # doubled signed area of (a, d, c, b); rows follow p1's edges, columns p2's
    quad = (ax * dy - dx * ay) + (cx * by - bx * cy) - (ax * by - bx * ay) - (cx * dy - dx * cy)
    rows, cols = np.nonzero(objective.sign * quad > 0)
    if rows.size == 0:
        return None
    magnitude = np.abs(quad[rows, cols])
    if index.dtype is object:
        magnitude = magnitude.astype(np.float64)
    primary = -magnitude if objective is Objective.MAX else magnitude
    for k in np.lexsort((cols, rows, primary)).tolist():
        i, j = int(rows[k]), int(cols[k])
        (a, b), (c, d) = e1[i], e2[j]
        if index.valid(a, b, c, d):
            return Bridge(source=(a, b), target=(c, d), cells=cells, delta=int(quad[i, j]))
    return None


def _next_solved(cell: Cell, step: Cell, solved: Set[Cell], g: int) -> Optional[Cell]:
    i, j = cell[0] + step[0], cell[1] + step[1]
    while i < g and j < g:
        if (i, j) in solved:
            return i, j
        i, j = i + step[0], j + step[1]
    return None


def compute_bridges(partition: Partition, objective: Objective) -> List[Bridge]:
    """Best bridge from each solved cell to the next solved cell on its right and below, in row-major order."""
    instance = partition.instance
    index = BridgeIndex(instance.xs, instance.ys, partition.polygons.values())
    order = partition.order()
    solved = set(order)
    bridges: List[Bridge] = []
    for cell in order:
        for step in ((1, 0), (0, 1)):
            other = _next_solved(cell, step, solved, partition.g)
            if other is None:
                continue
            bridge = best_bridge(partition.polygons[cell], partition.polygons[other], objective, index, (cell, other))
            if bridge is None:
                logger.debug("[Merge] no valid bridge between %s and %s", cell, other)
                continue
            index.accept(bridge)
            bridges.append(bridge)
    return bridges


def bridge_weight(bridge: Bridge, objective: Objective) -> int:
    # area given up when maximizing, area added when minimizing
    return -bridge.area2 if objective is Objective.MAX else bridge.area2


def components(cells: Sequence[Cell], bridges: Sequence[Bridge]) -> List[List[Cell]]:
    parent = {c: c for c in cells}

    def find(c: Cell) -> Cell:
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for bridge in bridges:
        x, y = find(bridge.cells[0]), find(bridge.cells[1])
        if x != y:
            parent[max(x, y)] = min(x, y)
    groups: Dict[Cell, List[Cell]] = {}
    for c in cells:
        groups.setdefault(find(c), []).append(c)
    return sorted((sorted(g, key=lambda c: (c[1], c[0])) for g in groups.values()), key=lambda g: (g[0][1], g[0][0]))


def prim_tree(cells: Sequence[Cell], bridges: Sequence[Bridge], objective: Objective) -> List[Bridge]:
    """Minimum spanning tree of the bridge graph, grown from the first cell."""
    if len(cells) <= 1:
        return []
    incident: Dict[Cell, List[int]] = {c: [] for c in cells}
    for k, bridge in enumerate(bridges):
        for c in bridge.cells:
            incident[c].append(k)
    reached = {cells[0]}
    heap: List[Tuple[int, int]] = []
    for k in incident[cells[0]]:
        heappush(heap, (bridge_weight(bridges[k], objective), k))
    tree: List[Bridge] = []
    while heap and len(reached) < len(cells):
        _, k = heappop(heap)
        first, second = bridges[k].cells
        if (first in reached) == (second in reached):
            continue
        new = second if first in reached else first
        reached.add(new)
        tree.append(bridges[k])
        for nk in incident[new]:
            heappush(heap, (bridge_weight(bridges[nk], objective), nk))
    if len(reached) < len(cells):
        parts = components(cells, bridges)
        raise MergeFailure(f"bridge graph has {len(parts)} components", parts)
    return tree


def merge_all(partition: Partition, objective: Objective) -> Polygon:
    """Splice the spanning tree's bridges into one polygon over every cell's vertices."""
    order = partition.order()
    if len(order) == 1:
        return partition.polygons[order[0]].copy()
    bridges = compute_bridges(partition, objective)
    tree = prim_tree(order, bridges, objective)
    instance = partition.instance
    merged = Polygon.from_cycles(instance.xs, instance.ys, [partition.polygons[c].vertices() for c in order])
    for bridge in tree:
        (a, b), (c, d) = bridge.source, bridge.target
        merged.splice_bridge(a, b, c, d)
    logger.info("[Merge] %s: %d candidate bridge(s), %d spliced", instance.name, len(bridges), len(tree))
    return merged


def merge_agent(state: SolveState) -> Dict[str, Any]:
    instance, params = state["instance"], state["params"]
    g = state.get("dnc_grid") or DNC_GRID
    started = time.perf_counter()
    try:
        partition = partition_solve(instance, params, g)
        polygon = merge_all(partition, params.objective)
    except (SolveFailure, MergeFailure) as exc:
        logger.error("[Merge] %s", exc)
        return {"failure": exc, "next_action": "END", "trace": [{"node": "MERGE_AGENT", "status": "failed", "error": str(exc)}]}
    elapsed = time.perf_counter() - started
    return {
        "polygon": polygon,
        "timings": {**state.get("timings", {}), "merge": elapsed},
        "next_action": "VERIFY_AGENT",
        "trace": [{"node": "MERGE_AGENT", "status": "ok", "cells": len(partition.polygons), "seconds": elapsed}],
    }
